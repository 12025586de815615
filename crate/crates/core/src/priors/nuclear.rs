use nalgebra::DMatrix;
use ndarray::Array3;

use crate::cube::HyperspectralCube;
use crate::error::{Error, Result};

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITERS: usize = 10_000;

/// Unfolds `[λ][y][x]` into a `(ny·nx) × K` matrix: one row per pixel, one
/// column per channel. The channel planes are already contiguous, which is
/// exactly nalgebra's column-major layout.
fn unfold(v: &Array3<f64>) -> DMatrix<f64> {
    let (k, ny, nx) = v.dim();
    match v.as_slice() {
        Some(s) => DMatrix::from_column_slice(ny * nx, k, s),
        None => DMatrix::from_iterator(ny * nx, k, v.iter().copied()),
    }
}

fn fold(m: &DMatrix<f64>, dim: (usize, usize, usize)) -> Array3<f64> {
    Array3::from_shape_vec(dim, m.as_slice().to_vec()).expect("unfolding preserves length")
}

/// Singular values of the spectral unfolding, descending.
pub fn singular_values(v: &HyperspectralCube) -> Vec<f64> {
    let mut s: Vec<f64> = unfold(v.data()).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn nuclear_value(v: &HyperspectralCube) -> f64 {
    nuclear_value_array(v.data())
}

pub(crate) fn nuclear_value_array(v: &Array3<f64>) -> f64 {
    unfold(v).singular_values().sum()
}

/// Singular value soft-thresholding of the spectral unfolding.
pub fn prox_nuclear(v: &HyperspectralCube, gamma: f64) -> Result<HyperspectralCube> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::param(format!("nuclear prox threshold {gamma} must be >= 0")));
    }
    Ok(HyperspectralCube::with_data_of(v, prox_nuclear_array(v.data(), gamma)?))
}

pub(crate) fn prox_nuclear_array(v: &Array3<f64>, gamma: f64) -> Result<Array3<f64>> {
    if gamma == 0.0 {
        return Ok(v.clone());
    }
    let m = unfold(v);
    let (rows, cols) = m.shape();
    let mut svd = nalgebra::SVD::try_new(m, true, true, SVD_EPS, SVD_MAX_ITERS).ok_or_else(|| {
        Error::Numerical(format!(
            "svd of {rows}x{cols} unfolding did not converge in {SVD_MAX_ITERS} iterations"
        ))
    })?;
    svd.singular_values.apply(|s| *s = (*s - gamma).max(0.0));
    let shrunk = svd
        .recompose()
        .map_err(|e| Error::Numerical(format!("svd recomposition failed: {e}")))?;
    Ok(fold(&shrunk, v.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_one(a: &[f64], s: &[f64], ny: usize, nx: usize) -> HyperspectralCube {
        let data = Array3::from_shape_fn((s.len(), ny, nx), |(c, y, x)| a[y * nx + x] * s[c]);
        HyperspectralCube::new((0..s.len()).map(|i| 500.0 + i as f64).collect(), data).unwrap()
    }

    #[test]
    fn zero_cube() {
        let z = HyperspectralCube::zeros(vec![1.0, 2.0], 3, 3).unwrap();
        assert_eq!(nuclear_value(&z), 0.0);
    }

    #[test]
    fn rank_one_value_is_norm_product() {
        let a = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
        let s = [2.0, 1.0, -0.5];
        let v = rank_one(&a, &s, 2, 3);
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let ns = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((nuclear_value(&v) - na * ns).abs() < 1e-12 * na * ns);
    }

    #[test]
    fn full_shrinkage_of_rank_one() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let s = [1.0, 1.0];
        let v = rank_one(&a, &s, 2, 2);
        let sigma = nuclear_value(&v);
        let p = prox_nuclear(&v, sigma).unwrap();
        assert!(p.data().iter().all(|x| x.abs() < 1e-12));
        let p = prox_nuclear(&v, 2.0 * sigma).unwrap();
        assert!(p.data().iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn zero_gamma_is_identity() {
        let data = Array3::from_shape_fn((3, 2, 2), |(c, y, x)| (c as f64 - y as f64) * 0.7 + x as f64);
        let v = HyperspectralCube::new(vec![1.0, 2.0, 3.0], data).unwrap();
        assert_eq!(prox_nuclear(&v, 0.0).unwrap(), v);
        assert!(prox_nuclear(&v, -0.1).is_err());
    }

    #[test]
    fn unfold_layout() {
        let data = Array3::from_shape_fn((2, 2, 3), |(c, y, x)| (100 * c + 10 * y + x) as f64);
        let m = unfold(&data);
        assert_eq!(m.shape(), (6, 2));
        assert_eq!(m[(4, 1)], 111.0);
        assert_eq!(fold(&m, data.dim()), data);
    }
}
