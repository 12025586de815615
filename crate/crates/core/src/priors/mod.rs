//! Penalties and proximal operators for the regularized reconstruction:
//! weighted anisotropic 3D total variation, the nuclear norm of the
//! (pixels × channels) unfolding, and the non-negativity constraint.

mod nuclear;
mod tv;

pub use nuclear::{nuclear_value, prox_nuclear, singular_values};
pub use tv::{prox_tv3d, tv3d_value, TvWeights};

pub(crate) use nuclear::{nuclear_value_array, prox_nuclear_array};
pub(crate) use tv::{prox_tv3d_array, tv3d_value_array};

use crate::cube::HyperspectralCube;

/// Elementwise `max(v, 0)`.
pub fn project_nonneg(v: &HyperspectralCube) -> HyperspectralCube {
    HyperspectralCube::with_data_of(v, v.data().mapv(|x| x.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;

    #[test]
    fn nonneg_projection() {
        let neg = HyperspectralCube::new(vec![1.0], Array3::from_elem((1, 2, 3), -2.0)).unwrap();
        assert!(project_nonneg(&neg).data().iter().all(|&x| x == 0.0));

        let pos = HyperspectralCube::new(
            vec![1.0, 2.0],
            Array3::from_shape_fn((2, 2, 2), |(a, b, c)| (a + b + c) as f64),
        )
        .unwrap();
        assert_eq!(project_nonneg(&pos), pos);

        let mixed = HyperspectralCube::new(
            vec![1.0],
            Array3::from_shape_fn((1, 3, 3), |(_, y, x)| y as f64 - x as f64),
        )
        .unwrap();
        let p = project_nonneg(&mixed);
        for (a, b) in p.data().iter().zip(mixed.data()) {
            assert_eq!(*a, if *b > 0.0 { *b } else { 0.0 });
        }
        assert_eq!(project_nonneg(&p), p);
    }
}
