use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psf::{center_of, Psf};

/// Contrast exponent applied to the smoothed noise.
pub const CAUSTIC_CONTRAST: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsfKind {
    #[serde(alias = "diffuser_psf")]
    Diffuser,
    #[serde(alias = "high_na")]
    HighNa,
    #[serde(alias = "low_na")]
    LowNa,
}

impl std::str::FromStr for PsfKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diffuser" => Ok(PsfKind::Diffuser),
            "high-na" | "high_na" => Ok(PsfKind::HighNa),
            "low-na" | "low_na" => Ok(PsfKind::LowNa),
            other => Err(Error::param(format!("unknown psf kind {other:?}"))),
        }
    }
}

/// Lens baselines: a diffraction-limited spot matched to one sensor pixel,
/// or to a whole super-pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LensKind {
    HighNa,
    LowNa,
}

/// Seeded caustic-like diffuser PSF.
///
/// White Gaussian noise is low-passed with a Gaussian of width `feature_px`,
/// pushed through `exp(4·z)`, shifted to a zero minimum and normalized to
/// unit sum.
/// The pattern covers the whole frame.
pub fn generate_diffuser_psf(seed: u64, shape: (usize, usize), feature_px: f64) -> Result<Psf> {
    let (ny, nx) = shape;
    if ny < 2 || nx < 2 {
        return Err(Error::shape(format!("diffuser psf needs at least 2x2, got {ny}x{nx}")));
    }
    if !(feature_px >= 1.0) || !feature_px.is_finite() {
        return Err(Error::param(format!("feature_px {feature_px} must be >= 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Array2::from_shape_fn(shape, |_| StandardNormal.sample(&mut rng));
    let smooth = gaussian_blur_periodic(&noise, feature_px);

    let mut caustic = smooth.mapv(|v| (CAUSTIC_CONTRAST * v).exp());
    let floor = caustic.iter().copied().fold(f64::INFINITY, f64::min);
    caustic.mapv_inplace(|v| v - floor);
    Psf::new(caustic)
}

/// `HighNa` is a single-pixel impulse at the frame center; `LowNa` a
/// centered Gaussian whose FWHM equals `superpixel_px`.
pub fn generate_lens_psf(kind: LensKind, shape: (usize, usize), superpixel_px: usize) -> Result<Psf> {
    if shape.0 == 0 || shape.1 == 0 {
        return Err(Error::shape("lens psf shape must be positive"));
    }
    if superpixel_px == 0 {
        return Err(Error::param("superpixel_px must be >= 1"));
    }
    let (cy, cx) = center_of(shape);
    let data = match kind {
        LensKind::HighNa => {
            let mut d = Array2::zeros(shape);
            d[[cy, cx]] = 1.0;
            d
        }
        LensKind::LowNa => {
            let sigma = superpixel_px as f64 / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
            let inv = 1.0 / (2.0 * sigma * sigma);
            Array2::from_shape_fn(shape, |(y, x)| {
                let dy = y as f64 - cy as f64;
                let dx = x as f64 - cx as f64;
                (-(dy * dy + dx * dx) * inv).exp()
            })
        }
    };
    Psf::new(data)
}

/// Dispatches on [`PsfKind`]; `seed` and `feature_px` only matter for the
/// diffuser, `superpixel_px` only for the low-NA lens.
pub fn generate_psf(
    kind: PsfKind,
    shape: (usize, usize),
    seed: u64,
    feature_px: f64,
    superpixel_px: usize,
) -> Result<Psf> {
    match kind {
        PsfKind::Diffuser => generate_diffuser_psf(seed, shape, feature_px),
        PsfKind::HighNa => generate_lens_psf(LensKind::HighNa, shape, superpixel_px),
        PsfKind::LowNa => generate_lens_psf(LensKind::LowNa, shape, superpixel_px),
    }
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil() as isize;
    let k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = k.iter().sum();
    k.into_iter().map(|v| v / total).collect()
}

/// Separable Gaussian blur with wrap-around boundaries.
fn gaussian_blur_periodic(src: &Array2<f64>, sigma: f64) -> Array2<f64> {
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let (ny, nx) = src.dim();
    let wrap = |i: isize, n: usize| i.rem_euclid(n as isize) as usize;

    let rows: Array2<f64> = Array2::from_shape_fn((ny, nx), |(y, x)| {
        kernel
            .iter()
            .enumerate()
            .map(|(j, w)| w * src[[y, wrap(x as isize + j as isize - radius, nx)]])
            .sum()
    });
    Array2::from_shape_fn((ny, nx), |(y, x)| {
        kernel
            .iter()
            .enumerate()
            .map(|(j, w)| w * rows[[wrap(y as isize + j as isize - radius, ny), x]])
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diffuser_is_deterministic_and_normalized() {
        let a = generate_diffuser_psf(7, (32, 24), 1.5).unwrap();
        let b = generate_diffuser_psf(7, (32, 24), 1.5).unwrap();
        assert_eq!(a, b);
        assert!((a.data().sum() - 1.0).abs() < 1e-9);
        assert!(a.data().iter().all(|&v| v >= 0.0));
        let c = generate_diffuser_psf(8, (32, 24), 1.5).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn diffuser_rejects_bad_input() {
        assert!(generate_diffuser_psf(1, (1, 8), 1.5).is_err());
        assert!(generate_diffuser_psf(1, (8, 8), 0.5).is_err());
    }

    #[test]
    fn diffuser_spans_the_frame() {
        let p = generate_diffuser_psf(3, (64, 64), 1.5).unwrap();
        let peak = p.data().iter().copied().fold(0.0, f64::max);
        // bright caustic ridges in every quadrant
        for (y0, x0) in [(0, 0), (0, 32), (32, 0), (32, 32)] {
            let q = p.data().slice(ndarray::s![y0..y0 + 32, x0..x0 + 32]);
            let qmax = q.iter().copied().fold(0.0, f64::max);
            assert!(qmax > 0.05 * peak);
        }
    }

    #[test]
    fn high_na_is_one_impulse() {
        let p = generate_lens_psf(LensKind::HighNa, (8, 8), 4).unwrap();
        let nz: Vec<_> = p.data().iter().filter(|&&v| v != 0.0).collect();
        assert_eq!(nz, vec![&1.0]);
        assert_eq!(p.data()[[3, 3]], 1.0);
    }

    #[test]
    fn low_na_fwhm_matches_superpixel() {
        let p = generate_lens_psf(LensKind::LowNa, (33, 33), 8).unwrap();
        assert!((p.data().sum() - 1.0).abs() < 1e-9);
        let (cy, cx) = p.center();
        let peak = p.data()[[cy, cx]];
        let above: Vec<usize> = (0..33).filter(|&x| p.data()[[cy, x]] >= 0.5 * peak).collect();
        let diameter = above.len() as f64;
        assert!((diameter - 8.0).abs() <= 1.0, "diameter {diameter}");
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("high-na".parse::<PsfKind>().unwrap(), PsfKind::HighNa);
        assert_eq!("low_na".parse::<PsfKind>().unwrap(), PsfKind::LowNa);
        assert!("pinhole".parse::<PsfKind>().is_err());
    }
}
