use ndarray::Array2;
use rustfft::num_complex::Complex64;

use crate::conv::embed;
use crate::error::{Error, Result};
use crate::fft::{fast_len, Fft2};
use crate::psf::Psf;

/// Fraction of the autocorrelation peak that defines the resolution half-width.
pub const AUTOCORR_LEVEL: f64 = 0.7;

/// Linear 2D autocorrelation of the mean-subtracted PSF. Zero lag sits at
/// index `(ny - 1, nx - 1)` of the `(2ny - 1, 2nx - 1)` output.
pub fn psf_autocorrelation(psf: &Psf) -> Array2<f64> {
    let (ny, nx) = psf.shape();
    let mean = psf.data().mean().unwrap_or(0.0);
    let centered = psf.data().mapv(|v| v - mean);
    let fft = Fft2::new(fast_len(2 * ny - 1), fast_len(2 * nx - 1));
    let (fy, fx) = fft.shape();
    let mut buf = embed(centered.view(), (fy, fx));
    fft.forward(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    fft.inverse(&mut buf);
    let scale = 1.0 / fft.len() as f64;
    // lag (dy, dx) lives at index (dy mod fy, dx mod fx)
    Array2::from_shape_fn((2 * ny - 1, 2 * nx - 1), |(i, j)| {
        let dy = (i as isize - (ny as isize - 1)).rem_euclid(fy as isize) as usize;
        let dx = (j as isize - (nx as isize - 1)).rem_euclid(fx as isize) as usize;
        buf[dy * fx + dx].re * scale
    })
}

/// Half-width (pixels) at which the horizontal autocorrelation profile
/// through the zero-lag peak first drops to 70% of the peak, with linear
/// interpolation between samples.
pub fn autocorr_resolution(psf: &Psf) -> Result<f64> {
    let energy: f64 = psf.data().iter().map(|v| v * v).sum();
    let ac = psf_autocorrelation(psf);
    let (cy, cx) = (psf.ny() - 1, psf.nx() - 1);
    let profile: Vec<f64> = (cx..ac.dim().1).map(|j| ac[[cy, j]]).collect();
    let peak = profile[0];
    if !(peak > 1e-12 * energy) {
        return Err(Error::Numerical("flat psf: autocorrelation has no peak".into()));
    }
    let level = AUTOCORR_LEVEL * peak;
    let cross = profile
        .iter()
        .position(|&v| v <= level)
        .ok_or_else(|| Error::Numerical("autocorrelation never falls to 70% of its peak".into()))?;
    let (hi, lo) = (profile[cross - 1], profile[cross]);
    Ok((cross - 1) as f64 + (hi - level) / (hi - lo))
}
