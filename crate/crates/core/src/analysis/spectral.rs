use crate::cube::HyperspectralCube;
use crate::error::{Error, Result};

/// Half-size of the spatial search window around the expected location.
const WINDOW_RADIUS: usize = 1;

/// Distance in nm between the brightest channel of the reconstructed
/// spectrum and `true_lambda_nm`.
///
/// The spectrum is taken at the pixel with the largest spectral sum inside
/// the 3×3 window around `(x, y)`; ties go to the pixel nearest `(x, y)`.
pub fn spectral_peak_error(
    recon: &HyperspectralCube,
    (x, y): (usize, usize),
    true_lambda_nm: f64,
) -> Result<f64> {
    let (ny, nx) = (recon.ny(), recon.nx());
    if x >= nx || y >= ny {
        return Err(Error::param(format!("point ({x}, {y}) outside {ny}x{nx}")));
    }
    let data = recon.data();
    let spectral_sum = |px: usize, py: usize| (0..recon.n_lambda()).map(|c| data[[c, py, px]]).sum::<f64>();

    let mut best: Option<((usize, usize), f64, usize)> = None;
    for py in y.saturating_sub(WINDOW_RADIUS)..=(y + WINDOW_RADIUS).min(ny - 1) {
        for px in x.saturating_sub(WINDOW_RADIUS)..=(x + WINDOW_RADIUS).min(nx - 1) {
            let s = spectral_sum(px, py);
            let dist = px.abs_diff(x) + py.abs_diff(y);
            let better = match best {
                None => true,
                Some((_, bs, bd)) => s > bs || (s == bs && dist < bd),
            };
            if better {
                best = Some(((px, py), s, dist));
            }
        }
    }
    let ((px, py), total, _) = best.expect("window is never empty");
    if !(total > 0.0) {
        return Err(Error::Numerical(format!("reconstruction is empty near ({x}, {y})")));
    }
    let peak_channel = (0..recon.n_lambda())
        .max_by(|&a, &b| data[[a, py, px]].total_cmp(&data[[b, py, px]]))
        .expect("cube has channels");
    Ok((recon.wavelengths_nm()[peak_channel] - true_lambda_nm).abs())
}
