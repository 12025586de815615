//! Linear 2D convolution and the centered sensor crop.

use ndarray::{s, Array2, ArrayView2};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fast_len, Fft2};
use crate::psf::Psf;

/// Size of the full linear convolution of an `a`-shaped and `b`-shaped array.
pub fn full_shape(a: (usize, usize), b: (usize, usize)) -> Result<(usize, usize)> {
    let dim = |p: usize, q: usize| {
        p.checked_add(q)
            .and_then(|n| n.checked_sub(1))
            .filter(|_| p > 0 && q > 0)
            .ok_or_else(|| Error::shape(format!("cannot convolve extents {p} and {q}")))
    };
    let ny = dim(a.0, b.0)?;
    let nx = dim(a.1, b.1)?;
    ny.checked_mul(nx)
        .ok_or_else(|| Error::shape(format!("convolution frame {ny}x{nx} overflows")))?;
    Ok((ny, nx))
}

/// Top-left corner of the centered `out` window inside `full`.
///
/// An odd remainder leaves the extra row/column on the high-index side.
pub fn crop_offset(full: (usize, usize), out: (usize, usize)) -> Result<(usize, usize)> {
    if out.0 > full.0 || out.1 > full.1 {
        return Err(Error::shape(format!(
            "crop {}x{} larger than input {}x{}",
            out.0, out.1, full.0, full.1
        )));
    }
    Ok(((full.0 - out.0) / 2, (full.1 - out.1) / 2))
}

pub fn crop_center(full: ArrayView2<'_, f64>, out_shape: (usize, usize)) -> Result<Array2<f64>> {
    let (oy, ox) = crop_offset(full.dim(), out_shape)?;
    Ok(full
        .slice(s![oy..oy + out_shape.0, ox..ox + out_shape.1])
        .to_owned())
}

/// Full (non-circular) linear convolution of `plane` with `psf` via a
/// zero-padded FFT. Output is `(ny_a + ny_b - 1, nx_a + nx_b - 1)`.
pub fn convolve2d_full(plane: ArrayView2<'_, f64>, psf: &Psf) -> Result<Array2<f64>> {
    if plane.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("convolution input".into()));
    }
    let full = full_shape(plane.dim(), psf.shape())?;
    let fft = Fft2::new(fast_len(full.0), fast_len(full.1));

    let mut a = embed(plane, fft.shape());
    let mut h = embed(psf.data().view(), fft.shape());
    fft.forward(&mut a);
    fft.forward(&mut h);
    for (x, y) in a.iter_mut().zip(&h) {
        *x *= y;
    }
    fft.inverse(&mut a);

    let scale = 1.0 / fft.len() as f64;
    let width = fft.shape().1;
    Ok(Array2::from_shape_fn(full, |(y, x)| a[y * width + x].re * scale))
}

/// Zero-pads `src` into the top-left corner of a complex frame.
pub(crate) fn embed(src: ArrayView2<'_, f64>, (ny, nx): (usize, usize)) -> Vec<Complex64> {
    let mut buf = vec![Complex64::default(); ny * nx];
    for ((y, x), &v) in src.indexed_iter() {
        buf[y * nx + x].re = v;
    }
    buf
}
