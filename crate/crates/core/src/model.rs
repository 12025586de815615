//! The linear measurement operator `A`: per-channel convolution with the
//! PSF, centered crop to the sensor, filter masking, and a sum over channels.

use ndarray::{Array2, Array3, ArrayView2, ArrayViewMut2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::conv::{crop_offset, embed, full_shape};
use crate::cube::{HyperspectralCube, Measurement};
use crate::error::{Error, Result};
use crate::fft::{fast_len, Fft2};
use crate::filter::FilterFunction;
use crate::psf::Psf;

const POWER_ITERATION_SEED: u64 = 0x5eed_0f_a7a;

/// PSF, filter function, and scene grid. Holds the PSF spectrum and FFT
/// plans; everything is read-only after construction.
#[derive(Debug)]
pub struct SystemModel {
    psf: Psf,
    filter: FilterFunction,
    scene_shape: (usize, usize),
    full_shape: (usize, usize),
    crop_offset: (usize, usize),
    fft: Fft2,
    psf_spectrum: Vec<Complex64>,
}

impl Clone for SystemModel {
    fn clone(&self) -> Self {
        SystemModel::new(self.psf.clone(), self.filter.clone(), self.scene_shape)
            .expect("cloning a validated model")
    }
}

impl SystemModel {
    pub fn new(psf: Psf, filter: FilterFunction, scene_shape: (usize, usize)) -> Result<Self> {
        if scene_shape.0 == 0 || scene_shape.1 == 0 {
            return Err(Error::shape("scene shape must be positive"));
        }
        let full = full_shape(scene_shape, psf.shape())?;
        let offset = crop_offset(full, filter.sensor_shape())?;
        let fft = Fft2::new(fast_len(full.0), fast_len(full.1));
        let mut psf_spectrum = embed(psf.data().view(), fft.shape());
        fft.forward(&mut psf_spectrum);
        Ok(SystemModel {
            psf,
            filter,
            scene_shape,
            full_shape: full,
            crop_offset: offset,
            fft,
            psf_spectrum,
        })
    }

    pub fn psf(&self) -> &Psf {
        &self.psf
    }

    pub fn filter(&self) -> &FilterFunction {
        &self.filter
    }

    pub fn scene_shape(&self) -> (usize, usize) {
        self.scene_shape
    }

    pub fn sensor_shape(&self) -> (usize, usize) {
        self.filter.sensor_shape()
    }

    pub fn n_lambda(&self) -> usize {
        self.filter.n_lambda()
    }

    pub fn full_shape(&self) -> (usize, usize) {
        self.full_shape
    }

    /// Position of the sensor window inside the full convolution output.
    pub fn crop_offset(&self) -> (usize, usize) {
        self.crop_offset
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        self.filter.wavelengths_nm()
    }

    /// Zero cube on the scene grid with the filter's wavelengths.
    pub fn zero_cube(&self) -> HyperspectralCube {
        let (ny, nx) = self.scene_shape;
        HyperspectralCube::from_parts_unchecked(
            self.wavelengths_nm().to_vec(),
            Array3::zeros((self.n_lambda(), ny, nx)),
        )
    }

    pub fn check_cube(&self, v: &HyperspectralCube) -> Result<()> {
        let expect = (self.n_lambda(), self.scene_shape.0, self.scene_shape.1);
        if v.data().dim() != expect {
            return Err(Error::shape(format!(
                "cube is {:?}, model expects {:?}",
                v.data().dim(),
                expect
            )));
        }
        Ok(())
    }

    pub fn check_measurement(&self, b: &Measurement) -> Result<()> {
        if b.shape() != self.sensor_shape() {
            return Err(Error::shape(format!(
                "measurement is {:?}, sensor is {:?}",
                b.shape(),
                self.sensor_shape()
            )));
        }
        Ok(())
    }

    /// `b = Σ_λ F_λ · crop(h * v_λ)`.
    pub fn forward(&self, v: &HyperspectralCube) -> Result<Measurement> {
        self.check_cube(v)?;
        Ok(Measurement::from_array_unchecked(self.forward_array(v.data())))
    }

    /// Transpose of [`SystemModel::forward`]: mask by each `F_λ`, place the
    /// result back in the convolution frame, correlate with `h`, and keep the
    /// scene window.
    pub fn adjoint(&self, b: &Measurement) -> Result<HyperspectralCube> {
        self.check_measurement(b)?;
        Ok(HyperspectralCube::from_parts_unchecked(
            self.wavelengths_nm().to_vec(),
            self.adjoint_array(b.data().view()),
        ))
    }

    /// Largest eigenvalue of `AᵀA` by power iteration from a fixed pseudo-random
    /// start. Stops once successive estimates agree to `tol` (relative).
    pub fn operator_norm(&self, max_iters: usize, tol: f64) -> Result<f64> {
        if max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if !(tol > 0.0) {
            return Err(Error::param("tol must be positive"));
        }
        let (ny, nx) = self.scene_shape;
        let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
        let mut v = Array3::from_shape_fn((self.n_lambda(), ny, nx), |_| rng.random::<f64>());
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v /= norm;

        let mut estimate = 0.0;
        for _ in 0..max_iters {
            let w = self.adjoint_array(self.forward_array(&v).view());
            let next = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if next == 0.0 {
                return Ok(0.0);
            }
            if !next.is_finite() {
                return Err(Error::Numerical("power iteration diverged".into()));
            }
            v = w / next;
            let converged = (next - estimate).abs() < tol * next;
            estimate = next;
            if converged {
                break;
            }
        }
        Ok(estimate)
    }

    pub(crate) fn forward_array(&self, v: &Array3<f64>) -> Array2<f64> {
        let (sy, sx) = self.sensor_shape();
        let (oy, ox) = self.crop_offset;
        let width = self.fft.shape().1;
        let scale = 1.0 / self.fft.len() as f64;
        let f = self.filter.data();
        let mut b = Array2::zeros((sy, sx));

        // Two real channels share one complex transform: the PSF is real, so
        // the real and imaginary parts of the product stay separate.
        let k = self.n_lambda();
        for c in (0..k).step_by(2) {
            let second = (c + 1 < k).then(|| v.index_axis(Axis(0), c + 1));
            let buf = self.convolve_pair(v.index_axis(Axis(0), c), second);
            let f0 = f.index_axis(Axis(0), c);
            let f1 = second.map(|_| f.index_axis(Axis(0), c + 1));
            for ((y, x), out) in b.indexed_iter_mut() {
                let w = buf[(y + oy) * width + x + ox] * scale;
                *out += f0[[y, x]] * w.re;
                if let Some(f1) = &f1 {
                    *out += f1[[y, x]] * w.im;
                }
            }
        }
        b
    }

    pub(crate) fn adjoint_array(&self, b: ArrayView2<'_, f64>) -> Array3<f64> {
        let (ny, nx) = self.scene_shape;
        let k = self.n_lambda();
        let (oy, ox) = self.crop_offset;
        let (fy, fx) = self.fft.shape();
        let scale = 1.0 / self.fft.len() as f64;
        let f = self.filter.data();
        let mut out = Array3::zeros((k, ny, nx));

        for c in (0..k).step_by(2) {
            let pair = c + 1 < k;
            let mut buf = vec![Complex64::default(); fy * fx];
            for ((y, x), &bv) in b.indexed_iter() {
                let cell = &mut buf[(y + oy) * fx + x + ox];
                cell.re = f[[c, y, x]] * bv;
                if pair {
                    cell.im = f[[c + 1, y, x]] * bv;
                }
            }
            self.fft.forward(&mut buf);
            for (z, h) in buf.iter_mut().zip(&self.psf_spectrum) {
                *z *= h.conj();
            }
            self.fft.inverse(&mut buf);

            let write = |mut dst: ArrayViewMut2<'_, f64>, imag: bool| {
                for ((y, x), o) in dst.indexed_iter_mut() {
                    let z = buf[y * fx + x];
                    *o = if imag { z.im } else { z.re } * scale;
                }
            };
            write(out.index_axis_mut(Axis(0), c), false);
            if pair {
                write(out.index_axis_mut(Axis(0), c + 1), true);
            }
        }
        out
    }

    /// Transform of `first + i·second` zero-padded, multiplied by the PSF
    /// spectrum, and inverted. Unscaled.
    fn convolve_pair(
        &self,
        first: ArrayView2<'_, f64>,
        second: Option<ArrayView2<'_, f64>>,
    ) -> Vec<Complex64> {
        let mut buf = embed(first, self.fft.shape());
        if let Some(second) = second {
            let width = self.fft.shape().1;
            for ((y, x), &v) in second.indexed_iter() {
                buf[y * width + x].im = v;
            }
        }
        self.fft.forward(&mut buf);
        for (z, h) in buf.iter_mut().zip(&self.psf_spectrum) {
            *z *= h;
        }
        self.fft.inverse(&mut buf);
        buf
    }
}

/// Per-channel `crop(h * v_λ)`, i.e. the intermediate image before filtering.
pub fn sensor_irradiance(model: &SystemModel, v: &HyperspectralCube) -> Result<Array3<f64>> {
    model.check_cube(v)?;
    let (sy, sx) = model.sensor_shape();
    let (oy, ox) = model.crop_offset;
    let width = model.fft.shape().1;
    let scale = 1.0 / model.fft.len() as f64;
    let mut w = Array3::zeros((model.n_lambda(), sy, sx));
    for c in 0..model.n_lambda() {
        let buf = model.convolve_pair(v.data().index_axis(Axis(0), c), None);
        for ((y, x), o) in w.index_axis_mut(Axis(0), c).indexed_iter_mut() {
            *o = buf[(y + oy) * width + x + ox].re * scale;
        }
    }
    Ok(w)
}
