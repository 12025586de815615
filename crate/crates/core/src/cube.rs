//! Scene cubes and sensor images.

use ndarray::{Array2, Array3};

use crate::error::{Error, Result};

/// Spectral irradiance `v[λ][y][x]` with one wavelength per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperspectralCube {
    wavelengths_nm: Vec<f64>,
    data: Array3<f64>,
}

impl HyperspectralCube {
    /// Builds a cube from `data` laid out as `[λ][y][x]`.
    pub fn new(wavelengths_nm: Vec<f64>, data: Array3<f64>) -> Result<Self> {
        let (k, ny, nx) = data.dim();
        if k == 0 || ny == 0 || nx == 0 {
            return Err(Error::shape(format!("empty cube {k}x{ny}x{nx}")));
        }
        if wavelengths_nm.len() != k {
            return Err(Error::shape(format!(
                "{} wavelengths for {k} channels",
                wavelengths_nm.len()
            )));
        }
        check_wavelengths(&wavelengths_nm)?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("cube data".into()));
        }
        Ok(HyperspectralCube { wavelengths_nm, data })
    }

    pub fn zeros(wavelengths_nm: Vec<f64>, ny: usize, nx: usize) -> Result<Self> {
        let k = wavelengths_nm.len();
        Self::new(wavelengths_nm, Array3::zeros((k, ny, nx)))
    }

    /// Re-wraps an array that is already known to match `like`'s shape.
    pub(crate) fn with_data_of(like: &HyperspectralCube, data: Array3<f64>) -> Self {
        debug_assert_eq!(like.data.dim(), data.dim());
        HyperspectralCube { wavelengths_nm: like.wavelengths_nm.clone(), data }
    }

    pub(crate) fn from_parts_unchecked(wavelengths_nm: Vec<f64>, data: Array3<f64>) -> Self {
        HyperspectralCube { wavelengths_nm, data }
    }

    pub fn n_lambda(&self) -> usize {
        self.data.dim().0
    }

    pub fn ny(&self) -> usize {
        self.data.dim().1
    }

    pub fn nx(&self) -> usize {
        self.data.dim().2
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        &self.wavelengths_nm
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    /// Mutable access to the samples. Callers are responsible for keeping them finite.
    pub fn data_mut(&mut self) -> &mut Array3<f64> {
        &mut self.data
    }

    pub fn into_data(self) -> Array3<f64> {
        self.data
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    /// Sum over the spectral axis.
    pub fn spectral_sum(&self) -> Array2<f64> {
        self.data.sum_axis(ndarray::Axis(0))
    }
}

pub(crate) fn check_wavelengths(wavelengths_nm: &[f64]) -> Result<()> {
    if wavelengths_nm.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("wavelengths".into()));
    }
    if wavelengths_nm.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("wavelengths must be strictly increasing"));
    }
    Ok(())
}

/// Sensor image `b[y][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    data: Array2<f64>,
}

impl Measurement {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (ny, nx) = data.dim();
        if ny == 0 || nx == 0 {
            return Err(Error::shape(format!("empty measurement {ny}x{nx}")));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("measurement".into()));
        }
        Ok(Measurement { data })
    }

    pub fn zeros(ny: usize, nx: usize) -> Result<Self> {
        Self::new(Array2::zeros((ny, nx)))
    }

    pub(crate) fn from_array_unchecked(data: Array2<f64>) -> Self {
        Measurement { data }
    }

    pub fn ny(&self) -> usize {
        self.data.dim().0
    }

    pub fn nx(&self) -> usize {
        self.data.dim().1
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.dim()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<f64> {
        &mut self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }
}
