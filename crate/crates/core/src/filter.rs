use ndarray::Array3;

use crate::cube::{check_wavelengths, HyperspectralCube};
use crate::error::{Error, Result};

/// Per-channel transmittance `F_λ[y][x]` of a tiled spectral filter array,
/// with the sensor's spectral response folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterFunction {
    wavelengths_nm: Vec<f64>,
    data: Array3<f64>,
    superpixel: (usize, usize),
    filter_px: usize,
}

impl FilterFunction {
    /// `superpixel` is the tile size in filters (rows, cols); `filter_px` the
    /// side of one filter in sensor pixels.
    pub fn new(
        wavelengths_nm: Vec<f64>,
        data: Array3<f64>,
        superpixel: (usize, usize),
        filter_px: usize,
    ) -> Result<Self> {
        let (k, ny, nx) = data.dim();
        if k == 0 || ny == 0 || nx == 0 {
            return Err(Error::shape(format!("empty filter function {k}x{ny}x{nx}")));
        }
        if wavelengths_nm.len() != k {
            return Err(Error::shape(format!(
                "{} wavelengths for {k} filter channels",
                wavelengths_nm.len()
            )));
        }
        check_wavelengths(&wavelengths_nm)?;
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param(format!("transmittance {v} outside [0, 1]")));
        }
        if superpixel.0 == 0 || superpixel.1 == 0 || filter_px == 0 {
            return Err(Error::param("filter tile geometry must be positive"));
        }
        Ok(FilterFunction { wavelengths_nm, data, superpixel, filter_px })
    }

    /// Reinterprets a transmittance cube (e.g. one loaded from disk) with the
    /// given tile geometry.
    pub fn from_cube(
        cube: HyperspectralCube,
        superpixel: (usize, usize),
        filter_px: usize,
    ) -> Result<Self> {
        let wl = cube.wavelengths_nm().to_vec();
        Self::new(wl, cube.into_data(), superpixel, filter_px)
    }

    pub fn to_cube(&self) -> HyperspectralCube {
        HyperspectralCube::from_parts_unchecked(self.wavelengths_nm.clone(), self.data.clone())
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

    pub fn sensor_shape(&self) -> (usize, usize) {
        (self.ny(), self.nx())
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        &self.wavelengths_nm
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn superpixel(&self) -> (usize, usize) {
        self.superpixel
    }

    pub fn filter_px(&self) -> usize {
        self.filter_px
    }

    /// Lateral super-pixel width in sensor pixels.
    pub fn superpixel_px(&self) -> usize {
        self.superpixel.1 * self.filter_px
    }
}
