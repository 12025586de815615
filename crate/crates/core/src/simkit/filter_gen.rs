use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::FilterFunction;

pub const MAX_CHANNELS: usize = 4096;

/// Geometry and passbands of a repeating spectral filter mosaic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterArraySpec {
    /// Filters per super-pixel, (rows, cols). Channel count is their product.
    pub grid: (usize, usize),
    /// Side of one filter in sensor pixels.
    pub filter_px: usize,
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    /// FWHM of each Gaussian passband.
    pub bandwidth_nm: f64,
    pub peak_transmittance: f64,
}

impl Default for FilterArraySpec {
    fn default() -> Self {
        FilterArraySpec {
            grid: (4, 4),
            filter_px: 2,
            lambda_min_nm: 386.0,
            lambda_max_nm: 898.0,
            bandwidth_nm: 12.0,
            peak_transmittance: 1.0,
        }
    }
}

impl FilterArraySpec {
    pub fn n_channels(&self) -> usize {
        self.grid.0 * self.grid.1
    }

    pub fn superpixel_px(&self) -> usize {
        self.grid.1 * self.filter_px
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.0 == 0 || self.grid.1 == 0 || self.filter_px == 0 {
            return Err(Error::param("filter grid and filter_px must be positive"));
        }
        match self.grid.0.checked_mul(self.grid.1) {
            Some(k) if k <= MAX_CHANNELS => {}
            _ => return Err(Error::param(format!("filter grid has more than {MAX_CHANNELS} channels"))),
        }
        if self.grid.0.max(self.grid.1).checked_mul(self.filter_px).is_none() {
            return Err(Error::param("super-pixel size overflows"));
        }
        if !self.lambda_min_nm.is_finite() || !self.lambda_max_nm.is_finite() {
            return Err(Error::param("wavelength range must be finite"));
        }
        if !(self.lambda_min_nm < self.lambda_max_nm) {
            return Err(Error::param("lambda_min_nm must be below lambda_max_nm"));
        }
        if !(self.bandwidth_nm > 0.0) || !self.bandwidth_nm.is_finite() {
            return Err(Error::param("bandwidth_nm must be positive"));
        }
        if !(self.peak_transmittance > 0.0 && self.peak_transmittance <= 1.0) {
            return Err(Error::param("peak_transmittance must be in (0, 1]"));
        }
        Ok(())
    }

    /// Passband centers, evenly spaced from `lambda_min_nm` to
    /// `lambda_max_nm`. A single filter sits at the midpoint.
    pub fn channel_centers(&self) -> Vec<f64> {
        let k = self.n_channels();
        if k == 1 {
            return vec![0.5 * (self.lambda_min_nm + self.lambda_max_nm)];
        }
        let span = self.lambda_max_nm - self.lambda_min_nm;
        (0..k)
            .map(|i| self.lambda_min_nm + span * i as f64 / (k - 1) as f64)
            .collect()
    }

    /// Index of the filter covering sensor pixel `(y, x)`, in raster order
    /// within the tile.
    pub fn filter_index(&self, y: usize, x: usize) -> usize {
        let r = (y / self.filter_px) % self.grid.0;
        let c = (x / self.filter_px) % self.grid.1;
        r * self.grid.1 + c
    }
}

/// Samples each filter's Gaussian passband at `wavelengths_nm`.
pub fn generate_filter_function(
    sensor_shape: (usize, usize),
    spec: &FilterArraySpec,
    wavelengths_nm: &[f64],
) -> Result<FilterFunction> {
    spec.validate()?;
    let k = spec.n_channels();
    if wavelengths_nm.len() != k {
        return Err(Error::shape(format!(
            "{} wavelengths for a {}x{} filter grid",
            wavelengths_nm.len(),
            spec.grid.0,
            spec.grid.1
        )));
    }
    let centers = spec.channel_centers();
    let inv_bw2 = 1.0 / (spec.bandwidth_nm * spec.bandwidth_nm);
    let (ny, nx) = sensor_shape;
    let data = Array3::from_shape_fn((k, ny, nx), |(c, y, x)| {
        let d = wavelengths_nm[c] - centers[spec.filter_index(y, x)];
        spec.peak_transmittance * (-4.0 * std::f64::consts::LN_2 * d * d * inv_bw2).exp()
    });
    FilterFunction::new(wavelengths_nm.to_vec(), data, spec.grid, spec.filter_px)
}
