use ndarray::Array2;

use crate::error::{Error, Result};

/// On-axis point spread function `h[y][x]`, shared by every wavelength.
///
/// [`Psf::new`] rescales the kernel to unit sum so the overall gain of the
/// forward model is fixed by the filter transmittance alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    data: Array2<f64>,
}

impl Psf {
    /// Validates and unit-sum normalizes `data`.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let psf = Self::new_unnormalized(data)?;
        let total: f64 = psf.data.sum();
        if total <= 0.0 {
            return Err(Error::param("psf has zero total energy"));
        }
        Ok(Psf { data: psf.data / total })
    }

    /// Validates `data` without rescaling it.
    pub fn new_unnormalized(data: Array2<f64>) -> Result<Self> {
        let (ny, nx) = data.dim();
        if ny == 0 || nx == 0 {
            return Err(Error::shape(format!("empty psf {ny}x{nx}")));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("psf".into()));
        }
        if data.iter().any(|&v| v < 0.0) {
            return Err(Error::param("psf has negative entries"));
        }
        Ok(Psf { data })
    }

    /// Returns `factor * self` without renormalizing.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new_unnormalized(&self.data * factor)
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

    /// Index treated as the optical axis: `((ny - 1) / 2, (nx - 1) / 2)`.
    ///
    /// With a scene the size of the sensor, an impulse here maps each scene
    /// pixel onto the same sensor pixel under the centered crop.
    pub fn center(&self) -> (usize, usize) {
        center_of(self.shape())
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }
}

pub(crate) fn center_of((ny, nx): (usize, usize)) -> (usize, usize) {
    ((ny.saturating_sub(1)) / 2, (nx.saturating_sub(1)) / 2)
}
