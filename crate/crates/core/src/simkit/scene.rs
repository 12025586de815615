use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::cube::HyperspectralCube;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenePoint {
    pub x: usize,
    pub y: usize,
    pub channel: usize,
    pub amplitude: f64,
}

/// A USAF-style group: three vertical bars of width `bar_width_px` separated
/// by equal gaps, `5·w` tall, with its top-left corner at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarGroup {
    pub x: usize,
    pub y: usize,
    pub bar_width_px: usize,
    /// `None` lights the group in every channel (broadband source).
    #[serde(default)]
    pub channel: Option<usize>,
    #[serde(default = "unit_amplitude")]
    pub amplitude: f64,
}

fn unit_amplitude() -> f64 {
    1.0
}

impl BarGroup {
    /// Side of the square footprint.
    pub fn extent(&self) -> usize {
        5 * self.bar_width_px
    }

    /// Column of the center of bar `i` (0..3), as a fractional pixel.
    pub fn bar_center_x(&self, i: usize) -> f64 {
        let w = self.bar_width_px as f64;
        self.x as f64 + 2.0 * w * i as f64 + 0.5 * (w - 1.0)
    }

    fn is_bar_column(&self, x: usize) -> bool {
        x >= self.x && x < self.x + self.extent() && ((x - self.x) / self.bar_width_px) % 2 == 0
    }

    fn overlaps(&self, other: &BarGroup) -> bool {
        let a = (self.x, self.y, self.extent());
        let b = (other.x, other.y, other.extent());
        a.0 < b.0 + b.2 && b.0 < a.0 + a.2 && a.1 < b.1 + b.2 && b.1 < a.1 + a.2
    }
}

/// Zero cube plus the listed impulses (coincident points add).
pub fn make_point_scene(
    wavelengths_nm: Vec<f64>,
    shape: (usize, usize),
    points: &[ScenePoint],
) -> Result<HyperspectralCube> {
    let mut cube = HyperspectralCube::zeros(wavelengths_nm, shape.0, shape.1)?;
    let k = cube.n_lambda();
    for p in points {
        if p.x >= shape.1 || p.y >= shape.0 || p.channel >= k {
            return Err(Error::param(format!(
                "point ({}, {}, ch {}) outside {}x{}x{k}",
                p.x, p.y, p.channel, shape.0, shape.1
            )));
        }
        if !(p.amplitude > 0.0) || !p.amplitude.is_finite() {
            return Err(Error::param(format!("point amplitude {} must be positive", p.amplitude)));
        }
        cube.data_mut()[[p.channel, p.y, p.x]] += p.amplitude;
    }
    Ok(cube)
}

pub fn make_resolution_target(
    wavelengths_nm: Vec<f64>,
    shape: (usize, usize),
    groups: &[BarGroup],
) -> Result<HyperspectralCube> {
    let k = wavelengths_nm.len();
    for (i, g) in groups.iter().enumerate() {
        if g.bar_width_px == 0 {
            return Err(Error::param("bar width must be positive"));
        }
        if g.x + g.extent() > shape.1 || g.y + g.extent() > shape.0 {
            return Err(Error::param(format!("bar group {i} exceeds the scene")));
        }
        if matches!(g.channel, Some(c) if c >= k) {
            return Err(Error::param(format!("bar group {i} channel out of range")));
        }
        if !(g.amplitude > 0.0) || !g.amplitude.is_finite() {
            return Err(Error::param(format!("bar group {i} amplitude must be positive")));
        }
        if let Some(j) = groups[..i].iter().position(|o| o.overlaps(g)) {
            return Err(Error::param(format!("bar groups {j} and {i} overlap")));
        }
    }

    let mut data = Array3::zeros((k, shape.0, shape.1));
    for g in groups {
        let channels = match g.channel {
            Some(c) => c..c + 1,
            None => 0..k,
        };
        for c in channels {
            for y in g.y..g.y + g.extent() {
                for x in (g.x..g.x + g.extent()).filter(|&x| g.is_bar_column(x)) {
                    data[[c, y, x]] = g.amplitude;
                }
            }
        }
    }
    HyperspectralCube::new(wavelengths_nm, data)
}
