use ndarray::{Array3, ArrayView1, ArrayViewMut1, Axis, Zip};
use serde::{Deserialize, Serialize};

use crate::cube::HyperspectralCube;
use crate::error::{Error, Result};

/// Per-axis weights of the anisotropic 3D total variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvWeights {
    pub wx: f64,
    pub wy: f64,
    pub wl: f64,
}

impl Default for TvWeights {
    fn default() -> Self {
        TvWeights { wx: 1.0, wy: 1.0, wl: 1.0 }
    }
}

impl TvWeights {
    pub fn new(wx: f64, wy: f64, wl: f64) -> Result<Self> {
        let w = TvWeights { wx, wy, wl };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.wx, self.wy, self.wl]
            .iter()
            .any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(Error::param("tv weights must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.wx == 0.0 && self.wy == 0.0 && self.wl == 0.0
    }

    /// Weights paired with the array axis they act on (`[λ][y][x]` layout).
    fn by_axis(&self) -> [(Axis, f64); 3] {
        [(Axis(2), self.wx), (Axis(1), self.wy), (Axis(0), self.wl)]
    }
}

/// Number of parallel components: two pair offsets for each of three axes.
const COMPONENTS: f64 = 6.0;

/// `Σ wx|∇x v| + wy|∇y v| + wl|∇λ v|` with forward differences; the last
/// index of each axis contributes no difference.
pub fn tv3d_value(v: &HyperspectralCube, w: &TvWeights) -> f64 {
    tv3d_value_array(v.data(), w)
}

pub(crate) fn tv3d_value_array(v: &Array3<f64>, w: &TvWeights) -> f64 {
    w.by_axis()
        .iter()
        .filter(|(_, weight)| *weight != 0.0)
        .map(|&(axis, weight)| {
            let total: f64 = v
                .lanes(axis)
                .into_iter()
                .map(|lane| lane.windows(2).into_iter().map(|p| (p[1] - p[0]).abs()).sum::<f64>())
                .sum();
            weight * total
        })
        .sum()
}

/// Approximate prox of `gamma · TV_w` by parallel proximal averaging.
///
/// The anisotropic TV splits into six pieces (three axes, pairs starting at
/// even or odd indices), each acting on disjoint pairs of samples. For each
/// piece the pair means are kept and the Haar details `(b − a)/√2` are
/// soft-thresholded by `6·gamma·w_axis`; the six results are averaged.
pub fn prox_tv3d(v: &HyperspectralCube, w: &TvWeights, gamma: f64) -> Result<HyperspectralCube> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::param(format!("tv prox threshold {gamma} must be >= 0")));
    }
    w.validate()?;
    Ok(HyperspectralCube::with_data_of(v, prox_tv3d_array(v.data(), w, gamma)))
}

pub(crate) fn prox_tv3d_array(v: &Array3<f64>, w: &TvWeights, gamma: f64) -> Array3<f64> {
    let mut out = v.clone();
    for (axis, weight) in w.by_axis() {
        let threshold = COMPONENTS * gamma * weight;
        if threshold == 0.0 {
            continue;
        }
        Zip::from(out.lanes_mut(axis))
            .and(v.lanes(axis))
            .for_each(|o, src| shrink_pairs(o, src, threshold));
    }
    out
}

/// Adds `1/6` of each pair's correction, for both pair offsets.
fn shrink_pairs(mut out: ArrayViewMut1<'_, f64>, src: ArrayView1<'_, f64>, threshold: f64) {
    let n = src.len();
    // a Haar-detail threshold t shrinks the raw difference by √2·t
    let shrink = std::f64::consts::SQRT_2 * threshold;
    for start in 0..2 {
        let mut i = start;
        while i + 1 < n {
            let d = src[i + 1] - src[i];
            let kept = d.signum() * (d.abs() - shrink).max(0.0);
            let half = 0.5 * (d - kept) / COMPONENTS;
            out[i] += half;
            out[i + 1] -= half;
            i += 2;
        }
    }
}
