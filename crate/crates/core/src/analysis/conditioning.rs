use std::collections::HashSet;

use nalgebra::DMatrix;
use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Condition numbers under this are reported as well conditioned.
pub const GOOD_CONDITION: f64 = 40.0;

/// One scene voxel: `(x, y, channel)`.
pub type Voxel = (usize, usize, usize);

/// `σ_max / σ_min` of the columns of `A` belonging to `support`, each built
/// by applying the forward model to a unit impulse. Returns `+∞` when the
/// sub-matrix is numerically rank deficient.
pub fn local_condition_number(model: &SystemModel, support: &[Voxel]) -> Result<f64> {
    let cols = support_columns(model, support)?;
    let sv = cols.singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min <= RANK_TOLERANCE * max {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// The sub-matrix `A_S` itself (sensor pixels × support voxels).
pub fn support_columns(model: &SystemModel, support: &[Voxel]) -> Result<DMatrix<f64>> {
    if support.is_empty() {
        return Err(Error::param("support is empty"));
    }
    let (ny, nx) = model.scene_shape();
    let k = model.n_lambda();
    let mut seen = HashSet::new();
    for &(x, y, c) in support {
        if x >= nx || y >= ny || c >= k {
            return Err(Error::param(format!("voxel ({x}, {y}, {c}) outside the scene")));
        }
        if !seen.insert((x, y, c)) {
            return Err(Error::param(format!("duplicate voxel ({x}, {y}, {c})")));
        }
    }
    let (sy, sx) = model.sensor_shape();
    let mut m = DMatrix::zeros(sy * sx, support.len());
    let mut impulse = Array3::zeros((k, ny, nx));
    for (j, &(x, y, c)) in support.iter().enumerate() {
        impulse[[c, y, x]] = 1.0;
        let col = model.forward_array(&impulse);
        impulse[[c, y, x]] = 0.0;
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Square lattice in one spectral channel.
    Spatial2d,
    /// Cubic lattice whose third axis steps through adjacent channels.
    Spectral3d,
}

impl std::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spatial_2d" | "spatial-2d" | "2d" => Ok(SweepMode::Spatial2d),
            "spectral_3d" | "spectral-3d" | "3d" => Ok(SweepMode::Spectral3d),
            other => Err(Error::param(format!("unknown sweep mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondSweepRow {
    pub num_points: usize,
    pub separation_px: f64,
    pub separation_superpx: f64,
    /// `None` marks a lattice that did not fit in the scene.
    pub condition_number: Option<f64>,
}

/// The first `n` sites of a centered lattice with pitch `d`, or `None` if it
/// leaves the scene. In 2D all points share the middle channel; in 3D the
/// spectral axis of the lattice runs fastest, over consecutive channels
/// around the middle one.
pub fn lattice_support(
    scene_shape: (usize, usize),
    n_lambda: usize,
    n: usize,
    d: usize,
    mode: SweepMode,
) -> Option<Vec<Voxel>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let side = match mode {
        SweepMode::Spatial2d => (1..).find(|s| s * s >= n)?,
        SweepMode::Spectral3d => (1..).find(|s| s * s * s >= n)?,
    };
    let span = (side - 1) * d;
    let (ny, nx) = scene_shape;
    let x0 = (nx / 2).checked_sub(span / 2)?;
    let y0 = (ny / 2).checked_sub(span / 2)?;
    let layers = match mode {
        SweepMode::Spatial2d => 1,
        SweepMode::Spectral3d => side.min(n),
    };
    let c0 = (n_lambda / 2).checked_sub((layers - 1) / 2)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (layer, rem) = match mode {
            SweepMode::Spatial2d => (0, i),
            SweepMode::Spectral3d => (i % side, i / side),
        };
        let (row, col) = (rem / side, rem % side);
        let (x, y, c) = (x0 + col * d, y0 + row * d, c0 + layer);
        if x >= nx || y >= ny || c >= n_lambda {
            return None;
        }
        out.push((x, y, c));
    }
    Some(out)
}

/// Local condition numbers for `1..=max_points` points at each separation.
pub fn condition_sweep(
    model: &SystemModel,
    max_points: usize,
    separations_px: &[usize],
    mode: SweepMode,
) -> Result<Vec<CondSweepRow>> {
    if separations_px.iter().any(|&d| d < 1) {
        return Err(Error::param("separations must be at least 1 px"));
    }
    let superpixel = model.filter().superpixel_px() as f64;
    let mut rows = Vec::new();
    for n in 1..=max_points {
        for &d in separations_px {
            let condition_number =
                match lattice_support(model.scene_shape(), model.n_lambda(), n, d, mode) {
                    Some(support) => Some(local_condition_number(model, &support)?),
                    None => None,
                };
            rows.push(CondSweepRow {
                num_points: n,
                separation_px: d as f64,
                separation_superpx: d as f64 / superpixel,
                condition_number,
            });
        }
    }
    Ok(rows)
}
