use ndarray::Axis;
use serde::Serialize;

use crate::cube::HyperspectralCube;
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::simkit::{make_point_scene, simulate_capture, BarGroup, ScenePoint};
use crate::solver::{fista_reconstruct, SolverConfig};

/// Two peaks count as resolved when the minimum between them is at most
/// this fraction of their mean height.
pub const RAYLEIGH_DIP: f64 = 0.735;

/// Dip-to-peak ratio between two peaks expected near `x1 < x2` in a 1D
/// profile, or `None` when no distinct pair of local maxima with a sample
/// between them exists within ±1 px of the expected positions.
pub fn rayleigh_dip(profile: &[f64], x1: usize, x2: usize) -> Option<f64> {
    if x2 <= x1 || x2 >= profile.len() {
        return None;
    }
    let p1 = local_peak_near(profile, x1)?;
    let p2 = local_peak_near(profile, x2)?;
    if p2 < p1 + 2 {
        return None;
    }
    let dip = profile[p1 + 1..p2].iter().copied().fold(f64::INFINITY, f64::min);
    Some(dip / (0.5 * (profile[p1] + profile[p2])))
}

fn local_peak_near(profile: &[f64], x: usize) -> Option<usize> {
    let lo = x.saturating_sub(1);
    let hi = (x + 1).min(profile.len() - 1);
    let p = (lo..=hi).fold(lo, |best, i| if profile[i] > profile[best] { i } else { best });
    let left_ok = p == 0 || profile[p] >= profile[p - 1];
    let right_ok = p + 1 == profile.len() || profile[p] >= profile[p + 1];
    (profile[p] > 0.0 && left_ok && right_ok).then_some(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointRow {
    pub separation_px: usize,
    pub resolved: bool,
    /// Dip-to-peak ratio when two peaks were found.
    pub dip_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointReport {
    pub channel: usize,
    pub rows: Vec<TwoPointRow>,
    pub smallest_resolved_px: Option<usize>,
}

/// Horizontal two-point positions for separation `d`, centered in the scene.
pub fn two_point_positions(scene_shape: (usize, usize), d: usize) -> Option<(usize, usize, usize)> {
    let (ny, nx) = scene_shape;
    let x1 = (nx / 2).checked_sub(d / 2)?;
    let x2 = x1 + d;
    (x2 < nx).then_some((ny / 2, x1, x2))
}

/// Simulates and reconstructs a pair of equal point sources in `channel`
/// at each separation, and applies [`rayleigh_dip`] to the reconstructed
/// row through both points.
pub fn two_point_test(
    model: &SystemModel,
    cfg: &SolverConfig,
    channel: usize,
    separations_px: &[usize],
    noise_var: f64,
    seed: u64,
) -> Result<TwoPointReport> {
    if channel >= model.n_lambda() {
        return Err(Error::param(format!("channel {channel} out of range")));
    }
    if separations_px.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("separations must be sorted ascending"));
    }
    let mut rows = Vec::with_capacity(separations_px.len());
    for &d in separations_px {
        let Some((y, x1, x2)) = two_point_positions(model.scene_shape(), d) else {
            return Err(Error::param(format!("separation {d} px does not fit the scene")));
        };
        if d == 0 {
            rows.push(TwoPointRow { separation_px: 0, resolved: false, dip_ratio: None });
            continue;
        }
        let points = [
            ScenePoint { x: x1, y, channel, amplitude: 1.0 },
            ScenePoint { x: x2, y, channel, amplitude: 1.0 },
        ];
        let scene = make_point_scene(model.wavelengths_nm().to_vec(), model.scene_shape(), &points)?;
        let capture = simulate_capture(model, &scene, noise_var, seed)?;
        let (recon, _) = fista_reconstruct(model, &capture.measurement, cfg)?;
        let profile: Vec<f64> = recon.data().index_axis(Axis(0), channel).row(y).to_vec();
        let dip_ratio = rayleigh_dip(&profile, x1, x2);
        let resolved = dip_ratio.is_some_and(|r| r <= RAYLEIGH_DIP);
        rows.push(TwoPointRow { separation_px: d, resolved, dip_ratio });
    }
    let smallest_resolved_px = rows.iter().find(|r| r.resolved).map(|r| r.separation_px);
    Ok(TwoPointReport { channel, rows, smallest_resolved_px })
}

/// Bar-to-gap contrast of a resolution-target group in `recon`.
///
/// The profile across the bars is averaged over the group's rows and summed
/// over its channel(s). Returns the dip ratio for each of the two gaps:
/// the gap minimum over the mean of the neighbouring bar maxima.
pub fn bar_group_dips(recon: &HyperspectralCube, group: &BarGroup) -> Result<[f64; 2]> {
    let w = group.bar_width_px;
    let (ny, nx) = (recon.ny(), recon.nx());
    if w == 0 || group.x + group.extent() > nx || group.y + group.extent() > ny {
        return Err(Error::param("bar group outside reconstruction"));
    }
    let channels = match group.channel {
        Some(c) if c < recon.n_lambda() => c..c + 1,
        Some(c) => return Err(Error::param(format!("bar group channel {c} out of range"))),
        None => 0..recon.n_lambda(),
    };
    let rows = group.y..group.y + group.extent();
    let profile: Vec<f64> = (group.x..group.x + group.extent())
        .map(|x| {
            let mut s = 0.0;
            for c in channels.clone() {
                for y in rows.clone() {
                    s += recon.data()[[c, y, x]];
                }
            }
            s / rows.len() as f64
        })
        .collect();

    let span_max = |a: usize| profile[a..a + w].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span_min = |a: usize| profile[a..a + w].iter().copied().fold(f64::INFINITY, f64::min);
    let bars = [span_max(0), span_max(2 * w), span_max(4 * w)];
    let mut dips = [0.0; 2];
    for (g, dip) in dips.iter_mut().enumerate() {
        let gap = span_min((2 * g + 1) * w);
        let mean_peak = 0.5 * (bars[g] + bars[g + 1]);
        *dip = if mean_peak > 0.0 { gap / mean_peak } else { f64::INFINITY };
    }
    Ok(dips)
}

pub fn bar_group_resolved(recon: &HyperspectralCube, group: &BarGroup) -> Result<bool> {
    Ok(bar_group_dips(recon, group)?.iter().all(|&d| d <= RAYLEIGH_DIP))
}

/// `10·log10(max(truth)² / MSE)` over the whole cube.
pub fn psnr(recon: &HyperspectralCube, truth: &HyperspectralCube) -> Result<f64> {
    if recon.data().dim() != truth.data().dim() {
        return Err(Error::shape("psnr inputs differ in shape"));
    }
    let peak = truth.data().iter().copied().fold(0.0, f64::max);
    let mse = recon
        .data()
        .iter()
        .zip(truth.data())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / truth.data().len() as f64;
    Ok(10.0 * (peak * peak / mse).log10())
}
