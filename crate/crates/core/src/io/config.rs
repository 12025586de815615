use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cube::HyperspectralCube;
use crate::error::{Error, FormatError, Result};
use crate::model::SystemModel;
use crate::priors::TvWeights;
use crate::psf::Psf;
use crate::simkit::{
    generate_filter_function, generate_psf, make_point_scene, make_resolution_target, BarGroup,
    FilterArraySpec, PsfKind, ScenePoint,
};
use crate::solver::SolverConfig;

/// PSF generator parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsfParams {
    pub kind: PsfKind,
    pub seed: u64,
    pub feature_px: f64,
    /// Spot size of the low-NA lens. `None` uses the filter super-pixel.
    pub superpixel_px: Option<usize>,
}

impl Default for PsfParams {
    fn default() -> Self {
        PsfParams { kind: PsfKind::Diffuser, seed: 1, feature_px: 1.5, superpixel_px: None }
    }
}

/// JSON run configuration. Every key is optional; unknown keys are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub tau1: f64,
    pub tau2: f64,
    /// `[wx, wy, wl]`
    pub tv_weights: [f64; 3],
    pub max_iters: usize,
    pub step: Option<f64>,
    pub convergence_tol: f64,
    pub filter: FilterArraySpec,
    pub psf: PsfParams,
    pub noise_variance: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        let w = solver.tv_weights;
        RunConfig {
            tau1: solver.tau1,
            tau2: solver.tau2,
            tv_weights: [w.wx, w.wy, w.wl],
            max_iters: solver.max_iters,
            step: solver.step,
            convergence_tol: solver.convergence_tol,
            filter: FilterArraySpec::default(),
            psf: PsfParams::default(),
            noise_variance: 1e-5,
            seed: 0,
        }
    }
}

pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_run_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    parse_run_config(&std::fs::read_to_string(path)?)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver_config().validate()?;
        self.filter.validate()?;
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(Error::param("noise_variance must be finite and >= 0"));
        }
        if self.psf.superpixel_px == Some(0) {
            return Err(Error::param("psf.superpixel_px must be positive"));
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        let [wx, wy, wl] = self.tv_weights;
        SolverConfig {
            tau1: self.tau1,
            tau2: self.tau2,
            tv_weights: TvWeights { wx, wy, wl },
            max_iters: self.max_iters,
            step: self.step,
            convergence_tol: self.convergence_tol,
            ..SolverConfig::default()
        }
    }

    pub fn lens_superpixel_px(&self) -> usize {
        self.psf.superpixel_px.unwrap_or_else(|| self.filter.superpixel_px())
    }

    pub fn generate_psf(&self, kind: PsfKind, shape: (usize, usize)) -> Result<Psf> {
        generate_psf(kind, shape, self.psf.seed, self.psf.feature_px, self.lens_superpixel_px())
    }

    /// Simulated camera with PSF and scene grid equal to `sensor_shape`.
    pub fn build_model(&self, kind: PsfKind, sensor_shape: (usize, usize)) -> Result<SystemModel> {
        let psf = self.generate_psf(kind, sensor_shape)?;
        let wl = self.filter.channel_centers();
        let filter = generate_filter_function(sensor_shape, &self.filter, &wl)?;
        SystemModel::new(psf, filter, sensor_shape)
    }
}

/// JSON description of a synthetic scene. Channel wavelengths are spaced
/// like filter centers over `[lambda_min_nm, lambda_max_nm]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub ny: usize,
    pub nx: usize,
    pub n_lambda: usize,
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    #[serde(default)]
    pub points: Vec<ScenePoint>,
    #[serde(default)]
    pub groups: Vec<BarGroup>,
}

pub fn parse_scene_spec(text: &str) -> Result<SceneSpec> {
    let spec: SceneSpec =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    spec.wavelengths()?;
    Ok(spec)
}

pub fn read_scene_spec(path: impl AsRef<Path>) -> Result<SceneSpec> {
    parse_scene_spec(&std::fs::read_to_string(path)?)
}

impl SceneSpec {
    pub fn wavelengths(&self) -> Result<Vec<f64>> {
        if self.n_lambda == 0 || self.ny == 0 || self.nx == 0 {
            return Err(Error::param("scene dimensions must be positive"));
        }
        let spec = FilterArraySpec {
            grid: (1, self.n_lambda),
            lambda_min_nm: self.lambda_min_nm,
            lambda_max_nm: self.lambda_max_nm,
            ..FilterArraySpec::default()
        };
        spec.validate()?;
        Ok(spec.channel_centers())
    }

    pub fn point_scene(&self) -> Result<HyperspectralCube> {
        make_point_scene(self.wavelengths()?, (self.ny, self.nx), &self.points)
    }

    pub fn resolution_target(&self) -> Result<HyperspectralCube> {
        make_resolution_target(self.wavelengths()?, (self.ny, self.nx), &self.groups)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_all_defaults() {
        assert_eq!(parse_run_config("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn full_document() {
        let text = r#"{
            "tau1": 0.01, "tau2": 0.002, "tv_weights": [1, 1, 0.5], "max_iters": 20,
            "step": null, "convergence_tol": 1e-6,
            "filter": {"grid": [2, 2], "filter_px": 1, "lambda_min_nm": 400,
                       "lambda_max_nm": 700, "bandwidth_nm": 20, "peak_transmittance": 0.9},
            "psf": {"kind": "low-na", "seed": 7, "feature_px": 2.0, "superpixel_px": 4},
            "noise_variance": 0.0, "seed": 3
        }"#;
        let c = parse_run_config(text).unwrap();
        assert_eq!(c.filter.grid, (2, 2));
        assert_eq!(c.psf.kind, PsfKind::LowNa);
        assert_eq!(c.solver_config().tv_weights.wl, 0.5);
        assert_eq!(c.lens_superpixel_px(), 4);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [r#"{"tau3": 1}"#, r#"{"filter": {"grid": [2, 2], "rows": 2}}"#, r#"{"psf": {"sigma": 1}}"#] {
            assert_eq!(parse_run_config(text).unwrap_err().code(), "invalid_json", "{text}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert_eq!(parse_run_config(r#"{"tau1": -1}"#).unwrap_err().code(), "invalid_parameter");
        assert_eq!(parse_run_config(r#"{"noise_variance": -1}"#).unwrap_err().code(), "invalid_parameter");
    }

    #[test]
    fn scene_spec() {
        let text = r#"{"ny": 8, "nx": 8, "n_lambda": 3, "lambda_min_nm": 400, "lambda_max_nm": 600,
                       "points": [{"x": 1, "y": 2, "channel": 2, "amplitude": 0.5}]}"#;
        let s = parse_scene_spec(text).unwrap();
        assert_eq!(s.wavelengths().unwrap(), vec![400.0, 500.0, 600.0]);
        let c = s.point_scene().unwrap();
        assert_eq!(c.data()[[2, 2, 1]], 0.5);
        assert_eq!(c.data().sum(), 0.5);
        assert!(parse_scene_spec(r#"{"ny": 8}"#).is_err());
    }
}
