//! FISTA for
//! `min_{v ≥ 0} ½‖b − Av‖² + τ₁·TV_w(v) + τ₂·‖v‖_*`.
//!
//! The non-smooth part is handled by applying the TV prox, the nuclear prox,
//! and the non-negativity projection one after another on each iterate.

use ndarray::{Array2, Array3, Zip};
use serde::{Deserialize, Serialize};

use crate::cube::{HyperspectralCube, Measurement};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::priors::{
    nuclear_value_array, prox_nuclear_array, prox_tv3d_array, tv3d_value_array, TvWeights,
};

/// Iterations compared by the relative-change stopping rule.
pub const CONVERGENCE_WINDOW: usize = 5;
/// Step = `STEP_SAFETY / L` when no explicit step is configured.
pub const STEP_SAFETY: f64 = 0.9;

const NORM_ITERS: usize = 500;
const NORM_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tau1: f64,
    pub tau2: f64,
    pub tv_weights: TvWeights,
    pub max_iters: usize,
    /// Gradient step; `None` means `0.9 / L` with `L` from power iteration.
    pub step: Option<f64>,
    /// Relative objective change over [`CONVERGENCE_WINDOW`] iterations that
    /// ends the solve. Zero disables early stopping.
    pub convergence_tol: f64,
    /// Record the objective every `log_every` iterations (and on the last).
    pub log_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tau1: 1e-3,
            tau2: 0.0,
            tv_weights: TvWeights::default(),
            max_iters: 500,
            step: None,
            convergence_tol: 0.0,
            log_every: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau1 >= 0.0) || !(self.tau2 >= 0.0) || !self.tau1.is_finite() || !self.tau2.is_finite() {
            return Err(Error::param("tau1 and tau2 must be finite and >= 0"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if let Some(step) = self.step {
            if !(step > 0.0) || !step.is_finite() {
                return Err(Error::param(format!("step {step} must be positive")));
            }
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(Error::param("convergence_tol must be >= 0"));
        }
        if self.log_every == 0 {
            return Err(Error::param("log_every must be at least 1"));
        }
        self.tv_weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveDiagnostics {
    pub objective_history: Vec<f64>,
    pub data_fidelity_history: Vec<f64>,
    /// Iteration number (1-based) of each history entry.
    pub logged_iterations: Vec<usize>,
    pub iterations_run: usize,
    pub final_step: f64,
}

/// `½‖b − Av‖² + τ₁·TV_w(v) + τ₂·‖v‖_*`.
pub fn objective(
    model: &SystemModel,
    b: &Measurement,
    v: &HyperspectralCube,
    cfg: &SolverConfig,
) -> Result<f64> {
    model.check_cube(v)?;
    model.check_measurement(b)?;
    Ok(Terms::evaluate(model, b.data(), v.data(), cfg).total())
}

/// Gradient `Aᵀ(Av − b)` of the data term `½‖b − Av‖²`.
pub fn data_gradient(
    model: &SystemModel,
    b: &Measurement,
    v: &HyperspectralCube,
) -> Result<HyperspectralCube> {
    model.check_cube(v)?;
    model.check_measurement(b)?;
    let residual = model.forward_array(v.data()) - b.data();
    Ok(HyperspectralCube::with_data_of(v, model.adjoint_array(residual.view())))
}

struct Terms {
    fidelity: f64,
    tv: f64,
    nuclear: f64,
}

impl Terms {
    fn evaluate(model: &SystemModel, b: &Array2<f64>, v: &Array3<f64>, cfg: &SolverConfig) -> Self {
        let residual = model.forward_array(v) - b;
        let fidelity = 0.5 * residual.iter().map(|r| r * r).sum::<f64>();
        let tv = if cfg.tau1 > 0.0 { cfg.tau1 * tv3d_value_array(v, &cfg.tv_weights) } else { 0.0 };
        let nuclear = if cfg.tau2 > 0.0 { cfg.tau2 * nuclear_value_array(v) } else { 0.0 };
        Terms { fidelity, tv, nuclear }
    }

    fn total(&self) -> f64 {
        self.fidelity + self.tv + self.nuclear
    }
}

/// Runs FISTA from `v₀ = 0`.
pub fn fista_reconstruct(
    model: &SystemModel,
    b: &Measurement,
    cfg: &SolverConfig,
) -> Result<(HyperspectralCube, SolveDiagnostics)> {
    cfg.validate()?;
    model.check_measurement(b)?;
    let step = match cfg.step {
        Some(step) => step,
        None => {
            let lipschitz = model.operator_norm(NORM_ITERS, NORM_TOL)?;
            if !(lipschitz > 0.0) {
                return Err(Error::Numerical("forward operator is identically zero".into()));
            }
            STEP_SAFETY / lipschitz
        }
    };

    let b = b.data();
    let mut x_prev = model.zero_cube().into_data();
    let mut y = x_prev.clone();
    let mut t = 1.0_f64;
    let mut diag = SolveDiagnostics { final_step: step, ..Default::default() };
    let mut recent: Vec<f64> = Vec::new();

    for iter in 1..=cfg.max_iters {
        let residual = model.forward_array(&y) - b;
        let grad = model.adjoint_array(residual.view());
        let mut x = y.clone();
        x.scaled_add(-step, &grad);
        if cfg.tau1 > 0.0 {
            x = prox_tv3d_array(&x, &cfg.tv_weights, cfg.tau1 * step);
        }
        if cfg.tau2 > 0.0 {
            x = prox_nuclear_array(&x, cfg.tau2 * step)
                .map_err(|e| Error::Numerical(format!("iteration {iter}: {e}")))?;
        }
        x.mapv_inplace(|v| v.max(0.0));

        if let Some(bad) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite iterate at iteration {iter} (flat index {bad}, step {step:e})"
            )));
        }

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        Zip::from(&mut y).and(&x).and(&x_prev).for_each(|y, &xn, &xp| {
            *y = xn + momentum * (xn - xp);
        });
        t = t_next;
        x_prev = x;
        diag.iterations_run = iter;

        let log_now = iter % cfg.log_every == 0 || iter == cfg.max_iters;
        let need_objective = log_now || cfg.convergence_tol > 0.0;
        if !need_objective {
            continue;
        }
        let terms = Terms::evaluate(model, b, &x_prev, cfg);
        let total = terms.total();
        if !total.is_finite() {
            return Err(Error::Numerical(format!("objective non-finite at iteration {iter}")));
        }

        let mut converged = false;
        if cfg.convergence_tol > 0.0 {
            recent.push(total);
            if recent.len() > CONVERGENCE_WINDOW {
                let old = recent.remove(0);
                let change = (total - old).abs() / old.abs().max(f64::MIN_POSITIVE);
                converged = change < cfg.convergence_tol;
            }
        }
        if log_now || converged {
            diag.objective_history.push(total);
            diag.data_fidelity_history.push(terms.fidelity);
            diag.logged_iterations.push(iter);
        }
        if converged {
            break;
        }
    }

    Ok((HyperspectralCube::with_data_of(&model.zero_cube(), x_prev), diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::FilterFunction;
    use crate::psf::Psf;

    fn identity_model(n: usize, k: usize) -> SystemModel {
        let mut d = Array2::zeros((1, 1));
        d[[0, 0]] = 1.0;
        let wl = (0..k).map(|i| 500.0 + i as f64).collect();
        let f = FilterFunction::new(wl, Array3::ones((k, n, n)), (1, 1), 1).unwrap();
        SystemModel::new(Psf::new(d).unwrap(), f, (n, n)).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_cube() {
        let model = identity_model(4, 2);
        let b = Measurement::zeros(4, 4).unwrap();
        let cfg = SolverConfig { tau1: 0.1, tau2: 0.1, max_iters: 20, log_every: 1, ..Default::default() };
        let (v, diag) = fista_reconstruct(&model, &b, &cfg).unwrap();
        assert!(v.data().iter().all(|&x| x == 0.0));
        assert_eq!(diag.objective_history.len(), 20);
        assert!(diag.objective_history.iter().all(|&o| o >= 0.0));
        assert_eq!(*diag.objective_history.last().unwrap(), 0.0);
    }

    #[test]
    fn objective_of_zero_cube() {
        let model = identity_model(3, 1);
        let b = Measurement::new(Array2::from_shape_fn((3, 3), |(y, x)| (y + 2 * x) as f64)).unwrap();
        let cfg = SolverConfig::default();
        let z = model.zero_cube();
        let expect = 0.5 * b.data().iter().map(|v| v * v).sum::<f64>();
        assert_eq!(objective(&model, &b, &z, &cfg).unwrap(), expect);
        let zb = Measurement::zeros(3, 3).unwrap();
        assert_eq!(objective(&model, &zb, &z, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn invalid_configs() {
        let model = identity_model(3, 1);
        let b = Measurement::zeros(3, 3).unwrap();
        for cfg in [
            SolverConfig { step: Some(0.0), ..Default::default() },
            SolverConfig { step: Some(-1.0), ..Default::default() },
            SolverConfig { max_iters: 0, ..Default::default() },
            SolverConfig { tau1: -1.0, ..Default::default() },
            SolverConfig { log_every: 0, ..Default::default() },
        ] {
            assert!(matches!(
                fista_reconstruct(&model, &b, &cfg),
                Err(Error::InvalidParameter(_))
            ));
        }
        let wrong = Measurement::zeros(2, 3).unwrap();
        assert!(matches!(
            fista_reconstruct(&model, &wrong, &SolverConfig::default()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn divergent_step_is_caught() {
        let model = identity_model(3, 1);
        let b = Measurement::new(Array2::from_elem((3, 3), 1.0)).unwrap();
        let cfg = SolverConfig { tau1: 0.0, step: Some(1e200), max_iters: 50, ..Default::default() };
        assert!(matches!(fista_reconstruct(&model, &b, &cfg), Err(Error::Numerical(_))));
    }

    #[test]
    fn early_stop_on_flat_objective() {
        let model = identity_model(3, 1);
        // negative pixels keep the optimal objective away from zero
        let b = Measurement::new(Array2::from_shape_fn((3, 3), |(y, _)| y as f64 - 1.0)).unwrap();
        let cfg = SolverConfig {
            tau1: 0.0,
            max_iters: 10_000,
            convergence_tol: 1e-12,
            log_every: 1000,
            ..Default::default()
        };
        let (_, diag) = fista_reconstruct(&model, &b, &cfg).unwrap();
        assert!(diag.iterations_run < 10_000);
        assert_eq!(diag.logged_iterations.last(), Some(&diag.iterations_run));
    }
}
