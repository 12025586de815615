mod common;

use std::time::Instant;

use common::*;
use lensless_hsi::priors::TvWeights;
use lensless_hsi::{
    data_gradient, fista_reconstruct, objective, FilterFunction, HyperspectralCube, Measurement,
    Psf, SolverConfig, SystemModel,
};
use nalgebra::DVector;
use ndarray::{Array2, Array3};

#[test]
fn unregularized_fista_reaches_nnls_optimum() {
    let (model, b, _) = overdetermined_instance(3);
    let a = dense_a(&model);
    let s = singular_values_eig(&a);
    let cond = s[0] / s[s.len() - 1];
    assert!(cond < 2e3, "instance condition number {cond}");

    let t = Instant::now();
    let x = nnls(&a, &flatten2(b.data()));
    assert!(x.iter().all(|&v| v >= 0.0));
    let r = &a * &x - flatten2(b.data());
    let oracle = 0.5 * r.norm_squared();
    let oracle_time = t.elapsed();

    let cfg = SolverConfig { tau1: 0.0, tau2: 0.0, max_iters: 3000, ..Default::default() };
    let (v, diag) = fista_reconstruct(&model, &b, &cfg).unwrap();
    let got = objective(&model, &b, &v, &cfg).unwrap();
    assert!(got >= oracle * (1.0 - 1e-9));
    assert!((got - oracle) / oracle <= 1e-4, "fista {got} vs nnls {oracle}, cond {cond:.1}, oracle {oracle_time:?}");
    assert_eq!(*diag.objective_history.last().unwrap(), got);
}

#[test]
fn gradient_matches_finite_differences() {
    let (model, b, _) = overdetermined_instance(4);
    let mut r = rng(11);
    let v = HyperspectralCube::new(wavelengths(2), random_array3(&mut r, (2, 16, 16))).unwrap();
    let grad = data_gradient(&model, &b, &v).unwrap();
    let cfg = SolverConfig { tau1: 0.0, tau2: 0.0, ..Default::default() };
    let f = |u: &HyperspectralCube| objective(&model, &b, u, &cfg).unwrap();
    let h = 1e-5;
    for trial in 0..8 {
        let dir = random_array3(&mut r, (2, 16, 16)).mapv(|x| x - 0.5);
        let shifted = |s: f64| {
            let mut u = v.clone();
            u.data_mut().scaled_add(s, &dir);
            u
        };
        let fd = (f(&shifted(h)) - f(&shifted(-h))) / (2.0 * h);
        let an: f64 = grad.data().iter().zip(&dir).map(|(g, d)| g * d).sum();
        assert!((fd - an).abs() <= 1e-5 * an.abs(), "trial {trial}: {fd} vs {an}");
    }
    // single coordinates
    for &(c, y, x) in &[(0, 0, 0), (1, 7, 9), (0, 15, 15)] {
        let mut plus = v.clone();
        plus.data_mut()[[c, y, x]] += h;
        let mut minus = v.clone();
        minus.data_mut()[[c, y, x]] -= h;
        let fd = (f(&plus) - f(&minus)) / (2.0 * h);
        let an = grad.data()[[c, y, x]];
        assert!((fd - an).abs() <= 1e-5 * an.abs().max(1e-3), "{fd} vs {an}");
    }
}

#[test]
fn gradient_is_adjoint_of_residual_dense() {
    let (model, b, _) = overdetermined_instance(5);
    let a = dense_a(&model);
    let mut r = rng(12);
    let v = HyperspectralCube::new(wavelengths(2), random_array3(&mut r, (2, 16, 16))).unwrap();
    let grad = data_gradient(&model, &b, &v).unwrap();
    let dense = a.transpose() * (&a * flatten3(v.data()) - flatten2(b.data()));
    assert!((flatten3(grad.data()) - dense).amax() < 1e-10);
}

#[test]
fn reconstruction_is_deterministic() {
    let (model, b, _) = overdetermined_instance(6);
    let cfg = SolverConfig { tau1: 1e-3, tau2: 1e-3, max_iters: 40, ..Default::default() };
    let (a, da) = fista_reconstruct(&model, &b, &cfg).unwrap();
    let (c, dc) = fista_reconstruct(&model, &b, &cfg).unwrap();
    assert_eq!(a, c);
    assert_eq!(da, dc);
}

#[test]
fn regularized_objective_decreases() {
    let (model, b, _) = overdetermined_instance(7);
    let cfg = SolverConfig {
        tau1: 1e-3,
        tau2: 1e-3,
        tv_weights: TvWeights { wx: 1.0, wy: 1.0, wl: 0.5 },
        max_iters: 300,
        log_every: 50,
        ..Default::default()
    };
    let (v, diag) = fista_reconstruct(&model, &b, &cfg).unwrap();
    assert!(v.is_nonnegative());
    let zero = objective(&model, &b, &model.zero_cube(), &cfg).unwrap();
    let h = &diag.objective_history;
    assert_eq!(diag.logged_iterations, vec![50, 100, 150, 200, 250, 300]);
    assert!(h[0] < zero);
    assert!(h.last().unwrap() <= &h[0]);
}

#[test]
fn exact_data_on_identity_model_is_recovered() {
    // delta PSF and unit filter: A = I, so the unregularized optimum is max(b, 0)
    let mut h = Array2::zeros((5, 5));
    h[[2, 2]] = 1.0;
    let filter = FilterFunction::new(vec![500.0], Array3::from_elem((1, 6, 6), 1.0), (1, 1), 1).unwrap();
    let model = SystemModel::new(Psf::new(h).unwrap(), filter, (6, 6)).unwrap();
    let b = Array2::from_shape_fn((6, 6), |(y, x)| y as f64 * 0.3 - x as f64 * 0.2);
    let cfg = SolverConfig { tau1: 0.0, max_iters: 200, ..Default::default() };
    let (v, _) = fista_reconstruct(&model, &Measurement::new(b.clone()).unwrap(), &cfg).unwrap();
    let expect = DVector::from_iterator(36, b.iter().map(|&x| x.max(0.0)));
    assert!((flatten3(v.data()) - expect).amax() < 1e-9);
}
