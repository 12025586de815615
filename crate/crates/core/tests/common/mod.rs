//! Reference implementations used as oracles. Everything here is written
//! from the definitions with plain loops and dense linear algebra.
#![allow(dead_code)]

use lensless_hsi::{FilterFunction, HyperspectralCube, Measurement, Psf, SystemModel};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::{Array1, Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_array2(rng: &mut ChaCha8Rng, shape: (usize, usize)) -> Array2<f64> {
    Array2::from_shape_fn(shape, |_| rng.random::<f64>())
}

pub fn random_array3(rng: &mut ChaCha8Rng, shape: (usize, usize, usize)) -> Array3<f64> {
    Array3::from_shape_fn(shape, |_| rng.random::<f64>())
}

pub fn wavelengths(k: usize) -> Vec<f64> {
    (0..k).map(|i| 400.0 + 10.0 * i as f64).collect()
}

/// Random model: positive PSF of `psf_shape`, filter values in [0, 1].
pub fn random_model(
    seed: u64,
    psf_shape: (usize, usize),
    sensor_shape: (usize, usize),
    scene_shape: (usize, usize),
    k: usize,
) -> SystemModel {
    let mut r = rng(seed);
    let psf = Psf::new(random_array2(&mut r, psf_shape)).unwrap();
    let f = random_array3(&mut r, (k, sensor_shape.0, sensor_shape.1));
    let filter = FilterFunction::new(wavelengths(k), f, (1, 1), 1).unwrap();
    SystemModel::new(psf, filter, scene_shape).unwrap()
}

pub fn random_cube(seed: u64, k: usize, shape: (usize, usize)) -> HyperspectralCube {
    let mut r = rng(seed);
    HyperspectralCube::new(wavelengths(k), random_array3(&mut r, (k, shape.0, shape.1))).unwrap()
}

/// Full linear convolution by direct summation.
pub fn direct_convolve_full(a: &Array2<f64>, h: &Array2<f64>) -> Array2<f64> {
    let (ay, ax) = a.dim();
    let (hy, hx) = h.dim();
    let mut out = Array2::zeros((ay + hy - 1, ax + hx - 1));
    for y in 0..ay {
        for x in 0..ax {
            for i in 0..hy {
                for j in 0..hx {
                    out[[y + i, x + j]] += a[[y, x]] * h[[i, j]];
                }
            }
        }
    }
    out
}

/// Explicit sensing matrix: rows are sensor pixels (row-major), columns are
/// voxels in `[λ][y][x]` order.
pub fn dense_a(model: &SystemModel) -> DMatrix<f64> {
    let h = model.psf().data();
    let f = model.filter().data();
    let (hy, hx) = h.dim();
    let (ny, nx) = model.scene_shape();
    let (sy, sx) = model.sensor_shape();
    let k = model.n_lambda();
    let oy = (ny + hy - 1 - sy) / 2;
    let ox = (nx + hx - 1 - sx) / 2;
    let mut a = DMatrix::zeros(sy * sx, k * ny * nx);
    for i in 0..sy {
        for j in 0..sx {
            for c in 0..k {
                for y in 0..ny {
                    for x in 0..nx {
                        let (py, px) = ((i + oy) as isize - y as isize, (j + ox) as isize - x as isize);
                        if py >= 0 && px >= 0 && (py as usize) < hy && (px as usize) < hx {
                            a[(i * sx + j, (c * ny + y) * nx + x)] =
                                f[[c, i, j]] * h[[py as usize, px as usize]];
                        }
                    }
                }
            }
        }
    }
    a
}

pub fn flatten3(v: &Array3<f64>) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().copied())
}

pub fn flatten2(v: &Array2<f64>) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().copied())
}

/// Singular values of `m` from the eigenvalues of `mᵀm`, descending.
pub fn singular_values_eig(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.transpose() * m);
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular-value soft thresholding through the eigenvectors of `mᵀm`.
pub fn svt_eig(m: &DMatrix<f64>, gamma: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.transpose() * m);
    let v = &eig.eigenvectors;
    let scale = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| {
            let s = l.max(0.0).sqrt();
            if s > gamma { (s - gamma) / s } else { 0.0 }
        }),
    );
    m * v * DMatrix::from_diagonal(&scale) * v.transpose()
}

/// Unfolds `[λ][y][x]` to a (pixels × channels) matrix.
pub fn unfold(v: &Array3<f64>) -> DMatrix<f64> {
    let (k, ny, nx) = v.dim();
    DMatrix::from_fn(ny * nx, k, |p, c| v[[c, p / nx, p % nx]])
}

pub fn tv1d(x: &[f64]) -> f64 {
    x.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// `½‖x − y‖² + λ·TV(x)`.
pub fn tv1d_prox_objective(x: &[f64], y: &[f64], lambda: f64) -> f64 {
    0.5 * x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() + lambda * tv1d(x)
}

/// Exact 1D TV prox by accelerated projected gradient on the dual
/// `min_{|p| ≤ λ} ½‖y − Dᵀp‖²`, run until the duality gap is below `tol`.
pub fn tv1d_prox_exact(y: &[f64], lambda: f64, tol: f64) -> Vec<f64> {
    let n = y.len();
    if n < 2 || lambda == 0.0 {
        return y.to_vec();
    }
    let primal = |p: &[f64]| -> Vec<f64> {
        // x = y − Dᵀp with (Dx)_i = x_{i+1} − x_i
        let mut x = y.to_vec();
        for (i, &pi) in p.iter().enumerate() {
            x[i] += pi;
            x[i + 1] -= pi;
        }
        x
    };
    let dual_value = |p: &[f64]| -> f64 {
        let x = primal(p);
        let ynorm: f64 = y.iter().map(|v| v * v).sum();
        0.5 * ynorm - 0.5 * x.iter().map(|v| v * v).sum::<f64>()
    };
    let mut p = vec![0.0; n - 1];
    let mut z = p.clone();
    let mut t = 1.0f64;
    for it in 0..2_000_000 {
        let x = primal(&z);
        let mut p_next = vec![0.0; n - 1];
        for i in 0..n - 1 {
            // gradient of the dual objective wrt p is −D x
            let g = x[i + 1] - x[i];
            p_next[i] = (z[i] + 0.25 * g).clamp(-lambda, lambda);
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        for i in 0..n - 1 {
            z[i] = p_next[i] + (t - 1.0) / t_next * (p_next[i] - p[i]);
        }
        p = p_next;
        t = t_next;
        if it % 100 == 0 {
            let x = primal(&p);
            let gap = tv1d_prox_objective(&x, y, lambda) - dual_value(&p);
            if gap < tol {
                return x;
            }
        }
    }
    panic!("tv oracle did not converge");
}

/// Non-negative least squares `min_{x ≥ 0} ½‖Ax − b‖²` by Lawson–Hanson,
/// with the passive-set subproblems solved through the Gram matrix.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let gram = a.transpose() * a;
    let atb = a.transpose() * b;
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-13 * atb.amax().max(1e-300);
    let solve = |idx: &[usize]| -> DVector<f64> {
        let g = DMatrix::from_fn(idx.len(), idx.len(), |i, j| gram[(idx[i], idx[j])]);
        let r = DVector::from_fn(idx.len(), |i, _| atb[idx[i]]);
        g.cholesky().expect("passive columns are independent").solve(&r)
    };
    for _ in 0..3 * n + 10 {
        let w = &atb - &gram * &x;
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let z = solve(&idx);
            if z.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    alpha = alpha.min(x[i] / (x[i] - z[k]));
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z[k] - x[i]);
                if x[i] <= 1e-15 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    x
}

pub fn to_array1(v: &DVector<f64>) -> Array1<f64> {
    Array1::from_iter(v.iter().copied())
}

/// 16×16×2 scene seen by a 24×24 sensor through a 9×9 PSF: more
/// measurements than unknowns and a full-rank sensing matrix.
pub fn overdetermined_instance(seed: u64) -> (SystemModel, Measurement, HyperspectralCube) {
    let mut r = rng(seed);
    let psf = Psf::new(random_array2(&mut r, (9, 9)).mapv(|v| v * v * v)).unwrap();
    let f = Array3::from_shape_fn((2, 24, 24), |_| r.random::<f64>());
    let filter = FilterFunction::new(wavelengths(2), f, (1, 1), 1).unwrap();
    let model = SystemModel::new(psf, filter, (16, 16)).unwrap();
    let truth = Array3::from_shape_fn((2, 16, 16), |_| {
        let u: f64 = r.random();
        if u < 0.3 { 0.0 } else { u }
    });
    let truth = HyperspectralCube::new(wavelengths(2), truth).unwrap();
    let clean = model.forward(&truth).unwrap();
    let noisy = clean.data().mapv(|v| v + 0.05 * (r.random::<f64>() - 0.5));
    (model, Measurement::new(noisy).unwrap(), truth)
}
