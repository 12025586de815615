//! Row-major 2D complex FFTs on top of `rustfft`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Smallest `2^a 3^b 5^c` that is `>= n`.
pub(crate) fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Forward and inverse 2D transforms of a fixed `ny x nx` frame.
///
/// Plans are immutable after construction, so one instance can be shared
/// across threads.
pub(crate) struct Fft2 {
    ny: usize,
    nx: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("ny", &self.ny).field("nx", &self.nx).finish()
    }
}

impl Fft2 {
    pub(crate) fn new(ny: usize, nx: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            ny,
            nx,
            row_fwd: planner.plan_fft_forward(nx),
            row_inv: planner.plan_fft_inverse(nx),
            col_fwd: planner.plan_fft_forward(ny),
            col_inv: planner.plan_fft_inverse(ny),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.ny * self.nx
    }

    pub(crate) fn shape(&self) -> (usize, usize) {
        (self.ny, self.nx)
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.row_fwd, &self.col_fwd);
    }

    /// Unnormalized inverse; callers divide by [`Fft2::len`].
    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.row_inv, &self.col_inv);
    }

    fn run(&self, buf: &mut [Complex64], rows: &Arc<dyn Fft<f64>>, cols: &Arc<dyn Fft<f64>>) {
        assert_eq!(buf.len(), self.len());
        let scratch_len = rows
            .get_inplace_scratch_len()
            .max(cols.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::default(); scratch_len];
        rows.process_with_scratch(buf, &mut scratch);

        let mut t = vec![Complex64::default(); self.len()];
        transpose(buf, &mut t, self.ny, self.nx);
        cols.process_with_scratch(&mut t, &mut scratch);
        transpose(&t, buf, self.nx, self.ny);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const BLOCK: usize = 16;
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
