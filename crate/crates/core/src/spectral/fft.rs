//! Two-dimensional complex FFTs on square grids.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse 2D transform for one grid size, with its own scratch.
///
/// The forward transform is unnormalised; the inverse divides by `n^2`.
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
            transposed: vec![Complex64::default(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn transpose_into(n: usize, src: &[Complex64], dst: &mut [Complex64]) {
        const B: usize = 32;
        for ib in (0..n).step_by(B) {
            for jb in (0..n).step_by(B) {
                for i in ib..(ib + B).min(n) {
                    for j in jb..(jb + B).min(n) {
                        dst[j * n + i] = src[i * n + j];
                    }
                }
            }
        }
    }

    fn run(&mut self, data: &mut [Complex64], forward: bool) {
        assert_eq!(data.len(), self.n * self.n);
        let plan = if forward { &self.forward } else { &self.inverse };
        plan.process_with_scratch(data, &mut self.scratch);
        Self::transpose_into(self.n, data, &mut self.transposed);
        plan.process_with_scratch(&mut self.transposed, &mut self.scratch);
        Self::transpose_into(self.n, &self.transposed, data);
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.run(data, false);
        let scale = 1.0 / (self.n * self.n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    pub fn forward_real(&mut self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut data);
        data
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse_real(&mut self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse(&mut spectrum);
        spectrum.into_iter().map(|c| c.re).collect()
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Fft2>> = RefCell::new(HashMap::new());
}

/// Runs `f` with this thread's cached transform for size `n`.
pub fn with_fft<R>(n: usize, f: impl FnOnce(&mut Fft2) -> R) -> R {
    PLANS.with(|plans| {
        let mut plans = plans.borrow_mut();
        let fft = plans.entry(n).or_insert_with(|| Fft2::new(n));
        f(fft)
    })
}
