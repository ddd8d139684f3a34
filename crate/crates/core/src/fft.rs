use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse transform pair of a fixed length. The inverse is
/// normalised by `1/n` so that `inverse(forward(v)) == v`.
#[derive(Clone)]
pub(crate) struct Transform {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Transform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            n,
            fwd,
            inv,
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inv.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// Transform of `v` zero-padded to the transform length.
    pub fn forward_padded(&mut self, v: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.extend_from_slice(v);
        out.resize(self.n, Complex64::default());
        self.forward(out);
    }
}
