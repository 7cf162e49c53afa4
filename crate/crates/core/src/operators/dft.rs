use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::LinearOperator;
use crate::error::{invalid, Result};

/// Over-sampled inverse DFT: `A[m, n] = exp(j 2 pi m n / N) / sqrt(N)` for
/// `m < M`, `n < N`, `N >= M`.
///
/// The rows of `A` are orthonormal, so `A A^H = I` (normalized tight frame).
/// Applied with length-`N` FFTs.
#[derive(Clone)]
pub struct DftFrameOperator {
    signal_len: usize,
    coef_len: usize,
    scale: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DftFrameOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftFrameOperator")
            .field("signal_len", &self.signal_len)
            .field("coef_len", &self.coef_len)
            .finish()
    }
}

impl DftFrameOperator {
    pub fn new(signal_len: usize, coef_len: usize) -> Result<Self> {
        if signal_len == 0 {
            return Err(invalid("signal_len", "must be positive"));
        }
        if coef_len < signal_len {
            return Err(invalid(
                "coef_len",
                format!("need N >= M, got N = {coef_len}, M = {signal_len}"),
            ));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            signal_len,
            coef_len,
            scale: 1.0 / (coef_len as f64).sqrt(),
            fwd: planner.plan_fft_forward(coef_len),
            inv: planner.plan_fft_inverse(coef_len),
        })
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn coef_len(&self) -> usize {
        self.coef_len
    }
}

impl LinearOperator<Complex64> for DftFrameOperator {
    fn domain_dim(&self) -> usize {
        self.coef_len
    }

    fn codomain_dim(&self) -> usize {
        self.signal_len
    }

    fn forward_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let mut buf = x.to_vec();
        self.inv.process(&mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b * self.scale;
        }
    }

    fn adjoint_into(&self, y: &[Complex64], out: &mut [Complex64]) {
        out[..self.signal_len].copy_from_slice(y);
        out[self.signal_len..].fill(Complex64::new(0.0, 0.0));
        self.fwd.process(out);
        out.iter_mut().for_each(|z| *z *= self.scale);
    }
}
