//! Denoising experiments with over-sampled DFT and STFT frames.
//!
//! All randomness comes from [`noise`], which is seeded and stream-addressed so
//! sweeps are reproducible regardless of execution order.

mod noise;
mod signals;
mod stft_demo;
mod sweep;

use num_complex::Complex64;

use crate::csvio::Method;
use crate::error::{check_finite, Result};
use crate::operators::{check_len, LinearOperator};
use crate::solvers::{
    count_nonzero, debias_support, gmc_solve, ista_solve, IterOptions, SolveConfig,
};

pub use noise::{add_awgn, add_awgn_stream, gaussian_noise};
pub use signals::{make_chirp, make_two_sine, ChirpSpec, Signal};
pub use stft_demo::{matched_rmse_comparison, run_stft_demo, MatchedComparison, StftReport};
pub use sweep::{
    best_lambda, run_sweep, sinusoid_amplitudes, CellFailure, ExperimentSpec, SweepResult,
};

/// Coefficients below this fraction of the peak modulus are not counted as
/// non-zero in sparsity diagnostics.
pub const NNZ_REL_THRESHOLD: f64 = 1e-3;

/// Coefficients above this modulus define the support refit by debiasing.
pub const DEBIAS_SUPPORT_THRESHOLD: f64 = 1e-8;

/// Output of [`denoise_frame`].
#[derive(Debug, Clone, PartialEq)]
pub struct Denoised {
    pub coefs: Vec<Complex64>,
    pub reconstruction: Signal,
    pub converged: bool,
    pub iterations: usize,
}

impl Denoised {
    pub fn nnz(&self) -> usize {
        count_nonzero(&self.coefs, NNZ_REL_THRESHOLD)
    }
}

/// Estimate frame coefficients of `noisy` with the given method and
/// reconstruct `A x`.
pub fn denoise_frame(
    noisy: &Signal,
    frame: &dyn LinearOperator<Complex64>,
    method: Method,
    lam: f64,
    gamma: f64,
    opts: &IterOptions,
) -> Result<Denoised> {
    check_len(frame.codomain_dim(), noisy.len())?;
    let y = noisy.samples();
    let (coefs, converged, iterations) = match method {
        Method::L1 | Method::L1Debiased => {
            let rep = ista_solve(frame, y, lam, opts)?;
            let coefs = if method == Method::L1Debiased {
                debias_support(frame, y, &rep.x_star, DEBIAS_SUPPORT_THRESHOLD)?
            } else {
                rep.x_star
            };
            (coefs, rep.converged, rep.iterations)
        }
        Method::Gmc => {
            let cfg = SolveConfig::new(lam, gamma).with_opts(opts.clone());
            let rep = gmc_solve(frame, y, &cfg)?;
            (rep.x_star, rep.converged, rep.iterations)
        }
    };
    let recon = frame.apply_forward(&coefs)?;
    check_finite(&recon)?;
    Ok(Denoised {
        coefs,
        reconstruction: Signal::new(recon),
        converged,
        iterations,
    })
}

/// Root-mean-square difference `sqrt(mean |a_m - b_m|^2)`.
pub fn rmse(a: &Signal, b: &Signal) -> Result<f64> {
    check_len(a.len(), b.len())?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(p, q)| (p - q).norm_sqr())
        .sum();
    Ok((sum / a.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::DftFrameOperator;

    #[test]
    fn rmse_examples() {
        let z = Signal::from_real(&[1.0, 2.0]);
        assert_eq!(rmse(&z, &z).unwrap(), 0.0);
        let ones = Signal::from_real(&[1.0; 4]);
        let zeros = Signal::from_real(&[0.0; 4]);
        assert_eq!(rmse(&ones, &zeros).unwrap(), 1.0);
        let a = Signal::from_real(&[3.0, 4.0]);
        let b = Signal::from_real(&[0.0, 0.0]);
        assert!((rmse(&a, &b).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
        assert!(rmse(&a, &ones).is_err());
    }

    #[test]
    fn clean_data_with_tiny_lambda_is_reproduced() {
        let spec = ExperimentSpec::default();
        let clean = make_two_sine(&spec).unwrap();
        let frame = DftFrameOperator::new(spec.signal_len, spec.coef_len).unwrap();
        let opts = IterOptions {
            a_gram_norm: Some(1.0),
            ..IterOptions::default()
        };
        for method in Method::ALL {
            let out = denoise_frame(&clean, &frame, method, 1e-6, 0.8, &opts).unwrap();
            let err = rmse(&out.reconstruction, &clean).unwrap();
            assert!(err <= 1e-4, "{method}: rmse {err}");
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let frame = DftFrameOperator::new(10, 16).unwrap();
        let s = Signal::from_real(&[0.0; 9]);
        assert!(denoise_frame(&s, &frame, Method::L1, 1.0, 0.0, &IterOptions::default()).is_err());
    }
}
