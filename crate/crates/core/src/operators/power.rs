use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LinearOperator;
use crate::error::{invalid, Error, Result};
use crate::scalar::{dot, norm2, Scalar};

pub const DEFAULT_POWER_TOL: f64 = 1e-10;
pub const DEFAULT_POWER_MAX_ITER: usize = 10_000;

/// Fixed seed for the power-iteration start vector, so step sizes derived from
/// the estimate are reproducible.
const START_SEED: u64 = 0x6d63_5f70_6f77_6572;

/// Estimate `||A^H A||_2 = ||A||_2^2` by power iteration on `x -> A^H (A x)`.
///
/// Stops once the Rayleigh quotient changes by at most `tol` relative to
/// itself between consecutive iterations. Returns `0.0` for the zero operator.
pub fn estimate_gram_norm<T: Scalar>(
    op: &dyn LinearOperator<T>,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    let n = op.domain_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x: Vec<T> = (0..n)
        .map(|_| T::from_real(rng.gen_range(0.5..1.5)))
        .collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|z| *z = z.scale(1.0 / nx));

    let mut tmp = vec![T::zero(); op.codomain_dim()];
    let mut z = vec![T::zero(); n];
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        op.gram_into(&x, &mut tmp, &mut z);
        let rayleigh = dot(&z, &x).re();
        let nz = norm2(&z);
        if nz == 0.0 {
            return Ok(0.0);
        }
        if (rayleigh - estimate).abs() <= tol * rayleigh {
            return Ok(rayleigh);
        }
        estimate = rayleigh;
        for (xi, &zi) in x.iter_mut().zip(&z) {
            *xi = zi.scale(1.0 / nz);
        }
    }
    Err(Error::PowerIterationStalled {
        estimate,
        iterations: max_iter,
    })
}
