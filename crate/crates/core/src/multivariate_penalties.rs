//! Generalized Huber function and generalized minimax-concave (GMC) penalty.
//!
//! For a linear operator `B`,
//!
//! ```text
//! S_B(x)   = min_v { ||v||_1 + 1/2 ||B (x - v)||_2^2 }
//! psi_B(x) = ||x||_1 - S_B(x)
//! ```
//!
//! There is no closed form for `S_B`, so the inner minimization is solved by
//! iterative shrinkage with step `1 / ||B^H B||_2`, started at `v = 0`.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::operators::{
    check_len, estimate_gram_norm, LinearOperator, ScaledOperator, DEFAULT_POWER_MAX_ITER,
    DEFAULT_POWER_TOL,
};
use crate::scalar::{max_abs_diff, norm1, norm2_sqr, norm_inf, Scalar};
use crate::scalar_penalties::shrink_slice;

pub const DEFAULT_INNER_TOL: f64 = 1e-10;
pub const DEFAULT_INNER_MAX_ITER: usize = 100_000;

/// Result of the inner problem defining `S_B(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution<T> {
    pub v_star: Vec<T>,
    /// `S_B(x)`
    pub value: f64,
    pub iterations: usize,
    /// Sup-norm change of the last shrinkage step.
    pub residual: f64,
}

/// The GMC penalty `psi_B` together with its generalized Huber part `S_B`.
#[derive(Clone)]
pub struct GmcPenalty<'a, T: Scalar> {
    b_op: Arc<dyn LinearOperator<T> + 'a>,
    b_gram_norm: f64,
    inner_tol: f64,
    inner_max_iter: usize,
}

impl<T: Scalar> std::fmt::Debug for GmcPenalty<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GmcPenalty")
            .field("rows", &self.b_op.codomain_dim())
            .field("cols", &self.b_op.domain_dim())
            .field("b_gram_norm", &self.b_gram_norm)
            .field("inner_tol", &self.inner_tol)
            .field("inner_max_iter", &self.inner_max_iter)
            .finish()
    }
}

impl<'a, T: Scalar> GmcPenalty<'a, T> {
    /// Penalty for the matrix `B`; `||B^H B||_2` is estimated by power iteration.
    pub fn new(b_op: Arc<dyn LinearOperator<T> + 'a>) -> Result<Self> {
        let norm = estimate_gram_norm(b_op.as_ref(), DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)?;
        Self::with_gram_norm(b_op, norm)
    }

    /// Penalty for `B` with a known `||B^H B||_2`.
    pub fn with_gram_norm(b_op: Arc<dyn LinearOperator<T> + 'a>, b_gram_norm: f64) -> Result<Self> {
        if !(b_gram_norm >= 0.0) || !b_gram_norm.is_finite() {
            return Err(invalid(
                "b_gram_norm",
                format!("must be finite and >= 0, got {b_gram_norm}"),
            ));
        }
        Ok(Self {
            b_op,
            b_gram_norm,
            inner_tol: DEFAULT_INNER_TOL,
            inner_max_iter: DEFAULT_INNER_MAX_ITER,
        })
    }

    pub fn with_inner_tolerance(mut self, tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(invalid("inner_tol", format!("must be positive, got {tol}")));
        }
        if max_iter == 0 {
            return Err(invalid("inner_max_iter", "must be positive"));
        }
        self.inner_tol = tol;
        self.inner_max_iter = max_iter;
        Ok(self)
    }

    pub fn b_op(&self) -> &Arc<dyn LinearOperator<T> + 'a> {
        &self.b_op
    }

    pub fn dim(&self) -> usize {
        self.b_op.domain_dim()
    }

    pub fn b_gram_norm(&self) -> f64 {
        self.b_gram_norm
    }

    pub fn inner_tol(&self) -> f64 {
        self.inner_tol
    }

    pub fn inner_max_iter(&self) -> usize {
        self.inner_max_iter
    }

    /// `S_B(x)` and the minimizing `v`.
    pub fn eval_generalized_huber(&self, x: &[T]) -> Result<InnerSolution<T>> {
        check_len(self.dim(), x.len())?;
        let n = x.len();
        let mut v = vec![T::zero(); n];
        if self.b_gram_norm == 0.0 {
            return Ok(InnerSolution {
                v_star: v,
                value: 0.0,
                iterations: 0,
                residual: 0.0,
            });
        }
        let step = 1.0 / self.b_gram_norm;
        let mut diff = vec![T::zero(); n];
        let mut tmp = vec![T::zero(); self.b_op.codomain_dim()];
        let mut grad = vec![T::zero(); n];
        let mut next = vec![T::zero(); n];
        let mut residual = f64::INFINITY;

        for it in 1..=self.inner_max_iter {
            for i in 0..n {
                diff[i] = v[i] - x[i];
            }
            self.b_op.gram_into(&diff, &mut tmp, &mut grad);
            for i in 0..n {
                next[i] = v[i] - grad[i].scale(step);
            }
            shrink_slice(&mut next, step);
            residual = max_abs_diff(&next, &v);
            std::mem::swap(&mut v, &mut next);
            if residual <= self.inner_tol {
                let value = self.inner_cost(x, &v, &mut diff, &mut tmp);
                return Ok(InnerSolution {
                    v_star: v,
                    value,
                    iterations: it,
                    residual,
                });
            }
        }
        let mut best = Vec::with_capacity(n);
        v.iter().for_each(|z| z.push_parts(&mut best));
        Err(Error::InnerNotConverged {
            iterations: self.inner_max_iter,
            residual,
            best,
        })
    }

    fn inner_cost(&self, x: &[T], v: &[T], diff: &mut [T], tmp: &mut [T]) -> f64 {
        for i in 0..x.len() {
            diff[i] = x[i] - v[i];
        }
        self.b_op.forward_into(diff, tmp);
        norm1(v) + 0.5 * norm2_sqr(tmp)
    }

    /// `grad S_B(x) = B^H B (x - v*)`.
    pub fn grad_generalized_huber(&self, x: &[T]) -> Result<Vec<T>> {
        let sol = self.eval_generalized_huber(x)?;
        let diff: Vec<T> = x.iter().zip(&sol.v_star).map(|(&a, &b)| a - b).collect();
        let mut tmp = vec![T::zero(); self.b_op.codomain_dim()];
        let mut out = vec![T::zero(); x.len()];
        self.b_op.gram_into(&diff, &mut tmp, &mut out);
        Ok(out)
    }

    /// `psi_B(x) = ||x||_1 - S_B(x)`.
    pub fn eval_gmc(&self, x: &[T]) -> Result<f64> {
        Ok(norm1(x) - self.eval_generalized_huber(x)?.value)
    }

    /// Whether `||B^H B x||_inf <= 1`, where `S_B(x) = ||B x||^2 / 2`.
    pub fn in_quadratic_region(&self, x: &[T]) -> Result<bool> {
        check_len(self.dim(), x.len())?;
        let mut tmp = vec![T::zero(); self.b_op.codomain_dim()];
        let mut g = vec![T::zero(); x.len()];
        self.b_op.gram_into(x, &mut tmp, &mut g);
        Ok(norm_inf(&g) <= 1.0)
    }
}

fn check_gamma(lam: f64, gamma: f64) -> Result<()> {
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(invalid("lambda", format!("must be positive, got {lam}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(invalid(
            "gamma",
            format!("must lie in [0, 1] for a convex cost, got {gamma}"),
        ));
    }
    Ok(())
}

/// `B = sqrt(gamma / lam) A`, which keeps `1/2 ||y - A x||^2 + lam psi_B(x)`
/// convex for `0 <= gamma <= 1`.
pub fn build_b_from_a<'a, T: Scalar>(
    a_op: Arc<dyn LinearOperator<T> + 'a>,
    lam: f64,
    gamma: f64,
) -> Result<GmcPenalty<'a, T>> {
    check_gamma(lam, gamma)?;
    let a_norm = estimate_gram_norm(a_op.as_ref(), DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)?;
    build_b_from_a_with_norm(a_op, a_norm, lam, gamma)
}

/// [`build_b_from_a`] with a known `||A^H A||_2`.
pub fn build_b_from_a_with_norm<'a, T: Scalar>(
    a_op: Arc<dyn LinearOperator<T> + 'a>,
    a_gram_norm: f64,
    lam: f64,
    gamma: f64,
) -> Result<GmcPenalty<'a, T>> {
    check_gamma(lam, gamma)?;
    scaled_penalty(a_op, a_gram_norm, gamma / lam)
}

/// Penalty with `B^H B = ratio * A^H A`, no convexity check on `ratio`.
pub(crate) fn scaled_penalty<'a, T: Scalar>(
    a_op: Arc<dyn LinearOperator<T> + 'a>,
    a_gram_norm: f64,
    ratio: f64,
) -> Result<GmcPenalty<'a, T>> {
    if !(ratio >= 0.0) {
        return Err(invalid(
            "gamma",
            format!("gamma / lambda must be >= 0, got {ratio}"),
        ));
    }
    let b: Arc<dyn LinearOperator<T> + 'a> = Arc::new(ScaledOperator::new(a_op, ratio.sqrt()));
    GmcPenalty::with_gram_norm(b, ratio * a_gram_norm)
}
