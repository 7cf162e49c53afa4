//! Minimization of `F(x) = 1/2 ||y - A x||^2 + lam psi_B(x)` with
//! `B = sqrt(gamma / lam) A`.
//!
//! [`gmc_solve`] runs forward-backward splitting on the saddle function
//!
//! ```text
//! F(x, v) = 1/2 ||y - A x||^2 + lam ||x||_1 - lam ||v||_1 - gamma/2 ||A (x - v)||^2
//! ```
//!
//! which only needs `A`, `A^H` and soft thresholding. At `gamma = 0` it is
//! exactly ISTA ([`ista_solve`]). When `A^H A` is diagonal the minimizer is
//! element-wise firm thresholding ([`diagonal_solve`]).

use std::sync::Arc;

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::multivariate_penalties::{scaled_penalty, GmcPenalty};
use crate::operators::{
    check_len, estimate_gram_norm, LinearOperator, DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL,
};
use crate::scalar::{max_abs_diff, norm1, norm2_sqr, Scalar};
use crate::scalar_penalties::{firm, hard, shrink, shrink_slice, FirmParams};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Default step is this fraction of the upper bound `2 / rho`.
pub const DEFAULT_STEP_FRACTION: f64 = 0.95;

/// Iteration controls shared by both solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct IterOptions {
    /// Step size; `None` selects `1.9 / rho`.
    pub mu: Option<f64>,
    pub max_iter: usize,
    /// Stop when both blocks change by at most `tol` in sup-norm.
    pub tol: f64,
    /// Known `||A^H A||_2`; estimated by power iteration when `None`.
    pub a_gram_norm: Option<f64>,
    /// Record `F(x^(i))` for every iterate (expensive for `gamma > 0`).
    pub trace_cost: bool,
}

impl Default for IterOptions {
    fn default() -> Self {
        Self {
            mu: None,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            a_gram_norm: None,
            trace_cost: false,
        }
    }
}

impl IterOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid(
                "tol",
                format!("must be positive, got {}", self.tol),
            ));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub lam: f64,
    /// Non-convexity parameter in `[0, 1)`.
    pub gamma: f64,
    pub opts: IterOptions,
}

impl SolveConfig {
    pub fn new(lam: f64, gamma: f64) -> Self {
        Self {
            lam,
            gamma,
            opts: IterOptions::default(),
        }
    }

    pub fn with_opts(mut self, opts: IterOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_lam(self.lam)?;
        // gamma = 1 breaks cocoercivity of the forward operator
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(invalid(
                "gamma",
                format!("must lie in [0, 1), got {}", self.gamma),
            ));
        }
        self.opts.validate()
    }
}

fn check_lam(lam: f64) -> Result<()> {
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(invalid(
            "lambda",
            format!("must be positive and finite, got {lam}"),
        ));
    }
    Ok(())
}

/// Iterates after one forward-backward step.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleState<T> {
    pub x: Vec<T>,
    pub v: Vec<T>,
    pub iter: usize,
    /// `max(||x_new - x||_inf, ||v_new - v||_inf)`
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub x_star: Vec<T>,
    pub v_star: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub delta: f64,
    pub mu: f64,
    pub rho: f64,
    /// `F(x^(0)), F(x^(1)), ...` when requested.
    pub cost_trace: Vec<f64>,
}

/// `rho = max(1, gamma / (1 - gamma)) ||A^H A||_2`.
pub fn step_bound(gamma: f64, a_gram_norm: f64) -> f64 {
    (1.0f64).max(gamma / (1.0 - gamma)) * a_gram_norm
}

fn resolve_gram_norm<T: Scalar>(a: &dyn LinearOperator<T>, opts: &IterOptions) -> Result<f64> {
    match opts.a_gram_norm {
        Some(n) if n >= 0.0 && n.is_finite() => Ok(n),
        Some(n) => Err(invalid(
            "a_gram_norm",
            format!("must be finite and >= 0, got {n}"),
        )),
        None => estimate_gram_norm(a, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER),
    }
}

fn resolve_step(mu: Option<f64>, rho: f64) -> Result<f64> {
    let upper = if rho > 0.0 { 2.0 / rho } else { f64::INFINITY };
    match mu {
        None if rho > 0.0 => Ok(DEFAULT_STEP_FRACTION * upper),
        None => Ok(1.0),
        Some(mu) if mu > 0.0 && mu < upper => Ok(mu),
        Some(mu) => Err(invalid(
            "mu",
            format!("step must lie in (0, {upper}), got {mu}"),
        )),
    }
}

/// Minimize `F` with the GMC penalty by forward-backward iteration on the
/// saddle function, starting from `x = v = 0`.
pub fn gmc_solve<T: Scalar>(
    a: &dyn LinearOperator<T>,
    y: &[T],
    cfg: &SolveConfig,
) -> Result<SolveReport<T>> {
    gmc_solve_with(a, y, cfg, |_| {})
}

/// [`gmc_solve`], calling `observe` after every iteration.
pub fn gmc_solve_with<T: Scalar>(
    a: &dyn LinearOperator<T>,
    y: &[T],
    cfg: &SolveConfig,
    mut observe: impl FnMut(&SaddleState<T>),
) -> Result<SolveReport<T>> {
    cfg.validate()?;
    check_len(a.codomain_dim(), y.len())?;
    let (lam, gamma) = (cfg.lam, cfg.gamma);
    let a_norm = resolve_gram_norm(a, &cfg.opts)?;
    let rho = step_bound(gamma, a_norm);
    let mu = resolve_step(cfg.opts.mu, rho)?;
    let thresh = mu * lam;

    let n = a.domain_dim();
    let m = a.codomain_dim();
    let cost = if cfg.opts.trace_cost {
        Some(CostFunction::from_parts(a, y, lam, gamma, a_norm)?)
    } else {
        None
    };

    let mut state = SaddleState {
        x: vec![T::zero(); n],
        v: vec![T::zero(); n],
        iter: 0,
        delta: f64::INFINITY,
    };
    let mut cost_trace = Vec::new();
    if let Some(c) = &cost {
        cost_trace.push(c.value(&state.x)?);
    }

    let mut d = vec![T::zero(); n];
    let mut s = vec![T::zero(); n];
    let mut r = vec![T::zero(); m];
    let mut ad = vec![T::zero(); m];
    let mut grad_x = vec![T::zero(); n];
    let mut grad_v = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    let g = T::from_real(gamma);

    let mut converged = false;
    for it in 1..=cfg.opts.max_iter {
        let (x, v) = (&state.x, &state.v);
        for i in 0..n {
            d[i] = v[i] - x[i];
            s[i] = x[i] + g * d[i];
        }
        // w = x - mu A^H (A (x + gamma (v - x)) - y)
        a.forward_into(&s, &mut r);
        for (ri, &yi) in r.iter_mut().zip(y) {
            *ri -= yi;
        }
        a.adjoint_into(&r, &mut grad_x);
        for i in 0..n {
            w[i] = x[i] - grad_x[i].scale(mu);
        }
        // u = v - mu gamma A^H A (v - x)
        if gamma == 0.0 {
            u.copy_from_slice(v);
        } else {
            a.gram_into(&d, &mut ad, &mut grad_v);
            for i in 0..n {
                u[i] = v[i] - grad_v[i].scale(mu * gamma);
            }
        }
        shrink_slice(&mut w, thresh);
        shrink_slice(&mut u, thresh);

        let delta = max_abs_diff(&w, &state.x).max(max_abs_diff(&u, &state.v));
        std::mem::swap(&mut state.x, &mut w);
        std::mem::swap(&mut state.v, &mut u);
        state.iter = it;
        state.delta = delta;
        if let Some(c) = &cost {
            cost_trace.push(c.value(&state.x)?);
        }
        observe(&state);
        if delta <= cfg.opts.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        x_star: state.x,
        v_star: state.v,
        iterations: state.iter,
        converged,
        delta: state.delta,
        mu,
        rho,
        cost_trace,
    })
}

/// Iterative shrinkage/thresholding for `1/2 ||y - A x||^2 + lam ||x||_1`,
/// with default step `1.9 / ||A^H A||_2`.
pub fn ista_solve<T: Scalar>(
    a: &dyn LinearOperator<T>,
    y: &[T],
    lam: f64,
    opts: &IterOptions,
) -> Result<SolveReport<T>> {
    ista_solve_with(a, y, lam, opts, |_| {})
}

pub fn ista_solve_with<T: Scalar>(
    a: &dyn LinearOperator<T>,
    y: &[T],
    lam: f64,
    opts: &IterOptions,
    mut observe: impl FnMut(&SaddleState<T>),
) -> Result<SolveReport<T>> {
    check_lam(lam)?;
    opts.validate()?;
    check_len(a.codomain_dim(), y.len())?;
    let a_norm = resolve_gram_norm(a, opts)?;
    let mu = resolve_step(opts.mu, a_norm)?;
    let thresh = mu * lam;
    let n = a.domain_dim();

    let mut state = SaddleState {
        x: vec![T::zero(); n],
        v: vec![T::zero(); n],
        iter: 0,
        delta: f64::INFINITY,
    };
    let mut r = vec![T::zero(); a.codomain_dim()];
    let mut grad = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    let mut cost_trace = Vec::new();
    let residual_cost = |x: &[T], r: &mut [T]| -> f64 {
        a.forward_into(x, r);
        let misfit: f64 = r.iter().zip(y).map(|(&p, &q)| (q - p).norm_sqr()).sum();
        0.5 * misfit + lam * norm1(x)
    };
    if opts.trace_cost {
        cost_trace.push(residual_cost(&state.x, &mut r));
    }

    let mut converged = false;
    for it in 1..=opts.max_iter {
        a.forward_into(&state.x, &mut r);
        for (ri, &yi) in r.iter_mut().zip(y) {
            *ri -= yi;
        }
        a.adjoint_into(&r, &mut grad);
        for i in 0..n {
            next[i] = state.x[i] - grad[i].scale(mu);
        }
        shrink_slice(&mut next, thresh);
        let delta = max_abs_diff(&next, &state.x);
        std::mem::swap(&mut state.x, &mut next);
        state.iter = it;
        state.delta = delta;
        if opts.trace_cost {
            cost_trace.push(residual_cost(&state.x, &mut r));
        }
        observe(&state);
        if delta <= opts.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        x_star: state.x,
        v_star: state.v,
        iterations: state.iter,
        converged,
        delta: state.delta,
        mu,
        rho: a_norm,
        cost_trace,
    })
}

/// Closed-form minimizer when `A^H A = diag(alphas^2)`: element-wise firm
/// thresholding of `[A^H y]_n / alpha_n^2` with thresholds
/// `lam / alpha_n^2` and `lam / (gamma alpha_n^2)`; soft thresholding at
/// `gamma = 0`; the hard-threshold limit at `gamma = 1`.
pub fn diagonal_solve(alphas: &[f64], aty: &[f64], lam: f64, gamma: f64) -> Result<Vec<f64>> {
    check_len(alphas.len(), aty.len())?;
    check_lam(lam)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(invalid("gamma", format!("must lie in [0, 1], got {gamma}")));
    }
    if let Some(bad) = alphas.iter().find(|&&a| !(a > 0.0) || !a.is_finite()) {
        return Err(invalid(
            "alphas",
            format!("entries must be positive, got {bad}"),
        ));
    }
    alphas
        .iter()
        .zip(aty)
        .map(|(&alpha, &c)| {
            let a2 = alpha * alpha;
            let z = c / a2;
            let t = lam / a2;
            if gamma == 0.0 {
                Ok(shrink(z, t))
            } else if gamma == 1.0 {
                Ok(hard(z, t))
            } else {
                Ok(firm(z, &FirmParams::new(t, t / gamma)?))
            }
        })
        .collect()
}

/// `F(x) = 1/2 ||y - A x||^2 + lam psi_B(x)` with `B = sqrt(gamma / lam) A`.
///
/// Any `gamma >= 0` is accepted here so non-convex settings can be probed;
/// convexity is only guaranteed for `gamma <= 1`.
pub struct CostFunction<'a, T: Scalar> {
    a: &'a dyn LinearOperator<T>,
    y: &'a [T],
    lam: f64,
    penalty: GmcPenalty<'a, T>,
}

impl<'a, T: Scalar> CostFunction<'a, T> {
    pub fn new(a: &'a dyn LinearOperator<T>, y: &'a [T], lam: f64, gamma: f64) -> Result<Self> {
        let norm = estimate_gram_norm(a, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)?;
        Self::from_parts(a, y, lam, gamma, norm)
    }

    pub fn from_parts(
        a: &'a dyn LinearOperator<T>,
        y: &'a [T],
        lam: f64,
        gamma: f64,
        a_gram_norm: f64,
    ) -> Result<Self> {
        check_lam(lam)?;
        check_len(a.codomain_dim(), y.len())?;
        let shared: Arc<dyn LinearOperator<T> + 'a> = Arc::new(a);
        let penalty = scaled_penalty(shared, a_gram_norm, gamma / lam)?;
        Ok(Self { a, y, lam, penalty })
    }

    /// Inner-solver settings used when evaluating `S_B`.
    pub fn with_inner_tolerance(mut self, tol: f64, max_iter: usize) -> Result<Self> {
        self.penalty = self.penalty.with_inner_tolerance(tol, max_iter)?;
        Ok(self)
    }

    pub fn penalty(&self) -> &GmcPenalty<'a, T> {
        &self.penalty
    }

    pub fn value(&self, x: &[T]) -> Result<f64> {
        let ax = self.a.apply_forward(x)?;
        let misfit: f64 = ax
            .iter()
            .zip(self.y)
            .map(|(&p, &q)| (q - p).norm_sqr())
            .sum();
        Ok(0.5 * misfit + self.lam * self.penalty.eval_gmc(x)?)
    }
}

pub fn cost_value<T: Scalar>(
    a: &dyn LinearOperator<T>,
    y: &[T],
    lam: f64,
    gamma: f64,
    x: &[T],
) -> Result<f64> {
    CostFunction::new(a, y, lam, gamma)?.value(x)
}

/// Support-restricted least-squares refit of an `l1` solution.
///
/// Entries with `|x_n| > threshold` form the support; their values are
/// replaced by the unregularized least-squares fit of `y` on those columns of
/// `A`. The fit is computed from an SVD of the restricted columns, giving the
/// minimum-norm solution when the support has more columns than `A` has
/// rank. Entries off the support stay zero.
pub fn debias_support<T>(
    a: &dyn LinearOperator<T>,
    y: &[T],
    x: &[T],
    threshold: f64,
) -> Result<Vec<T>>
where
    T: Scalar + ComplexField<RealField = f64>,
{
    check_len(a.domain_dim(), x.len())?;
    check_len(a.codomain_dim(), y.len())?;
    let support: Vec<usize> = (0..x.len())
        .filter(|&i| Scalar::modulus(x[i]) > threshold)
        .collect();
    let mut out = vec![<T as num_traits::Zero>::zero(); x.len()];
    if support.is_empty() {
        return Ok(out);
    }
    let m = a.codomain_dim();
    let mut cols = DMatrix::<T>::zeros(m, support.len());
    let mut e = vec![<T as num_traits::Zero>::zero(); x.len()];
    let mut col = vec![<T as num_traits::Zero>::zero(); m];
    for (j, &idx) in support.iter().enumerate() {
        e[idx] = <T as num_traits::One>::one();
        a.forward_into(&e, &mut col);
        e[idx] = <T as num_traits::Zero>::zero();
        cols.column_mut(j).copy_from_slice(&col);
    }
    let rhs = DVector::from_column_slice(y);
    let svd = cols.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-12 * m.max(support.len()) as f64;
    let z = svd.solve(&rhs, eps).map_err(|_| Error::SingularSystem {
        support: support.len(),
    })?;
    for (j, &idx) in support.iter().enumerate() {
        out[idx] = z[j];
    }
    Ok(out)
}

/// Number of entries whose modulus exceeds `rel` times the largest modulus.
pub fn count_nonzero<T: Scalar>(x: &[T], rel: f64) -> usize {
    let peak = x.iter().map(|z| z.modulus()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0;
    }
    x.iter().filter(|z| z.modulus() > rel * peak).count()
}

/// Half the squared residual, `1/2 ||y - A x||^2`.
pub fn data_misfit<T: Scalar>(a: &dyn LinearOperator<T>, y: &[T], x: &[T]) -> Result<f64> {
    let ax = a.apply_forward(x)?;
    let r: Vec<T> = ax.iter().zip(y).map(|(&p, &q)| q - p).collect();
    Ok(0.5 * norm2_sqr(&r))
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::operators::{DenseOperator, DftFrameOperator};
    use crate::scalar_penalties::{scalar_minimize, ScalarPenaltyParams};

    fn tight(tol: f64) -> IterOptions {
        IterOptions {
            tol,
            max_iter: 1_000_000,
            ..IterOptions::default()
        }
    }

    #[test]
    fn identity_reduces_to_soft_threshold() {
        let a = DenseOperator::<f64>::identity(2);
        let y = [3.0, 0.5];
        let rep = gmc_solve(&a, &y, &SolveConfig::new(1.0, 0.0)).unwrap();
        assert!(rep.converged);
        assert!((rep.x_star[0] - 2.0).abs() < 1e-9 && rep.x_star[1] == 0.0);
        let rep = ista_solve(&a, &y, 1.0, &IterOptions::default()).unwrap();
        assert!((rep.x_star[0] - 2.0).abs() < 1e-9 && rep.x_star[1] == 0.0);
    }

    #[test]
    fn diagonal_case_is_firm_thresholding() {
        let alphas = [1.0, 2.0];
        let a = DenseOperator::diag(&alphas);
        let (lam, gamma) = (1.0, 0.5);
        for y in [[1.7, 0.9], [0.3, 2.2], [-4.0, 1.1], [1.2, -0.6]] {
            let cfg = SolveConfig::new(lam, gamma).with_opts(tight(1e-13));
            let rep = gmc_solve(&a, &y, &cfg).unwrap();
            let aty = a.apply_adjoint(&y).unwrap();
            let closed = diagonal_solve(&alphas, &aty, lam, gamma).unwrap();
            for (p, q) in rep.x_star.iter().zip(&closed) {
                assert!(
                    (p - q).abs() < 1e-8,
                    "{y:?}: {:?} vs {closed:?}",
                    rep.x_star
                );
            }
        }
    }

    #[test]
    fn diagonal_solve_examples() {
        let got = diagonal_solve(&[1.0; 3], &[0.5, 1.5, 5.0], 1.0, 0.5).unwrap();
        assert_eq!(got, vec![0.0, 1.0, 5.0]);
        let got = diagonal_solve(&[2.0], &[6.0], 1.0, 0.0).unwrap();
        assert_eq!(got, vec![shrink(1.5, 0.25)]);
        assert!(diagonal_solve(&[0.0], &[1.0], 1.0, 0.5).is_err());
        assert!(diagonal_solve(&[1.0], &[1.0], 1.0, 1.5).is_err());
        assert!(diagonal_solve(&[1.0, 2.0], &[1.0], 1.0, 0.5).is_err());
        // gamma = 1 is the hard-threshold limit
        assert_eq!(
            diagonal_solve(&[1.0, 1.0], &[0.9, 1.1], 1.0, 1.0).unwrap(),
            vec![0.0, 1.1]
        );
    }

    #[test]
    fn diagonal_solve_single_coordinate_matches_scalar_minimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let alpha = rng.gen_range(0.2..3.0);
            let lam = rng.gen_range(0.1..2.0);
            let gamma = rng.gen_range(0.05..0.95);
            let y = rng.gen_range(-5.0..5.0);
            let b = (gamma * alpha * alpha / lam).sqrt();
            let p = ScalarPenaltyParams::new(b, lam, alpha).unwrap();
            let scalar = scalar_minimize(y, &p).unwrap();
            let diag = diagonal_solve(&[alpha], &[alpha * y], lam, gamma).unwrap()[0];
            assert!((scalar - diag).abs() <= 1e-12 * (1.0 + scalar.abs()));
        }
    }

    #[test]
    fn gamma_zero_iterates_match_ista_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let a =
            DenseOperator::new(5, 7, (0..35).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let y: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let opts = IterOptions {
            tol: 1e-300,
            max_iter: 300,
            ..IterOptions::default()
        };
        let mut gmc_iters = Vec::new();
        gmc_solve_with(
            &a,
            &y,
            &SolveConfig::new(0.3, 0.0).with_opts(opts.clone()),
            |s| gmc_iters.push(s.x.clone()),
        )
        .unwrap();
        let mut ista_iters = Vec::new();
        ista_solve_with(&a, &y, 0.3, &opts, |s| ista_iters.push(s.x.clone())).unwrap();
        assert_eq!(gmc_iters.len(), ista_iters.len());
        for (p, q) in gmc_iters.iter().zip(&ista_iters) {
            assert!(p.iter().zip(q).all(|(u, v)| u.to_bits() == v.to_bits()));
        }
    }

    #[test]
    fn config_validation() {
        let a = DenseOperator::<f64>::identity(2);
        let y = [1.0, 1.0];
        assert!(gmc_solve(&a, &y, &SolveConfig::new(1.0, 1.0)).is_err());
        assert!(gmc_solve(&a, &y, &SolveConfig::new(0.0, 0.5)).is_err());
        assert!(gmc_solve(&a, &[1.0], &SolveConfig::new(1.0, 0.5)).is_err());
        // rho = 4 for gamma = 0.8, so mu must be below 0.5
        let mut cfg = SolveConfig::new(1.0, 0.8);
        cfg.opts.mu = Some(0.6);
        assert!(gmc_solve(&a, &y, &cfg).is_err());
        cfg.opts.mu = Some(0.45);
        assert!(gmc_solve(&a, &y, &cfg).is_ok());
        cfg.opts.mu = Some(0.0);
        assert!(gmc_solve(&a, &y, &cfg).is_err());
        assert!(ista_solve(&a, &y, -1.0, &IterOptions::default()).is_err());
    }

    #[test]
    fn default_step_and_bound() {
        let a = DenseOperator::diag(&[1.0, 2.0]);
        let rep = gmc_solve(&a, &[1.0, 1.0], &SolveConfig::new(1.0, 0.8)).unwrap();
        assert!((rep.rho - 16.0).abs() < 1e-8);
        assert!((rep.mu - 1.9 / 16.0).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let a = DenseOperator::from_rows(&[vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap();
        let cfg = SolveConfig::new(0.1, 0.5).with_opts(IterOptions {
            max_iter: 3,
            ..IterOptions::default()
        });
        let rep = gmc_solve(&a, &[2.0, -1.0], &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn cost_value_special_cases() {
        let a =
            DenseOperator::from_rows(&[vec![1.0, 0.5], vec![-0.2, 1.0], vec![0.3, 0.3]]).unwrap();
        let y = [1.0, -2.0, 0.5];
        let f0 = cost_value(&a, &y, 0.7, 0.8, &[0.0, 0.0]).unwrap();
        assert!((f0 - 0.5 * (1.0 + 4.0 + 0.25)).abs() < 1e-12);
        let x = [0.4, -1.1];
        let f = cost_value(&a, &y, 0.7, 0.0, &x).unwrap();
        let expect = data_misfit(&a, &y, &x).unwrap() + 0.7 * 1.5;
        assert!((f - expect).abs() < 1e-12);
    }

    #[test]
    fn cost_trace_recorded() {
        let a = DenseOperator::from_rows(&[vec![1.0, 0.5], vec![-0.2, 1.0]]).unwrap();
        let cfg = SolveConfig::new(0.5, 0.6).with_opts(IterOptions {
            trace_cost: true,
            ..IterOptions::default()
        });
        let rep = gmc_solve(&a, &[1.0, -1.0], &cfg).unwrap();
        assert_eq!(rep.cost_trace.len(), rep.iterations + 1);
        assert!(rep.cost_trace.last().unwrap() <= &rep.cost_trace[0]);
    }

    #[test]
    fn solve_is_deterministic() {
        let a = DftFrameOperator::new(16, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let y: Vec<Complex64> = (0..16)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let cfg = SolveConfig::new(0.2, 0.7);
        let r1 = gmc_solve(&a, &y, &cfg).unwrap();
        let r2 = gmc_solve(&a, &y, &cfg).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.converged);
    }

    #[test]
    fn debias_refits_support() {
        // y lies exactly in the span of the first two columns
        let a = DenseOperator::from_rows(&[
            vec![1.0, 0.0, 0.3],
            vec![0.0, 1.0, 0.3],
            vec![1.0, 1.0, 0.5],
        ])
        .unwrap();
        let y = a.apply_forward(&[2.0, -1.0, 0.0]).unwrap();
        let shrunk = [1.5, -0.7, 0.0];
        let refit = debias_support(&a, &y, &shrunk, 1e-8).unwrap();
        assert!((refit[0] - 2.0).abs() < 1e-12 && (refit[1] + 1.0).abs() < 1e-12);
        assert_eq!(refit[2], 0.0);
        assert_eq!(
            debias_support(&a, &y, &[0.0; 3], 1e-8).unwrap(),
            vec![0.0; 3]
        );
    }

    #[test]
    fn nonzero_counting() {
        assert_eq!(count_nonzero(&[0.0, 1.0, -1e-4, 2e-3], 1e-3), 2);
        assert_eq!(count_nonzero::<f64>(&[0.0, 0.0], 1e-3), 0);
    }
}
