use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gmc::multivariate_penalties::GmcPenalty;
use gmc::operators::{DenseOperator, LinearOperator};
use gmc::solvers::{gmc_solve, gmc_solve_with, CostFunction, IterOptions, SolveConfig};

fn dense(r: &mut ChaCha8Rng, m: usize, n: usize) -> DenseOperator<f64> {
    DenseOperator::new(m, n, (0..m * n).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

// Fails: the forward-backward step acts on the saddle function, not on F, and
// F(x_i) rises in early iterations for most instances at every valid step.
#[test]
#[ignore = "F(x_i) is not monotone under the saddle iteration"]
fn cost_is_non_increasing_along_iterations() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let (m, n) = (r.gen_range(3..=10), r.gen_range(3..=10));
        let a = dense(&mut r, m, n);
        let y: Vec<f64> = (0..m).map(|_| r.gen_range(-2.0..2.0)).collect();
        let gamma = if k % 2 == 0 { 0.5 } else { 0.8 };
        let cfg = SolveConfig::new(r.gen_range(0.1..1.0), gamma).with_opts(IterOptions {
            max_iter: 300,
            trace_cost: true,
            ..IterOptions::default()
        });
        let rep = gmc_solve(&a, &y, &cfg).unwrap();
        for (i, w) in rep.cost_trace.windows(2).enumerate() {
            assert!(
                w[1] <= w[0] + 1e-9,
                "instance {k}, iteration {i}: {} -> {}",
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn cost_trace_stays_above_and_reaches_the_optimum() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let (m, n) = (r.gen_range(3..=10), r.gen_range(3..=10));
        let a = dense(&mut r, m, n);
        let y: Vec<f64> = (0..m).map(|_| r.gen_range(-2.0..2.0)).collect();
        let gamma = if k % 2 == 0 { 0.5 } else { 0.8 };
        let lam = r.gen_range(0.1..1.0);
        let opts = IterOptions {
            tol: 1e-12,
            max_iter: 1_000_000,
            ..IterOptions::default()
        };
        let best = gmc_solve(&a, &y, &SolveConfig::new(lam, gamma).with_opts(opts)).unwrap();
        assert!(best.converged);
        let f_star = CostFunction::new(&a, &y, lam, gamma)
            .unwrap()
            .value(&best.x_star)
            .unwrap();
        let cfg = SolveConfig::new(lam, gamma).with_opts(IterOptions {
            max_iter: 200_000,
            trace_cost: true,
            ..IterOptions::default()
        });
        let rep = gmc_solve(&a, &y, &cfg).unwrap();
        assert!(rep.converged, "instance {k}");
        for (i, f) in rep.cost_trace.iter().enumerate() {
            assert!(
                *f >= f_star - 1e-9,
                "instance {k}, iteration {i}: {f} below optimum {f_star}"
            );
        }
        let last = *rep.cost_trace.last().unwrap();
        assert!(
            last - f_star <= 1e-6,
            "instance {k}: {last} vs optimum {f_star}"
        );
    }
}

#[test]
fn matches_long_run_reference() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let a = dense(&mut r, 4, 6);
    let y: Vec<f64> = (0..4).map(|_| r.gen_range(-2.0..2.0)).collect();
    let (lam, gamma) = (0.3, 0.8);
    let cfg = SolveConfig::new(lam, gamma);
    let rep = gmc_solve(&a, &y, &cfg).unwrap();
    assert!(rep.converged);
    let reference = gmc_solve(
        &a,
        &y,
        &SolveConfig::new(lam, gamma).with_opts(IterOptions {
            tol: 1e-14,
            max_iter: 10_000_000,
            ..IterOptions::default()
        }),
    )
    .unwrap();
    for (p, q) in rep.x_star.iter().zip(&reference.x_star) {
        assert!((p - q).abs() <= 1e-6, "{p} vs {q}");
    }
    let f = CostFunction::new(&a, &y, lam, gamma).unwrap();
    let f0 = f.value(&reference.x_star).unwrap();
    for _ in 0..1000 {
        let x: Vec<f64> = reference
            .x_star
            .iter()
            .map(|v| v + 0.01 * r.gen_range(-1.0..1.0))
            .collect();
        assert!(f0 <= f.value(&x).unwrap() + 1e-9);
    }
}

#[test]
fn complex_solution_satisfies_optimality_conditions() {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    let (m, n) = (8, 12);
    let mut c = || Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let a = DenseOperator::new(m, n, (0..m * n).map(|_| c()).collect()).unwrap();
    let y: Vec<Complex64> = (0..m).map(|_| c() * 2.0).collect();
    let (lam, gamma) = (0.5, 0.7);
    let cfg = SolveConfig::new(lam, gamma).with_opts(IterOptions {
        tol: 1e-13,
        max_iter: 5_000_000,
        ..IterOptions::default()
    });
    let rep = gmc_solve(&a, &y, &cfg).unwrap();
    assert!(rep.converged);
    let (x, v) = (&rep.x_star, &rep.v_star);
    let mix: Vec<Complex64> = x.iter().zip(v).map(|(p, q)| p + (q - p) * gamma).collect();
    let resid: Vec<Complex64> = a
        .apply_forward(&mix)
        .unwrap()
        .iter()
        .zip(&y)
        .map(|(p, q)| q - p)
        .collect();
    let gx = a.apply_adjoint(&resid).unwrap();
    let diff: Vec<Complex64> = x.iter().zip(v).map(|(p, q)| p - q).collect();
    let gv: Vec<Complex64> = a
        .apply_adjoint(&a.apply_forward(&diff).unwrap())
        .unwrap()
        .iter()
        .map(|z| z * gamma)
        .collect();
    // complex subdifferential of lam |z|: lam z / |z| if z != 0, else the disc of radius lam
    for (z, g) in x.iter().zip(&gx).chain(v.iter().zip(&gv)) {
        if z.norm() > 0.0 {
            assert!((g - z / z.norm() * lam).norm() <= 1e-6, "{z} {g}");
        } else {
            assert!(g.norm() <= lam + 1e-6, "{g}");
        }
    }
}

#[test]
fn iterates_are_deterministic() {
    let mut r = ChaCha8Rng::seed_from_u64(14);
    let a = dense(&mut r, 6, 9);
    let y: Vec<f64> = (0..6).map(|_| r.gen_range(-2.0..2.0)).collect();
    let cfg = SolveConfig::new(0.2, 0.6);
    let run = || {
        let mut seq = Vec::new();
        gmc_solve_with(&a, &y, &cfg, |s| {
            seq.extend(s.x.iter().chain(&s.v).map(|v| v.to_bits()))
        })
        .unwrap();
        seq
    };
    assert_eq!(run(), run());
}

#[test]
fn gmc_gradient_points_away_from_origin() {
    // d psi / d x_n = sign(x_n) - [grad S_B]_n has the sign of x_n
    let mut r = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let (m, n) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let pen = GmcPenalty::new(Arc::new(dense(&mut r, m, n))).unwrap();
        let x: Vec<f64> = (0..n).map(|_| r.gen_range(-3.0..3.0)).collect();
        let g = pen.grad_generalized_huber(&x).unwrap();
        for (xi, gi) in x.iter().zip(&g) {
            assert!(
                xi.signum() * (xi.signum() - gi) >= -1e-8,
                "x = {xi}, grad S = {gi}"
            );
        }
    }
}
