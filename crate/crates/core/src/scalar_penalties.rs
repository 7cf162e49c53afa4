//! Scalar building blocks: soft and firm thresholds, the (scaled) Huber
//! function and the (scaled) minimax-concave penalty.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Soft threshold with a closed dead zone `|y| <= lam`.
///
/// Real input: `(|y| - lam) sign(y)`. Complex input shrinks the modulus,
/// `(1 - lam / |y|) y`, which is the proximity operator of `lam |.|` on the
/// complex plane.
pub fn soft<T: Scalar>(y: T, lam: f64) -> Result<T> {
    if !(lam >= 0.0) {
        return Err(invalid("lam", format!("threshold must be >= 0, got {lam}")));
    }
    Ok(shrink(y, lam))
}

/// [`soft`] without the threshold check.
#[inline]
pub(crate) fn shrink<T: Scalar>(y: T, lam: f64) -> T {
    let m = y.modulus();
    if m <= lam {
        return T::zero();
    }
    match T::FIELD {
        crate::scalar::Field::Real => {
            let r = y.re();
            T::from_real(if r > 0.0 { r - lam } else { r + lam })
        }
        crate::scalar::Field::Complex => y.scale(1.0 - lam / m),
    }
}

/// Element-wise soft threshold, in place.
pub(crate) fn shrink_slice<T: Scalar>(v: &mut [T], lam: f64) {
    v.iter_mut().for_each(|z| *z = shrink(*z, lam));
}

/// Huber function: `x^2 / 2` for `|x| <= 1`, `|x| - 1/2` otherwise.
pub fn huber(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        0.5 * x * x
    } else {
        a - 0.5
    }
}

/// Huber function as the pointwise minimum of a parabola and two shifted
/// absolute values.
pub fn huber_via_min3(x: f64) -> f64 {
    (0.5 * x * x)
        .min((x - 1.0).abs() + 0.5)
        .min((x + 1.0).abs() + 0.5)
}

/// Scaled Huber function `s_b(x) = s(b^2 x) / b^2`, with `s_0 = 0`.
pub fn scaled_huber(x: f64, b: f64) -> f64 {
    huber_mc_split(x, b).0
}

/// Scaled MC penalty `phi_b(x) = |x| - s_b(x)`.
///
/// Saturates at `1 / (2 b^2)` for `|x| >= 1 / b^2`; `phi_0 = |x|`.
pub fn scaled_mc(x: f64, b: f64) -> f64 {
    huber_mc_split(x, b).1
}

/// `(s_b(x), phi_b(x))`, chosen within a few ulps of the formulas so that
/// `s + phi == |x|` holds in floating point.
fn huber_mc_split(x: f64, b: f64) -> (f64, f64) {
    let b2 = b * b;
    let a = x.abs();
    if b2 == 0.0 {
        return (0.0, a);
    }
    if a <= 1.0 / b2 {
        exact_split(a, 0.5 * b2 * x * x)
    } else {
        let (phi, s) = exact_split(a, 0.5 / b2);
        (s, phi)
    }
}

/// `(p, q)` with `p` near `p0`, `q` near `a - p0` and `p + q == a`.
///
/// Adjusting `q` alone is not always enough: when `p0` sits half an ulp of
/// `a` off the grid every candidate sum is a rounding tie, so `p` moves too.
fn exact_split(a: f64, p0: f64) -> (f64, f64) {
    let mut up = p0;
    let mut down = p0;
    for k in 0..7 {
        let p = if k == 0 {
            p0
        } else if k % 2 == 1 {
            up = up.next_up();
            up
        } else {
            down = down.next_down();
            down
        };
        let mut q = a - p;
        for _ in 0..4 {
            let sum = p + q;
            if sum == a {
                return (p, q);
            }
            q = if sum > a { q.next_down() } else { q.next_up() };
        }
    }
    (p0, a - p0)
}

/// Parameters of the scalar cost `f(x) = (y - a x)^2 / 2 + lam * phi_b(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarPenaltyParams {
    b: f64,
    lam: f64,
    a: f64,
}

impl ScalarPenaltyParams {
    /// `lam > 0`; `a` and `b` finite. Only `b^2` matters, so `b` is stored as `|b|`.
    pub fn new(b: f64, lam: f64, a: f64) -> Result<Self> {
        if !(lam > 0.0) || !lam.is_finite() {
            return Err(invalid(
                "lam",
                format!("must be positive and finite, got {lam}"),
            ));
        }
        if !b.is_finite() {
            return Err(invalid("b", format!("must be finite, got {b}")));
        }
        if !a.is_finite() {
            return Err(invalid("a", format!("must be finite, got {a}")));
        }
        Ok(Self { b: b.abs(), lam, a })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// The scalar cost `f(x)` these parameters define, for data `y`.
    pub fn cost(&self, y: f64, x: f64) -> f64 {
        let r = y - self.a * x;
        0.5 * r * r + self.lam * scaled_mc(x, self.b)
    }
}

/// `f` is convex iff `b^2 <= a^2 / lam`.
pub fn scalar_convexity_holds(params: &ScalarPenaltyParams) -> bool {
    params.b * params.b <= params.a * params.a / params.lam
}

/// Thresholds of the firm threshold function, `mu > lam > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmParams {
    lam: f64,
    mu: f64,
}

impl FirmParams {
    pub fn new(lam: f64, mu: f64) -> Result<Self> {
        if !(lam > 0.0) {
            return Err(invalid("lam", format!("must be positive, got {lam}")));
        }
        if !(mu > lam) {
            return Err(invalid("mu", format!("must exceed lam = {lam}, got {mu}")));
        }
        Ok(Self { lam, mu })
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Firm threshold: zero on `|y| <= lam`, identity on `|y| >= mu`, linear in
/// between.
pub fn firm(y: f64, params: &FirmParams) -> f64 {
    let (lam, mu) = (params.lam, params.mu);
    let a = y.abs();
    if a <= lam {
        0.0
    } else if a <= mu {
        (mu * (a - lam) / (mu - lam)).copysign(y)
    } else {
        y
    }
}

/// Global minimizer of `(y - a x)^2 / 2 + lam * phi_b(x)` under the
/// convexity condition `b^2 <= a^2 / lam`, i.e. `firm(y / a; lam / a^2, 1 / b^2)`.
///
/// `b = 0` reduces the penalty to `|x|` and the minimizer to
/// `soft(y / a, lam / a^2)`. At the boundary `b^2 = a^2 / lam` the firm
/// thresholds coincide and the result is the hard-threshold limit.
pub fn scalar_minimize(y: f64, params: &ScalarPenaltyParams) -> Result<f64> {
    let ScalarPenaltyParams { b, lam, a } = *params;
    if !(a > 0.0) {
        return Err(invalid("a", format!("must be positive, got {a}")));
    }
    if !scalar_convexity_holds(params) {
        return Err(invalid(
            "b",
            format!(
                "b^2 = {} exceeds a^2/lam = {}; cost is not convex",
                b * b,
                a * a / lam
            ),
        ));
    }
    let z = y / a;
    let t = lam / (a * a);
    if b == 0.0 {
        return Ok(shrink(z, t));
    }
    let mu = 1.0 / (b * b);
    if mu > t {
        Ok(firm(z, &FirmParams { lam: t, mu }))
    } else {
        Ok(hard(z, t))
    }
}

pub(crate) fn hard(y: f64, lam: f64) -> f64 {
    if y.abs() <= lam {
        0.0
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
        let n = ((hi - lo) / step).round() as usize;
        (0..=n).map(move |i| lo + i as f64 * step)
    }

    /// Brute-force argmin of a scalar function on a uniform grid.
    fn grid_argmin(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for x in grid(lo, hi, step) {
            let v = f(x);
            if v < best.0 {
                best = (v, x);
            }
        }
        best.1
    }

    #[test]
    fn soft_examples() {
        assert_eq!(soft(3.0, 1.0).unwrap(), 2.0);
        assert_eq!(soft(-3.0, 1.0).unwrap(), -2.0);
        assert_eq!(soft(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(soft(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(
            soft(Complex64::new(4.0, 3.0), 5.0).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let z = soft(Complex64::new(6.0, 8.0), 5.0).unwrap();
        assert!((z - Complex64::new(3.0, 4.0)).norm() < 1e-15);
        assert!(soft(1.0, -0.1).is_err());
    }

    #[test]
    fn complex_soft_matches_grid_oracle() {
        let lam = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let y = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let step = 2e-3;
            let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
            for re in grid(-3.5, 3.5, step) {
                for im in grid(-3.5, 3.5, step) {
                    let v = Complex64::new(re, im);
                    let c = lam * v.norm() + 0.5 * (y - v).norm_sqr();
                    if c < best.0 {
                        best = (c, v);
                    }
                }
            }
            let got = soft(y, lam).unwrap();
            assert!(
                (got - best.1).norm() <= 2.0 * step,
                "{y}: {got} vs {}",
                best.1
            );
        }
    }

    #[test]
    fn huber_examples() {
        assert_eq!(huber(0.0), 0.0);
        assert_eq!(huber(0.5), 0.125);
        assert_eq!(huber(-2.0), 1.5);
        assert_eq!(huber_via_min3(0.5), 0.125);
        assert_eq!(huber_via_min3(2.0), 1.5);
        assert_eq!(huber_via_min3(-3.0), 2.5);
    }

    #[test]
    fn huber_equals_min_of_three_on_grid() {
        for x in grid(-5.0, 5.0, 1e-3) {
            assert_eq!(huber(x), huber_via_min3(x), "x = {x}");
        }
    }

    #[test]
    fn scaled_examples() {
        assert!((scaled_huber(0.1, 2.0) - 0.02).abs() < 1e-15);
        assert_eq!(scaled_huber(1.0, 2.0), 0.875);
        assert_eq!(scaled_huber(7.0, 0.0), 0.0);
        assert_eq!(scaled_mc(3.0, 0.0), 3.0);
        assert_eq!(scaled_mc(1.0, 2.0), 0.125);
        assert_eq!(scaled_mc(-5.0, 1.0), 0.5);
        // sign of b is irrelevant
        assert_eq!(scaled_huber(0.3, -2.0), scaled_huber(0.3, 2.0));
    }

    #[test]
    fn scaled_huber_bounds_and_limits() {
        for b in [0.0, 0.5, 1.0, 2.0, 5.0] {
            for x in grid(-5.0, 5.0, 1e-2) {
                let s = scaled_huber(x, b);
                assert!(s >= 0.0 && s <= x.abs(), "b={b} x={x}");
                assert_eq!(scaled_mc(x, b) + s, x.abs());
            }
        }
        for x in grid(-5.0, 5.0, 1e-2).filter(|x| x.abs() >= 0.1) {
            assert!((scaled_huber(x, 1e3) - x.abs()).abs() <= 1e-5);
        }
        for x in grid(-5.0, 5.0, 1e-2) {
            assert!(scaled_huber(x, 1e-8) <= 1e-14);
        }
    }

    #[test]
    fn scaled_huber_is_an_infimal_convolution() {
        for b in [0.5, 1.0, 2.0] {
            for x in grid(-3.0, 3.0, 0.25) {
                let step = 1e-4;
                let oracle = grid(-4.0, 4.0, step)
                    .map(|v| v.abs() + 0.5 * b * b * (x - v) * (x - v))
                    .fold(f64::INFINITY, f64::min);
                assert!((scaled_huber(x, b) - oracle).abs() <= 1e-6, "b={b} x={x}");
            }
        }
    }

    #[test]
    fn convexity_condition() {
        let p = |a, lam, b| ScalarPenaltyParams::new(b, lam, a).unwrap();
        assert!(scalar_convexity_holds(&p(1.0, 1.0, 1.0)));
        assert!(!scalar_convexity_holds(&p(1.0, 1.0, 1.01)));
        assert!(scalar_convexity_holds(&p(2.0, 2.0, 1.4)));
        assert!(ScalarPenaltyParams::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn firm_examples_and_validation() {
        let p = FirmParams::new(1.0, 2.0).unwrap();
        assert_eq!(firm(0.5, &p), 0.0);
        assert_eq!(firm(1.5, &p), 1.0);
        assert_eq!(firm(-1.5, &p), -1.0);
        assert_eq!(firm(3.0, &p), 3.0);
        assert!(FirmParams::new(1.0, 1.0).is_err());
        assert!(FirmParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn firm_continuous_monotone_and_limits() {
        let p = FirmParams::new(0.7, 1.9).unwrap();
        let ys: Vec<f64> = grid(-4.0, 4.0, 1e-3).collect();
        for w in ys.windows(2) {
            let (f0, f1) = (firm(w[0], &p), firm(w[1], &p));
            assert!(f1 >= f0);
            // slope is at most mu / (mu - lam)
            assert!(f1 - f0 <= (1.9 / 1.2) * 1e-3 + 1e-12);
        }
        let soft_limit = FirmParams::new(1.0, 1e6).unwrap();
        let hard_limit = FirmParams::new(1.0, 1.0 + 1e-9).unwrap();
        for &y in &ys {
            assert!((firm(y, &soft_limit) - shrink(y, 1.0)).abs() <= 1e-5);
            if (y.abs() - 1.0).abs() > 1e-3 {
                assert_eq!(firm(y, &hard_limit), hard(y, 1.0));
            }
        }
    }

    #[test]
    fn scalar_minimize_examples() {
        let p = ScalarPenaltyParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(scalar_minimize(0.5, &p).unwrap(), 0.0);
        assert_eq!(scalar_minimize(10.0, &p).unwrap(), 10.0);

        let p = ScalarPenaltyParams::new(0.9, 1.0, 1.0).unwrap();
        let oracle = grid_argmin(|x| p.cost(1.3, x), -3.0, 3.0, 1e-5);
        let got = scalar_minimize(1.3, &p).unwrap();
        assert!((got - oracle).abs() <= 1e-5, "{got} vs {oracle}");
    }

    #[test]
    fn scalar_minimize_rejects_nonconvex_and_bad_a() {
        let p = ScalarPenaltyParams::new(1.5, 1.0, 1.0).unwrap();
        assert!(scalar_minimize(1.0, &p).is_err());
        let p = ScalarPenaltyParams::new(0.5, 1.0, -1.0).unwrap();
        assert!(scalar_minimize(1.0, &p).is_err());
    }

    #[test]
    fn scalar_minimize_with_zero_b_is_soft() {
        let p = ScalarPenaltyParams::new(0.0, 1.0, 2.0).unwrap();
        assert_eq!(scalar_minimize(3.0, &p).unwrap(), shrink(1.5, 0.25));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(5000))]
        #[test]
        fn mc_plus_huber_is_abs_exactly(x in -50.0f64..50.0, b in 0.0f64..10.0) {
            prop_assert_eq!(scaled_mc(x, b) + scaled_huber(x, b), x.abs());
        }
    }

    proptest! {
        #[test]
        fn scalar_minimize_is_a_global_minimizer(
            y in -3.0f64..3.0,
            a in 0.5f64..2.0,
            lam in 0.1f64..2.0,
            frac in 0.05f64..1.0,
        ) {
            let b = (frac * a * a / lam).sqrt();
            let p = ScalarPenaltyParams::new(b, lam, a).unwrap();
            let x = scalar_minimize(y, &p).unwrap();
            let fx = p.cost(y, x);
            for probe in grid(-6.0, 6.0, 1e-2) {
                prop_assert!(fx <= p.cost(y, probe) + 1e-12);
            }
        }
    }
}
