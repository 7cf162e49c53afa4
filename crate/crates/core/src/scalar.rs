//! Field abstraction shared by operators, penalties and solvers.
//!
//! Everything numeric in this crate is generic over [`Scalar`], implemented for
//! `f64` (real field) and [`Complex64`] (complex field). The adjoint of an
//! operator over the complex field is the conjugate transpose.

use std::fmt::Debug;

use num_complex::Complex64;
use num_traits::NumAssign;

/// Which field an operator or vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

pub trait Scalar: NumAssign + Copy + Debug + PartialEq + Send + Sync + 'static {
    const FIELD: Field;

    fn from_real(r: f64) -> Self;
    /// Build from real and imaginary parts; the real field drops `im`.
    fn from_parts(re: f64, im: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    /// Modulus `|z|`.
    fn modulus(self) -> f64;
    /// `|z|^2` without the square root.
    fn norm_sqr(self) -> f64;
    fn scale(self, r: f64) -> Self;
    fn is_finite(self) -> bool;

    /// Flatten into `f64`s: one entry for real scalars, `(re, im)` for complex.
    fn push_parts(self, out: &mut Vec<f64>);
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    #[inline]
    fn from_real(r: f64) -> Self {
        r
    }
    #[inline]
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn scale(self, r: f64) -> Self {
        self * r
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn push_parts(self, out: &mut Vec<f64>) {
        out.push(self);
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    #[inline]
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    #[inline]
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn scale(self, r: f64) -> Self {
        self * r
    }
    #[inline]
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn push_parts(self, out: &mut Vec<f64>) {
        out.push(self.re);
        out.push(self.im);
    }
}

/// Inner product `<a, b> = sum a_i conj(b_i)` (conjugate-linear in `b`).
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y.conj())
}

pub fn norm2_sqr<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> f64 {
    norm2_sqr(a).sqrt()
}

/// `l1` norm, using moduli for complex entries.
pub fn norm1<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|z| z.modulus()).sum()
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|z| z.modulus()).fold(0.0, f64::max)
}

/// Sup-norm of `a - b`.
pub fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).modulus())
        .fold(0.0, f64::max)
}

pub fn zeros<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::zero(); n]
}
