//! Matrix-free linear operators.
//!
//! Solvers only ever touch an operator through [`LinearOperator`]: a forward
//! map `A` and its adjoint `A^H`. Concrete instances are a dense reference
//! matrix, the over-sampled inverse DFT frame and an STFT synthesis frame.

mod dense;
mod dft;
mod power;
mod stft;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

pub use dense::DenseOperator;
pub use dft::DftFrameOperator;
pub use power::{estimate_gram_norm, DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL};
pub use stft::StftFrameOperator;

/// A linear map from a `domain_dim`-vector to a `codomain_dim`-vector,
/// together with its adjoint.
///
/// Implementors provide the unchecked `*_into` kernels; callers that cannot
/// guarantee lengths go through [`apply_forward`](Self::apply_forward) and
/// [`apply_adjoint`](Self::apply_adjoint).
pub trait LinearOperator<T: Scalar>: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;

    fn field(&self) -> Field {
        T::FIELD
    }

    /// `out = A x`. Lengths are the caller's responsibility.
    fn forward_into(&self, x: &[T], out: &mut [T]);

    /// `out = A^H y`. Lengths are the caller's responsibility.
    fn adjoint_into(&self, y: &[T], out: &mut [T]);

    fn apply_forward(&self, x: &[T]) -> Result<Vec<T>> {
        check_len(self.domain_dim(), x.len())?;
        let mut out = vec![T::zero(); self.codomain_dim()];
        self.forward_into(x, &mut out);
        Ok(out)
    }

    fn apply_adjoint(&self, y: &[T]) -> Result<Vec<T>> {
        check_len(self.codomain_dim(), y.len())?;
        let mut out = vec![T::zero(); self.domain_dim()];
        self.adjoint_into(y, &mut out);
        Ok(out)
    }

    /// `out = A^H A x`, using `tmp` (length `codomain_dim`) as workspace.
    fn gram_into(&self, x: &[T], tmp: &mut [T], out: &mut [T]) {
        self.forward_into(x, tmp);
        self.adjoint_into(tmp, out);
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for Arc<O> {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }
    fn forward_into(&self, x: &[T], out: &mut [T]) {
        (**self).forward_into(x, out)
    }
    fn adjoint_into(&self, y: &[T], out: &mut [T]) {
        (**self).adjoint_into(y, out)
    }
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for &O {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }
    fn forward_into(&self, x: &[T], out: &mut [T]) {
        (**self).forward_into(x, out)
    }
    fn adjoint_into(&self, y: &[T], out: &mut [T]) {
        (**self).adjoint_into(y, out)
    }
}

/// `factor * A` for a shared operator `A` and a real `factor`.
#[derive(Clone)]
pub struct ScaledOperator<'a, T: Scalar> {
    inner: Arc<dyn LinearOperator<T> + 'a>,
    factor: f64,
}

impl<'a, T: Scalar> ScaledOperator<'a, T> {
    pub fn new(inner: Arc<dyn LinearOperator<T> + 'a>, factor: f64) -> Self {
        Self { inner, factor }
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn inner(&self) -> &Arc<dyn LinearOperator<T> + 'a> {
        &self.inner
    }
}

impl<T: Scalar> std::fmt::Debug for ScaledOperator<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScaledOperator")
            .field("rows", &self.inner.codomain_dim())
            .field("cols", &self.inner.domain_dim())
            .field("factor", &self.factor)
            .finish()
    }
}

impl<T: Scalar> LinearOperator<T> for ScaledOperator<'_, T> {
    fn domain_dim(&self) -> usize {
        self.inner.domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        self.inner.codomain_dim()
    }
    fn forward_into(&self, x: &[T], out: &mut [T]) {
        self.inner.forward_into(x, out);
        out.iter_mut().for_each(|z| *z = z.scale(self.factor));
    }
    fn adjoint_into(&self, y: &[T], out: &mut [T]) {
        self.inner.adjoint_into(y, out);
        out.iter_mut().for_each(|z| *z = z.scale(self.factor));
    }
}

/// Materialize any operator as a dense matrix by applying it to unit vectors.
pub fn to_dense<T: Scalar>(op: &dyn LinearOperator<T>) -> DenseOperator<T> {
    let (m, n) = (op.codomain_dim(), op.domain_dim());
    let mut data = vec![T::zero(); m * n];
    let mut e = vec![T::zero(); n];
    let mut col = vec![T::zero(); m];
    for j in 0..n {
        e[j] = T::one();
        op.forward_into(&e, &mut col);
        e[j] = T::zero();
        for i in 0..m {
            data[i * n + j] = col[i];
        }
    }
    DenseOperator::new(m, n, data).expect("shape is consistent by construction")
}

#[cfg(test)]
pub(crate) mod test_support {
    use rand::Rng;

    use super::*;
    use crate::scalar::dot;

    pub fn random_vec<T: Scalar, R: Rng>(rng: &mut R, n: usize) -> Vec<T> {
        (0..n)
            .map(|_| T::from_parts(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    /// Relative mismatch of `<Au, w>` against `<u, A^H w>`.
    pub fn adjoint_mismatch<T: Scalar, R: Rng>(op: &dyn LinearOperator<T>, rng: &mut R) -> f64 {
        let u: Vec<T> = random_vec(rng, op.domain_dim());
        let w: Vec<T> = random_vec(rng, op.codomain_dim());
        let au = op.apply_forward(&u).unwrap();
        let ahw = op.apply_adjoint(&w).unwrap();
        let lhs = dot(&au, &w);
        let rhs = dot(&u, &ahw);
        (lhs - rhs).modulus() / lhs.modulus().max(rhs.modulus()).max(1e-300)
    }
}
