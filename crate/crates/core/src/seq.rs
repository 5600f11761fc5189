//! Indexed sources of confidence matrices and their accumulations.
//!
//! A backward accumulation A(t, s) multiplies new factors on the left,
//! A(t, s) = A(t-1) ... A(s); a forward accumulation A(s, t) keeps them on
//! the right, A(s, t) = A(s) ... A(t-1). Both are the identity when t = s.

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, StochasticMatrix, DEFAULT_EPS_ROW};
use crate::scalar::Scalar;

/// A sequence A(0), A(1), ... of confidence matrices, addressable by step.
pub trait MatrixSource<F: Scalar>: Send + Sync {
    /// Dimension of every matrix in the sequence.
    fn dim(&self) -> usize;

    /// The factor A(t). Fails with `SourceExhausted` past the end of a
    /// finite sequence.
    fn get(&self, t: usize) -> Result<StochasticMatrix<F>>;

    /// Number of available factors, if finite.
    fn len(&self) -> Option<usize>;

    fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

/// A finite, explicitly stored sequence.
#[derive(Debug, Clone)]
pub struct ExplicitSequence<F> {
    dim: usize,
    matrices: Vec<StochasticMatrix<F>>,
}

impl<F: Scalar> ExplicitSequence<F> {
    pub fn new(matrices: Vec<StochasticMatrix<F>>) -> Result<Self> {
        let dim = match matrices.first() {
            Some(m) => m.n(),
            None => return Err(Error::EmptyMatrix),
        };
        for m in &matrices {
            if m.n() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: m.n(),
                });
            }
        }
        Ok(Self { dim, matrices })
    }

    pub fn matrices(&self) -> &[StochasticMatrix<F>] {
        &self.matrices
    }
}

impl<F: Scalar> MatrixSource<F> for ExplicitSequence<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn get(&self, t: usize) -> Result<StochasticMatrix<F>> {
        self.matrices
            .get(t)
            .cloned()
            .ok_or(Error::SourceExhausted { index: t })
    }

    fn len(&self) -> Option<usize> {
        Some(self.matrices.len())
    }
}

/// The homogeneous sequence A(t) = A for all t.
#[derive(Debug, Clone)]
pub struct ConstantSequence<F> {
    matrix: StochasticMatrix<F>,
}

impl<F: Scalar> ConstantSequence<F> {
    pub fn new(matrix: StochasticMatrix<F>) -> Self {
        Self { matrix }
    }
}

impl<F: Scalar> MatrixSource<F> for ConstantSequence<F> {
    fn dim(&self) -> usize {
        self.matrix.n()
    }

    fn get(&self, _t: usize) -> Result<StochasticMatrix<F>> {
        Ok(self.matrix.clone())
    }

    fn len(&self) -> Option<usize> {
        None
    }
}

/// Backward accumulation A(t, s) = A(t-1) ... A(s). New factors enter on the
/// left, in index order; the final product is revalidated at a tolerance
/// scaled by the factor count (row sums drift linearly with it).
pub fn backward_accumulate<F: Scalar, S: MatrixSource<F> + ?Sized>(
    seq: &S,
    s: usize,
    t: usize,
) -> Result<StochasticMatrix<F>> {
    accumulate(seq, s, t, true)
}

/// Forward accumulation A(s, t) = A(s) ... A(t-1), the mirror with reversed
/// factor order.
pub fn forward_accumulate<F: Scalar, S: MatrixSource<F> + ?Sized>(
    seq: &S,
    s: usize,
    t: usize,
) -> Result<StochasticMatrix<F>> {
    accumulate(seq, s, t, false)
}

fn accumulate<F: Scalar, S: MatrixSource<F> + ?Sized>(
    seq: &S,
    s: usize,
    t: usize,
    backward: bool,
) -> Result<StochasticMatrix<F>> {
    assert!(s <= t, "accumulation range must satisfy s <= t");
    let n = seq.dim();
    let mut acc = DenseMatrix::<F>::identity(n);
    for step in s..t {
        let factor = seq.get(step)?;
        acc = if backward {
            factor.as_dense().mul(&acc)?
        } else {
            acc.mul(factor.as_dense())?
        };
    }
    let factors = (t - s).max(1);
    let tol = F::from_f64_lossy(DEFAULT_EPS_ROW) * F::from_usize_lossy(factors);
    StochasticMatrix::from_dense(acc, tol)
}
