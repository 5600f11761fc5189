//! Dense matrices, validated row-stochastic matrices, and the scalar
//! functionals used throughout: the coefficient of ergodicity tau, the
//! positive minimum, and the row-sum norm.

use crate::error::{Error, Result};
use crate::pattern::ZeroPattern;
use crate::scalar::Scalar;

/// Default tolerance on row sums of a validated stochastic matrix.
pub const DEFAULT_EPS_ROW: f64 = 1e-10;

/// Default threshold separating structural zeros from roundoff.
pub const DEFAULT_EPS_Z: f64 = 1e-12;

/// Default tolerance on the column spread of a consensus matrix.
pub const DEFAULT_EPS_C: f64 = 1e-9;

/// Plain dense matrix in row-major storage. Used for blocks, projections,
/// and transformed matrices that carry no stochasticity invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> DenseMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::EmptyMatrix);
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::NonSquare {
                    rows: r,
                    bad_row: i,
                    bad_len: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Plain matrix product, no stochasticity checks.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == F::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[F]) -> Result<Vec<F>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    /// Maximum absolute row sum.
    pub fn row_sum_norm(&self) -> F {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<F>())
            .fold(F::zero(), F::max)
    }

    /// Smallest entry strictly above `eps_z`, if any.
    pub fn pos_min(&self, eps_z: F) -> Option<F> {
        self.data
            .iter()
            .copied()
            .filter(|&v| v > eps_z)
            .fold(None, |acc, v| Some(acc.map_or(v, |m: F| m.min(v))))
    }

    /// Rectangular sub-block, rows `ri` and columns `ci`.
    pub fn block(&self, ri: std::ops::Range<usize>, ci: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(ri.len(), ci.len());
        for (bi, i) in ri.clone().enumerate() {
            for (bj, j) in ci.clone().enumerate() {
                out.set(bi, bj, self.get(i, j));
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> F {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(F::zero(), F::max)
    }
}

/// Validated row-stochastic square matrix: nonnegative entries, rows summing
/// to one within tolerance. This is the confidence matrix of a consensus
/// process.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<F> {
    inner: DenseMatrix<F>,
}

impl<F: Scalar> StochasticMatrix<F> {
    /// Validate raw entries. With `renormalize` set, each row is divided by
    /// its sum; otherwise rows whose sum deviates from one by more than
    /// `eps_row` are rejected (the worst row is reported).
    pub fn validate(entries: &[Vec<F>], eps_row: F, renormalize: bool) -> Result<Self> {
        let mut m = DenseMatrix::from_rows(entries)?;
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                bad_row: 0,
                bad_len: m.ncols(),
            });
        }
        let n = m.nrows();
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if v < F::zero() {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        if renormalize {
            for i in 0..n {
                let sum: F = m.row(i).iter().copied().sum();
                if sum == F::zero() {
                    return Err(Error::ZeroRow { row: i });
                }
                for j in 0..n {
                    let v = m.get(i, j) / sum;
                    m.set(i, j, v);
                }
            }
        } else {
            let mut worst: Option<(usize, F, F)> = None;
            for i in 0..n {
                let sum: F = m.row(i).iter().copied().sum();
                let dev = (sum - F::one()).abs();
                if worst.map_or(true, |(_, _, d)| dev > d) {
                    worst = Some((i, sum, dev));
                }
            }
            if let Some((row, sum, dev)) = worst {
                if dev > eps_row {
                    return Err(Error::RowSumViolation {
                        row,
                        sum: sum.to_f64().unwrap_or(f64::NAN),
                        deviation: dev.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(Self { inner: m })
    }

    /// Wrap a dense matrix that is already known to be row-stochastic,
    /// revalidating at tolerance `eps_row`.
    pub fn from_dense(m: DenseMatrix<F>, eps_row: F) -> Result<Self> {
        Self::validate(&m.to_rows(), eps_row, false)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DenseMatrix::identity(n),
        }
    }

    /// Consensus matrix with every row equal to `row` (renormalized).
    pub fn consensus_from_row(row: &[F]) -> Result<Self> {
        let rows: Vec<Vec<F>> = (0..row.len()).map(|_| row.to_vec()).collect();
        Self::validate(&rows, F::from_f64_lossy(DEFAULT_EPS_ROW), true)
    }

    pub fn n(&self) -> usize {
        self.inner.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.inner.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[F] {
        self.inner.row(i)
    }

    pub fn as_dense(&self) -> &DenseMatrix<F> {
        &self.inner
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        self.inner.to_rows()
    }

    /// Exact matrix product of two stochastic matrices. The result is
    /// revalidated without renormalization: row sums of the product are one
    /// up to roundoff.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let product = self.inner.mul(&other.inner)?;
        Self::from_dense(product, F::from_f64_lossy(DEFAULT_EPS_ROW))
    }

    /// Positivity mask: true exactly where the entry exceeds `eps_z`.
    pub fn pattern(&self, eps_z: F) -> ZeroPattern {
        let n = self.n();
        let mut mask = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                mask[i * n + j] = self.get(i, j) > eps_z;
            }
        }
        ZeroPattern::from_mask(n, mask)
    }

    pub fn has_positive_diagonal(&self, eps_z: F) -> bool {
        (0..self.n()).all(|i| self.get(i, i) > eps_z)
    }

    /// Coefficient of ergodicity: one minus the minimal overlap of two rows.
    /// Zero exactly on consensus matrices; a 1x1 matrix is trivially one of
    /// those, so its value is zero.
    pub fn tau(&self) -> F {
        let n = self.n();
        if n < 2 {
            return F::zero();
        }
        let mut min_overlap = F::infinity();
        for i in 0..n {
            for j in (i + 1)..n {
                let overlap: F = (0..n)
                    .map(|k| self.get(i, k).min(self.get(j, k)))
                    .sum();
                min_overlap = min_overlap.min(overlap);
            }
        }
        (F::one() - min_overlap).max(F::zero()).min(F::one())
    }

    /// Smallest entry strictly above `eps_z`. A stochastic matrix always has
    /// one (some entry of each row is at least 1/n).
    pub fn pos_min(&self, eps_z: F) -> F {
        self.inner
            .pos_min(eps_z)
            .expect("stochastic matrix has a positive entry")
    }

    /// Maximum absolute row sum; one for a stochastic matrix.
    pub fn row_sum_norm(&self) -> F {
        self.inner.row_sum_norm()
    }

    /// Largest column spread, max over columns of (column max - column min).
    pub fn column_spread(&self) -> F {
        let n = self.n();
        let mut spread = F::zero();
        for j in 0..n {
            let mut lo = F::infinity();
            let mut hi = F::neg_infinity();
            for i in 0..n {
                let v = self.get(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            spread = spread.max(hi - lo);
        }
        spread
    }

    /// True iff all rows agree within `eps_c` per column (rank-1 limit form).
    pub fn is_consensus(&self, eps_c: F) -> bool {
        self.column_spread() <= eps_c
    }

    /// True iff the zero pattern is symmetric (same type as the transpose).
    pub fn is_type_symmetric(&self, eps_z: F) -> bool {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if (self.get(i, j) > eps_z) != (self.get(j, i) > eps_z) {
                    return false;
                }
            }
        }
        true
    }

    /// Simultaneous row/column permutation: entry (i, j) of the result is
    /// entry (perm[i], perm[j]) of self. Stochasticity is preserved.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n();
        debug_assert_eq!(perm.len(), n);
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(perm[i], perm[j]));
            }
        }
        Self { inner: out }
    }
}

/// Real opinion vector x(t) of a consensus process.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector<F> {
    values: Vec<F>,
}

impl<F: Scalar> OpinionVector<F> {
    pub fn new(values: Vec<F>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn min(&self) -> F {
        self.values.iter().copied().fold(F::infinity(), F::min)
    }

    pub fn max(&self) -> F {
        self.values.iter().copied().fold(F::neg_infinity(), F::max)
    }

    /// One update step x -> A x. Errors on dimension mismatch.
    pub fn step(&self, a: &StochasticMatrix<F>) -> Result<Self> {
        if a.n() != self.len() {
            return Err(Error::DimensionMismatch {
                left: a.n(),
                right: self.len(),
            });
        }
        Ok(Self {
            values: a.as_dense().mul_vec(&self.values)?,
        })
    }
}
