//! Zero-pattern algebra. Two nonnegative matrices are of the same type when
//! their positivity masks agree; products of masks over the boolean semiring
//! track positivity of matrix products exactly (no cancellation can occur
//! between nonnegative terms).

use crate::error::{Error, Result};

/// Boolean positivity mask of a nonnegative matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZeroPattern {
    n: usize,
    mask: Vec<bool>,
}

impl ZeroPattern {
    pub fn from_mask(n: usize, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), n * n, "mask length must be n^2");
        Self { n, mask }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let n = rows.len();
        let mut mask = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "mask must be square");
            mask.extend_from_slice(row);
        }
        Self { n, mask }
    }

    /// Diagonal-only pattern (the mask of an identity matrix).
    pub fn diagonal(n: usize) -> Self {
        let mut mask = vec![false; n * n];
        for i in 0..n {
            mask[i * n + i] = true;
        }
        Self { n, mask }
    }

    pub fn all_true(n: usize) -> Self {
        Self {
            n,
            mask: vec![true; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.mask[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| self.mask[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn count_positive(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn has_positive_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i))
    }

    /// True iff every positive entry of `self` is positive in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .mask
                .iter()
                .zip(&other.mask)
                .all(|(&a, &b)| !a || b)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self {
            n: self.n,
            mask: vec![false; self.n * self.n],
        };
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Boolean semiring product: entry (i, j) is true iff some k has
    /// self(i, k) and other(k, j).
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut mask = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if !self.get(i, k) {
                    continue;
                }
                for j in 0..n {
                    if other.get(k, j) {
                        mask[i * n + j] = true;
                    }
                }
            }
        }
        Ok(Self { n, mask })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::StochasticMatrix;

    #[test]
    fn pattern_of_thresholds_entries() {
        let id = StochasticMatrix::<f64>::identity(3);
        assert_eq!(id.pattern(1e-12), ZeroPattern::diagonal(3));

        let pos = StochasticMatrix::validate(
            &[vec![0.5, 0.5], vec![0.25, 0.75]],
            1e-10,
            false,
        )
        .unwrap();
        assert_eq!(pos.pattern(1e-12), ZeroPattern::all_true(2));

        let m = StochasticMatrix::validate(
            &[vec![0.5, 0.5, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.2, 0.8]],
            1e-10,
            false,
        )
        .unwrap();
        let expected = ZeroPattern::from_rows(&[
            vec![true, true, false],
            vec![false, true, false],
            vec![false, true, true],
        ]);
        assert_eq!(m.pattern(1e-12), expected);
    }

    #[test]
    fn product_with_diagonal_is_identity_op() {
        let p = ZeroPattern::from_rows(&[
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ]);
        assert_eq!(p.product(&ZeroPattern::diagonal(3)).unwrap(), p);
        assert_eq!(ZeroPattern::diagonal(3).product(&p).unwrap(), p);
    }

    #[test]
    fn positive_diagonal_products_grow() {
        let p = ZeroPattern::from_rows(&[
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ]);
        let sq = p.product(&p).unwrap();
        assert!(p.is_subset_of(&sq));
        // Squaring adds the (0, 2) entry through k = 1.
        assert!(!p.get(0, 2));
        assert!(sq.get(0, 2));
    }

    #[test]
    fn product_dimension_mismatch() {
        let p = ZeroPattern::diagonal(2);
        let q = ZeroPattern::diagonal(3);
        assert!(matches!(
            p.product(&q),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn pattern_is_idempotent_under_renormalization() {
        // Renormalizing rows never moves an entry across the threshold as
        // long as scales stay moderate, so the derived mask is unchanged.
        let raw = vec![vec![0.25, 0.25, 0.0], vec![0.0, 2.0, 2.0], vec![0.5, 0.0, 0.5]];
        let m = StochasticMatrix::validate(&raw, 1e-10, true).unwrap();
        let again = StochasticMatrix::validate(&m.to_rows(), 1e-10, true).unwrap();
        assert_eq!(m.pattern(1e-12), again.pattern(1e-12));
    }
}
