//! Eigenvalue-one-removing projections, transformed window matrices, and
//! finite-length bounds on the joint spectral radius.
//!
//! A positive stochastic block has the simple eigenvalue one for the all-ones
//! vector. Conjugating with an orthonormal basis of the complement of that
//! vector removes the eigenvalue while keeping the rest of the spectrum, so
//! the transformed set can have an interesting joint spectral radius even
//! though every stochastic product has norm one.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gantmacher::GantmacherForm;
use crate::linalg;
use crate::matrix::{DenseMatrix, StochasticMatrix};
use crate::scalar::Scalar;

/// Orthonormal basis of the orthogonal complement of the all-ones vector,
/// as rows of an (n_k - 1) x n_k matrix.
#[derive(Debug, Clone)]
pub struct Projection<F> {
    rows: DenseMatrix<F>,
}

impl<F: Scalar> Projection<F> {
    pub fn block_size(&self) -> usize {
        self.rows.ncols()
    }

    pub fn reduced_size(&self) -> usize {
        self.rows.nrows()
    }

    pub fn as_dense(&self) -> &DenseMatrix<F> {
        &self.rows
    }
}

/// Deterministic Helmert construction: row j is proportional to
/// (1, ..., 1, -j, 0, ..., 0) with j ones, normalized. Rows are mutually
/// orthogonal, unit length, and orthogonal to the all-ones vector.
pub fn build_projection<F: Scalar>(block_size: usize) -> Result<Projection<F>> {
    if block_size < 2 {
        return Err(Error::BlockTooSmall { size: block_size });
    }
    let mut rows = DenseMatrix::zeros(block_size - 1, block_size);
    for j in 1..block_size {
        let scale = (F::from_usize_lossy(j) * F::from_usize_lossy(j + 1))
            .sqrt()
            .recip();
        for i in 0..j {
            rows.set(j - 1, i, scale);
        }
        rows.set(j - 1, j, -F::from_usize_lossy(j) * scale);
    }
    Ok(Projection { rows })
}

/// Conjugate a row-stochastic block by the projection: A' = P A P^T, of size
/// (n_k - 1) squared, with the spectrum of A minus one copy of eigenvalue 1.
pub fn transform_block<F: Scalar>(
    block: &DenseMatrix<F>,
    projection: &Projection<F>,
) -> Result<DenseMatrix<F>> {
    if !block.is_square() || block.nrows() != projection.block_size() {
        return Err(Error::DimensionMismatch {
            left: block.nrows(),
            right: projection.block_size(),
        });
    }
    let pa = projection.rows.mul(block)?;
    pa.mul(&projection.rows.transpose())
}

/// Transform a full window matrix already permuted to Gantmacher order.
///
/// Essential diagonal blocks become P_k A_k P_k^T, inessential diagonal
/// blocks stay unchanged, couplings into essential classes become
/// A_{k,l} P_l^T, and couplings between inessential classes stay unchanged.
/// The result is (n - g) x (n - g).
pub fn transform_full<F: Scalar>(
    permuted: &StochasticMatrix<F>,
    form: &GantmacherForm,
    eps_z: F,
) -> Result<DenseMatrix<F>> {
    let n = form.dim();
    if permuted.n() != n {
        return Err(Error::FormMismatch {
            reason: format!("matrix dimension {} vs form dimension {}", permuted.n(), n),
        });
    }
    let g = form.essential_count();
    let p = form.class_count();

    // Essential rows may not carry weight outside their own class.
    for k in 0..g {
        let range = form.block_range(k);
        for i in range.clone() {
            for j in 0..n {
                if !range.contains(&j) && permuted.get(i, j) > eps_z {
                    return Err(Error::FormMismatch {
                        reason: format!(
                            "essential row {i} has weight {} outside its class at column {j}",
                            permuted.get(i, j)
                        ),
                    });
                }
            }
        }
    }

    let sizes = form.partition.class_sizes();
    let projections: Vec<Option<Projection<F>>> = (0..p)
        .map(|k| {
            if k < g && sizes[k] >= 2 {
                build_projection(sizes[k]).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;

    // Output offsets: essential classes shrink by one row/column each.
    let reduced = |k: usize| if k < g { sizes[k] - 1 } else { sizes[k] };
    let mut out_offsets = vec![0usize];
    for k in 0..p {
        out_offsets.push(out_offsets[k] + reduced(k));
    }
    let m = out_offsets[p];
    debug_assert_eq!(m, n - g);

    let mut out = DenseMatrix::zeros(m, m);
    let mut write = |dst: &mut DenseMatrix<F>, r0: usize, c0: usize, b: &DenseMatrix<F>| {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                dst.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    };

    for k in 0..p {
        let rows = form.block_range(k);
        if k < g {
            if let Some(proj) = &projections[k] {
                let block = permuted.as_dense().block(rows.clone(), rows.clone());
                let t = transform_block(&block, proj)?;
                write(&mut out, out_offsets[k], out_offsets[k], &t);
            }
            continue;
        }
        for l in 0..=k {
            let cols = form.block_range(l);
            let block = permuted.as_dense().block(rows.clone(), cols.clone());
            if l < g {
                if let Some(proj) = &projections[l] {
                    let coupled = block.mul(&proj.rows.transpose())?;
                    write(&mut out, out_offsets[k], out_offsets[l], &coupled);
                }
            } else {
                write(&mut out, out_offsets[k], out_offsets[l], &block);
            }
        }
    }
    Ok(out)
}

/// Largest eigenvalue modulus of a square real matrix.
pub fn spectral_radius<F: Scalar>(m: &DenseMatrix<F>) -> Result<F> {
    linalg::spectral_radius_dense(m)
}

/// Geometric multiplicity of eigenvalue 1: the nullity of A - I at the given
/// rank threshold.
pub fn fixed_space_multiplicity<F: Scalar>(a: &StochasticMatrix<F>, tol: F) -> usize {
    let n = a.n();
    let mut shifted = a.as_dense().clone();
    for i in 0..n {
        let v = shifted.get(i, i) - F::one();
        shifted.set(i, i, v);
    }
    linalg::nullity(&shifted, tol)
}

/// Default rank threshold for `fixed_space_multiplicity`, scaled by the
/// matrix norm.
pub fn default_rank_tol<F: Scalar>(a: &StochasticMatrix<F>) -> F {
    F::from_f64_lossy(1e-8) * a.row_sum_norm()
}

/// Finite-length sandwich on the joint spectral radius of a matrix set.
#[derive(Debug, Clone)]
pub struct JsrBounds<F> {
    /// max over lengths m of max over length-m products of rho^(1/m).
    pub lower: F,
    /// min over lengths m of max over length-m products of norm^(1/m).
    pub upper: F,
    /// Largest product length enumerated.
    pub max_length: usize,
    /// Index sequence whose product attains the lower bound.
    pub witness: Vec<usize>,
    /// True when the budget stopped enumeration before the requested length.
    pub truncated: bool,
    /// Cumulative upper bounds by length (non-increasing).
    pub upper_by_length: Vec<F>,
    /// Cumulative lower bounds by length (non-decreasing).
    pub lower_by_length: Vec<F>,
}

/// Default cap on the total number of products enumerated.
pub const DEFAULT_PRODUCT_BUDGET: u64 = 1_000_000;

struct LevelResult<F> {
    max_norm: F,
    best_rho: F,
    best_path: Vec<usize>,
}

fn best_of<F: Scalar>(a: LevelResult<F>, b: LevelResult<F>) -> LevelResult<F> {
    let max_norm = a.max_norm.max(b.max_norm);
    // Strictly larger rho wins; ties keep the lexicographically smaller path
    // so results do not depend on evaluation order.
    let (best_rho, best_path) = if b.best_rho > a.best_rho
        || (b.best_rho == a.best_rho && b.best_path < a.best_path)
    {
        (b.best_rho, b.best_path)
    } else {
        (a.best_rho, a.best_path)
    };
    LevelResult {
        max_norm,
        best_rho,
        best_path,
    }
}

fn enumerate_level<F: Scalar>(
    set: &[DenseMatrix<F>],
    prefix: Vec<usize>,
    product: DenseMatrix<F>,
    remaining: usize,
) -> Result<LevelResult<F>> {
    if remaining == 0 {
        let rho = linalg::spectral_radius_dense(&product)?;
        return Ok(LevelResult {
            max_norm: product.row_sum_norm(),
            best_rho: rho,
            best_path: prefix,
        });
    }
    let mut acc: Option<LevelResult<F>> = None;
    for (j, m) in set.iter().enumerate() {
        let mut path = prefix.clone();
        path.push(j);
        let next = product.mul(m)?;
        let res = enumerate_level(set, path, next, remaining - 1)?;
        acc = Some(match acc {
            None => res,
            Some(prev) => best_of(prev, res),
        });
    }
    Ok(acc.expect("nonempty matrix set"))
}

/// Compute the standard norm/spectral-radius sandwich on the joint spectral
/// radius by exhaustive enumeration of all products up to `max_length`,
/// subject to a total product budget. Only fully enumerated lengths
/// contribute, so the bounds are deterministic regardless of parallel
/// evaluation order; if the budget cuts enumeration short the result is
/// flagged `truncated`.
pub fn jsr_bounds<F: Scalar>(
    set: &[DenseMatrix<F>],
    max_length: usize,
    budget: u64,
) -> Result<JsrBounds<F>> {
    if set.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    assert!(max_length >= 1, "jsr_bounds needs max_length >= 1");
    let dim = set[0].nrows();
    for m in set {
        if !m.is_square() || m.nrows() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: m.nrows(),
            });
        }
    }

    // Longest fully affordable length.
    let card = set.len() as u128;
    let mut affordable = 0usize;
    let mut total: u128 = 0;
    let mut level_count: u128 = 1;
    for _ in 1..=max_length {
        level_count = level_count.saturating_mul(card);
        total = total.saturating_add(level_count);
        if total > budget as u128 {
            break;
        }
        affordable += 1;
    }
    if affordable == 0 {
        return Err(Error::Explosion {
            needed: card,
            budget,
        });
    }
    let truncated = affordable < max_length;

    let mut upper_by_length = Vec::with_capacity(affordable);
    let mut lower_by_length = Vec::with_capacity(affordable);
    let mut best_rho = F::neg_infinity();
    let mut best_path: Vec<usize> = Vec::new();
    let mut upper = F::infinity();

    for length in 1..=affordable {
        let level = set
            .par_iter()
            .enumerate()
            .map(|(j, m)| enumerate_level(set, vec![j], m.clone(), length - 1))
            .try_reduce_with(|a, b| Ok(best_of(a, b)))
            .expect("nonempty matrix set")?;

        let exponent = F::from_usize_lossy(length).recip();
        let norm_root = level.max_norm.powf(exponent);
        let rho_root = level.best_rho.max(F::zero()).powf(exponent);

        upper = upper.min(norm_root);
        if rho_root > best_rho {
            best_rho = rho_root;
            best_path = level.best_path;
        }
        upper_by_length.push(upper);
        lower_by_length.push(best_rho);
    }

    Ok(JsrBounds {
        lower: best_rho,
        upper,
        max_length: affordable,
        witness: best_path,
        truncated,
        upper_by_length,
        lower_by_length,
    })
}
