//! Small dense linear algebra kernel: eigenvalues of a general real matrix
//! via Householder-Hessenberg reduction followed by the implicit double-shift
//! QR iteration (the classic EISPACK/JAMA scheme, eigenvalues only), plus a
//! full-pivoting rank computation.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITER_PER_EIGENVALUE: usize = 80;

/// Eigenvalues of a square real matrix as (re, im) pairs, in deflation order.
/// Complex eigenvalues come in conjugate pairs.
pub fn eigenvalues<F: Scalar>(m: &DenseMatrix<F>) -> Result<Vec<(F, F)>> {
    assert!(m.is_square(), "eigenvalues need a square matrix");
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![(m.get(0, 0), F::zero())]);
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    hqr_eigenvalues(&mut h)
}

/// Largest eigenvalue modulus. Zero for the empty matrix.
pub fn spectral_radius_dense<F: Scalar>(m: &DenseMatrix<F>) -> Result<F> {
    let eig = eigenvalues(m)?;
    Ok(eig
        .iter()
        .map(|&(re, im)| (re * re + im * im).sqrt())
        .fold(F::zero(), F::max))
}

/// Householder reduction to upper Hessenberg form, in place. Similarity
/// transformation, so the spectrum is unchanged.
fn hessenberg<F: Scalar>(h: &mut DenseMatrix<F>) {
    let n = h.nrows();
    let high = n - 1;
    let mut ort = vec![F::zero(); n];

    for m in 1..high {
        let mut scale = F::zero();
        for i in m..=high {
            scale = scale + h.get(i, m - 1).abs();
        }
        if scale == F::zero() {
            continue;
        }

        let mut sq = F::zero();
        for i in (m..=high).rev() {
            ort[i] = h.get(i, m - 1) / scale;
            sq = sq + ort[i] * ort[i];
        }
        let mut g = sq.sqrt();
        if ort[m] > F::zero() {
            g = -g;
        }
        let denom = sq - ort[m] * g;
        ort[m] = ort[m] - g;

        // H <- (I - u u^T / denom) H (I - u u^T / denom)
        for j in m..n {
            let mut f = F::zero();
            for i in (m..=high).rev() {
                f = f + ort[i] * h.get(i, j);
            }
            f = f / denom;
            for i in m..=high {
                let v = h.get(i, j) - f * ort[i];
                h.set(i, j, v);
            }
        }
        for i in 0..=high {
            let mut f = F::zero();
            for j in (m..=high).rev() {
                f = f + ort[j] * h.get(i, j);
            }
            f = f / denom;
            for j in m..=high {
                let v = h.get(i, j) - f * ort[j];
                h.set(i, j, v);
            }
        }
        h.set(m, m - 1, scale * g);
    }

    // Zero out the entries below the first subdiagonal left by the reduction.
    for i in 2..n {
        for j in 0..(i - 1) {
            h.set(i, j, F::zero());
        }
    }
}

/// Implicit double-shift QR on an upper Hessenberg matrix; returns (re, im)
/// eigenvalue pairs. Consumes the matrix.
#[allow(clippy::many_single_char_names)]
fn hqr_eigenvalues<F: Scalar>(hm: &mut DenseMatrix<F>) -> Result<Vec<(F, F)>> {
    let nn = hm.nrows();
    let mut d = vec![F::zero(); nn];
    let mut e = vec![F::zero(); nn];

    let low: isize = 0;
    let eps = F::epsilon();
    let mut exshift = F::zero();
    let mut p = F::zero();
    let mut q = F::zero();
    let mut r = F::zero();
    let mut s;
    let mut z;
    let (mut w, mut x, mut y);

    let mut norm = F::zero();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm = norm + hm.get(i, j).abs();
        }
    }

    let h = |m: &DenseMatrix<F>, i: isize, j: isize| m.get(i as usize, j as usize);

    let mut n: isize = nn as isize - 1;
    let mut iter = 0usize;
    while n >= low {
        // Look for a single small subdiagonal element.
        let mut l = n;
        while l > low {
            s = h(hm, l - 1, l - 1).abs() + h(hm, l, l).abs();
            if s == F::zero() {
                s = norm;
            }
            if h(hm, l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One real root.
            let v = h(hm, n, n) + exshift;
            hm.set(n as usize, n as usize, v);
            d[n as usize] = v;
            e[n as usize] = F::zero();
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // A 2x2 block: real or complex conjugate pair.
            w = h(hm, n, n - 1) * h(hm, n - 1, n);
            p = (h(hm, n - 1, n - 1) - h(hm, n, n)) / F::from_f64_lossy(2.0);
            q = p * p + w;
            z = q.abs().sqrt();
            let vnn = h(hm, n, n) + exshift;
            hm.set(n as usize, n as usize, vnn);
            let vn1 = h(hm, n - 1, n - 1) + exshift;
            hm.set(n as usize - 1, n as usize - 1, vn1);
            x = vnn;

            if q >= F::zero() {
                z = if p >= F::zero() { p + z } else { p - z };
                d[n as usize - 1] = x + z;
                d[n as usize] = d[n as usize - 1];
                if z != F::zero() {
                    d[n as usize] = x - w / z;
                }
                e[n as usize - 1] = F::zero();
                e[n as usize] = F::zero();
            } else {
                d[n as usize - 1] = x + p;
                d[n as usize] = x + p;
                e[n as usize - 1] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // Form shift.
            x = h(hm, n, n);
            y = F::zero();
            w = F::zero();
            if l < n {
                y = h(hm, n - 1, n - 1);
                w = h(hm, n, n - 1) * h(hm, n - 1, n);
            }

            // Exceptional shift after 10 stalled iterations.
            if iter == 10 {
                exshift = exshift + x;
                for i in low..=n {
                    let v = h(hm, i, i) - x;
                    hm.set(i as usize, i as usize, v);
                }
                s = h(hm, n, n - 1).abs() + h(hm, n - 1, n - 2).abs();
                x = F::from_f64_lossy(0.75) * s;
                y = x;
                w = F::from_f64_lossy(-0.4375) * s * s;
            }

            // Second exceptional shift.
            if iter == 30 {
                s = (y - x) / F::from_f64_lossy(2.0);
                s = s * s + w;
                if s > F::zero() {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / F::from_f64_lossy(2.0) + s);
                    for i in low..=n {
                        let v = h(hm, i, i) - s;
                        hm.set(i as usize, i as usize, v);
                    }
                    exshift = exshift + s;
                    w = F::from_f64_lossy(0.964);
                    x = w;
                    y = w;
                }
            }

            iter += 1;
            if iter > MAX_ITER_PER_EIGENVALUE {
                return Err(Error::EigenSolverFailure { iterations: iter });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = n - 2;
            while m >= l {
                z = h(hm, m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h(hm, m + 1, m) + h(hm, m, m + 1);
                q = h(hm, m + 1, m + 1) - z - r - s;
                r = h(hm, m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                if h(hm, m, m - 1).abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h(hm, m - 1, m - 1).abs() + z.abs() + h(hm, m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                hm.set(i as usize, i as usize - 2, F::zero());
                if i > m + 2 {
                    hm.set(i as usize, i as usize - 3, F::zero());
                }
            }

            // Double QR sweep on rows l..=n, columns m..=n.
            for k in m..n {
                let notlast = k != n - 1;
                if k != m {
                    p = h(hm, k, k - 1);
                    q = h(hm, k + 1, k - 1);
                    r = if notlast {
                        h(hm, k + 2, k - 1)
                    } else {
                        F::zero()
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == F::zero() {
                        continue;
                    }
                    p = p / x;
                    q = q / x;
                    r = r / x;
                }

                s = (p * p + q * q + r * r).sqrt();
                if p < F::zero() {
                    s = -s;
                }
                if s != F::zero() {
                    if k != m {
                        hm.set(k as usize, k as usize - 1, -s * x);
                    } else if l != m {
                        let v = -h(hm, k, k - 1);
                        hm.set(k as usize, k as usize - 1, v);
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;

                    for j in (k as usize)..nn {
                        let mut pj = hm.get(k as usize, j) + q * hm.get(k as usize + 1, j);
                        if notlast {
                            pj = pj + r * hm.get(k as usize + 2, j);
                            let v = hm.get(k as usize + 2, j) - pj * z;
                            hm.set(k as usize + 2, j, v);
                        }
                        let v0 = hm.get(k as usize, j) - pj * x;
                        hm.set(k as usize, j, v0);
                        let v1 = hm.get(k as usize + 1, j) - pj * y;
                        hm.set(k as usize + 1, j, v1);
                    }

                    let imax = n.min(k + 3) as usize;
                    for i in 0..=imax {
                        let mut pi =
                            x * hm.get(i, k as usize) + y * hm.get(i, k as usize + 1);
                        if notlast {
                            pi = pi + z * hm.get(i, k as usize + 2);
                            let v = hm.get(i, k as usize + 2) - pi * r;
                            hm.set(i, k as usize + 2, v);
                        }
                        let v0 = hm.get(i, k as usize) - pi;
                        hm.set(i, k as usize, v0);
                        let v1 = hm.get(i, k as usize + 1) - pi * q;
                        hm.set(i, k as usize + 1, v1);
                    }
                }
            }
        }
    }

    Ok(d.into_iter().zip(e).collect())
}

/// Rank by Gaussian elimination with full pivoting: pivots below `tol` in
/// magnitude are treated as zero.
pub fn rank<F: Scalar>(m: &DenseMatrix<F>, tol: F) -> usize {
    let mut a = m.clone();
    let rows = a.nrows();
    let cols = a.ncols();
    let steps = rows.min(cols);
    let mut rk = 0;

    let mut row_perm: Vec<usize> = (0..rows).collect();
    let mut col_perm: Vec<usize> = (0..cols).collect();

    for step in 0..steps {
        let mut best = tol;
        let mut pivot: Option<(usize, usize)> = None;
        for i in step..rows {
            for j in step..cols {
                let v = a.get(row_perm[i], col_perm[j]).abs();
                if v > best {
                    best = v;
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        row_perm.swap(step, pi);
        col_perm.swap(step, pj);
        rk += 1;

        let piv = a.get(row_perm[step], col_perm[step]);
        for i in (step + 1)..rows {
            let f = a.get(row_perm[i], col_perm[step]) / piv;
            if f == F::zero() {
                continue;
            }
            for j in step..cols {
                let v = a.get(row_perm[i], col_perm[j]) - f * a.get(row_perm[step], col_perm[j]);
                a.set(row_perm[i], col_perm[j], v);
            }
        }
    }
    rk
}

/// Nullspace dimension of a square matrix at threshold `tol`.
pub fn nullity<F: Scalar>(m: &DenseMatrix<F>, tol: F) -> usize {
    m.ncols() - rank(m, tol)
}

/// Greedy optimal-ish matching of two complex multisets: pairs each value of
/// `a` with the nearest unused value of `b` and reports the largest matched
/// distance. `None` when the lengths differ. For multisets that agree within
/// a tolerance well below the separation of distinct values, the greedy
/// matching attains the optimum.
pub fn match_spectra<F: Scalar>(a: &[(F, F)], b: &[(F, F)]) -> Option<F> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = F::zero();
    for &(re, im) in a {
        let mut best: Option<(usize, F)> = None;
        for (j, &(bre, bim)) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dr = re - bre;
            let di = im - bim;
            let dist = (dr * dr + di * di).sqrt();
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((j, dist));
            }
        }
        let (j, dist) = best?;
        used[j] = true;
        worst = worst.max(dist);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dm(rows: &[&[f64]]) -> DenseMatrix<f64> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(&rows).unwrap()
    }

    fn sorted_moduli(eig: &[(f64, f64)]) -> Vec<f64> {
        let mut m: Vec<f64> = eig
            .iter()
            .map(|&(re, im)| (re * re + im * im).sqrt())
            .collect();
        m.sort_by(|a, b| a.partial_cmp(b).unwrap());
        m
    }

    #[test]
    fn triangular_eigenvalues_are_the_diagonal() {
        let m = dm(&[
            &[0.5, 0.0, 0.0],
            &[0.1, 0.9, 0.0],
            &[0.2, 0.3, -0.25],
        ]);
        let eig = eigenvalues(&m).unwrap();
        let expected = vec![(-0.25, 0.0), (0.5, 0.0), (0.9, 0.0)];
        let worst = match_spectra(&eig, &expected).unwrap();
        assert!(worst < 1e-12, "worst match {worst}");
    }

    #[test]
    fn rotation_gives_conjugate_pair() {
        // [[0, 1], [-1, 0]] has eigenvalues +-i.
        let m = dm(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let eig = eigenvalues(&m).unwrap();
        let expected = vec![(0.0, 1.0), (0.0, -1.0)];
        assert!(match_spectra(&eig, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn companion_matrix_cube_roots_of_unity() {
        let m = dm(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let eig = eigenvalues(&m).unwrap();
        let half_sqrt3 = 3f64.sqrt() / 2.0;
        let expected = vec![(1.0, 0.0), (-0.5, half_sqrt3), (-0.5, -half_sqrt3)];
        assert!(match_spectra(&eig, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn stochastic_spectral_radius_is_one() {
        let m = dm(&[&[0.8, 0.2], &[0.3, 0.7]]);
        assert_abs_diff_eq!(spectral_radius_dense(&m).unwrap(), 1.0, epsilon = 1e-12);
        let eig = eigenvalues(&m).unwrap();
        assert!(match_spectra(&eig, &[(1.0, 0.0), (0.5, 0.0)]).unwrap() < 1e-12);
    }

    #[test]
    fn dimension_edge_cases() {
        assert_eq!(eigenvalues(&DenseMatrix::<f64>::zeros(0, 0)).unwrap(), vec![]);
        let one = dm(&[&[0.75]]);
        assert_eq!(eigenvalues(&one).unwrap(), vec![(0.75, 0.0)]);
        assert_eq!(spectral_radius_dense(&DenseMatrix::<f64>::zeros(0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn moduli_of_4x4_permutation() {
        // Cyclic permutation: eigenvalues are the 4th roots of unity.
        let m = dm(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
        ]);
        let eig = eigenvalues(&m).unwrap();
        for v in sorted_moduli(&eig) {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rank_and_nullity() {
        let id = DenseMatrix::<f64>::identity(4);
        assert_eq!(rank(&id, 1e-10), 4);
        assert_eq!(nullity(&id, 1e-10), 0);

        let zero = DenseMatrix::<f64>::zeros(3, 3);
        assert_eq!(nullity(&zero, 1e-10), 3);

        // Rank-1 matrix.
        let r1 = dm(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(rank(&r1, 1e-10), 1);
        assert_eq!(nullity(&r1, 1e-10), 1);
    }

    #[test]
    fn match_spectra_handles_reordered_multisets() {
        let a = vec![(0.0, 1.0), (1e-13, -1.0)];
        let b = vec![(1e-13, -1.0), (0.0, 1.0)];
        assert!(match_spectra(&a, &b).unwrap() < 1e-12);
        assert!(match_spectra(&a, &[(0.0, 1.0)]).is_none());
    }
}
