//! Null-space bases through Householder QR with column pivoting.
//!
//! For a sensing matrix `A` of shape `(n-m) x n` the factorization
//! `Aᵀ P = Q R` splits `Q` into a range part (first `n-m` columns) and its
//! orthogonal complement, which is the returned basis `H` (`n x m`).

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone)]
pub struct NullBasis {
    pub h: DenseMatrix,
    /// `max |A·H|` of the returned basis.
    pub residual: f64,
}

struct PivotedQr {
    rows: usize,
    /// Unit Householder vectors; vector `j` acts on coordinates `j..rows`.
    reflectors: Vec<Vec<f64>>,
    r_diag: Vec<f64>,
}

impl PivotedQr {
    fn factor(m: &DenseMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut w = m.clone();
        let steps = rows.min(cols);
        let mut reflectors = Vec::with_capacity(steps);
        let mut r_diag = Vec::with_capacity(steps);

        for j in 0..steps {
            let norm_sq =
                |w: &DenseMatrix, c: usize| (j..rows).map(|i| w[(i, c)].powi(2)).sum::<f64>();
            let (pivot, _) = (j..cols)
                .map(|c| (c, norm_sq(&w, c)))
                .fold(
                    (j, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pivot != j {
                for i in 0..rows {
                    let tmp = w[(i, j)];
                    w[(i, j)] = w[(i, pivot)];
                    w[(i, pivot)] = tmp;
                }
            }

            let x: Vec<f64> = (j..rows).map(|i| w[(i, j)]).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                // Remaining block is exactly zero.
                reflectors.push(Vec::new());
                r_diag.push(0.0);
                continue;
            }
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x;
            v[0] -= alpha;
            let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            if vnorm > 0.0 {
                v.iter_mut().for_each(|t| *t /= vnorm);
                for c in j..cols {
                    let dot: f64 = (j..rows).map(|i| v[i - j] * w[(i, c)]).sum();
                    for i in j..rows {
                        w[(i, c)] -= 2.0 * dot * v[i - j];
                    }
                }
            } else {
                v.clear();
            }
            reflectors.push(v);
            r_diag.push(alpha);
        }
        PivotedQr {
            rows,
            reflectors,
            r_diag,
        }
    }

    fn rank(&self, cols: usize) -> usize {
        let lead = self.r_diag.first().map_or(0.0, |d| d.abs());
        if lead == 0.0 {
            return 0;
        }
        let tol = self.rows.max(cols) as f64 * f64::EPSILON * lead;
        self.r_diag.iter().filter(|d| d.abs() > tol).count()
    }

    /// Column `c` of the full orthogonal factor `Q`.
    fn q_column(&self, c: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.rows];
        e[c] = 1.0;
        for (j, v) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let dot: f64 = v.iter().zip(&e[j..]).map(|(a, b)| a * b).sum();
            for (t, vi) in e[j..].iter_mut().zip(v) {
                *t -= 2.0 * dot * vi;
            }
        }
        e
    }
}

/// Numerical rank of `m` from the diagonal of its pivoted QR factor.
pub fn numerical_rank(m: &DenseMatrix) -> usize {
    PivotedQr::factor(m).rank(m.cols())
}

fn residual_scale(a: &DenseMatrix) -> f64 {
    let s = a.max_abs();
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Orthonormal basis of the null space of `a`.
///
/// `basis_tol` is relative: the residual `max |A·H|` must not exceed
/// `basis_tol * max |A|`.
pub fn null_space_basis(a: &DenseMatrix, basis_tol: f64) -> Result<NullBasis> {
    let (r, n) = a.shape();
    if n < 2 {
        return Err(Error::Dimension(format!(
            "sensing matrix needs at least 2 columns, got {n}"
        )));
    }
    if r == 0 || r >= n {
        return Err(Error::Dimension(format!(
            "sensing matrix must be wide with at least one row, got {r}x{n}"
        )));
    }
    let qr = PivotedQr::factor(&a.transpose());
    let rank = qr.rank(r);
    if rank < r {
        return Err(Error::RankDeficient { rank, expected: r });
    }

    let m = n - r;
    let mut h = DenseMatrix::zeros(n, m);
    for (out_col, c) in (r..n).enumerate() {
        for (i, v) in qr.q_column(c).into_iter().enumerate() {
            h[(i, out_col)] = v;
        }
    }

    let residual = a.matmul(&h)?.max_abs();
    if residual > basis_tol * residual_scale(a) {
        return Err(Error::NumericalBreakdown(format!(
            "null-space residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(NullBasis { h, residual })
}

/// True iff `A·H` vanishes within the relative tolerance and `H` has full
/// column rank.
pub fn validate_basis(a: &DenseMatrix, h: &DenseMatrix, basis_tol: f64) -> Result<bool> {
    if a.cols() != h.rows() {
        return Err(Error::Dimension(format!(
            "A is {}x{} but H has {} rows",
            a.rows(),
            a.cols(),
            h.rows()
        )));
    }
    let residual = a.matmul(h)?.max_abs();
    if residual > basis_tol * residual_scale(a) {
        return Ok(false);
    }
    Ok(numerical_rank(h) == h.cols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{generate, EnsembleKind, EnsembleSpec};

    fn gram_error(h: &DenseMatrix) -> f64 {
        let g = h.transpose().matmul(h).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    #[test]
    fn one_row() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let basis = null_space_basis(&a, 1e-10).unwrap();
        assert_eq!(basis.h.shape(), (2, 1));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (h0, h1) = (basis.h[(0, 0)], basis.h[(1, 0)]);
        assert!((h0.abs() - s).abs() < 1e-14);
        assert!((h0 + h1).abs() < 1e-14);
        assert!(basis.residual < 1e-15);
    }

    #[test]
    fn coordinate_null_space() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let h = null_space_basis(&a, 1e-10).unwrap().h;
        assert!(h[(0, 0)].abs() < 1e-15);
        assert!(h[(1, 0)].abs() < 1e-15);
        assert!((h[(2, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_20x40() {
        let a = generate(&EnsembleSpec::new(EnsembleKind::Gaussian, 20, 40, 11))
            .unwrap()
            .matrix;
        let basis = null_space_basis(&a, 1e-10).unwrap();
        assert_eq!(basis.h.shape(), (40, 20));
        assert!(a.matmul(&basis.h).unwrap().max_abs() <= 1e-10);
        assert!(gram_error(&basis.h) < 1e-12);
    }

    #[test]
    fn errors() {
        let square = DenseMatrix::identity(3);
        assert!(matches!(
            null_space_basis(&square, 1e-10),
            Err(Error::Dimension(_))
        ));
        let thin = DenseMatrix::from_rows(&[[1.0]]).unwrap();
        assert!(matches!(
            null_space_basis(&thin, 1e-10),
            Err(Error::Dimension(_))
        ));
        let dup = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]).unwrap();
        assert!(matches!(
            null_space_basis(&dup, 1e-10),
            Err(Error::RankDeficient {
                rank: 1,
                expected: 2
            })
        ));
    }

    #[test]
    fn validate() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let good = DenseMatrix::from_rows(&[[s], [-s]]).unwrap();
        let bad = DenseMatrix::from_rows(&[[1.0], [1.0]]).unwrap();
        assert!(validate_basis(&a, &good, 1e-10).unwrap());
        assert!(!validate_basis(&a, &bad, 1e-10).unwrap());

        let a2 = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let h2 = DenseMatrix::from_rows(&[[0.0], [0.0], [1.0]]).unwrap();
        assert!(validate_basis(&a2, &h2, 1e-12).unwrap());

        // In the null space but with dependent columns.
        let dependent = DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 0.0], [1.0, 2.0]]).unwrap();
        assert!(!validate_basis(&a2, &dependent, 1e-12).unwrap());

        assert!(matches!(
            validate_basis(&a2, &good, 1e-10),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn rank() {
        assert_eq!(numerical_rank(&DenseMatrix::identity(4)), 4);
        assert_eq!(numerical_rank(&DenseMatrix::zeros(3, 2)), 0);
        let m = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        assert_eq!(numerical_rank(&m), 1);
    }
}
