#![allow(dead_code)]

use nsc_core::combinatorics::Combinations;
use nsc_core::ensembles::gaussian;
use nsc_core::DenseMatrix;

/// Gaussian null-space basis straight from the seed (entries of `H` i.i.d.).
pub fn gaussian_h(n: usize, m: usize, seed: u64) -> DenseMatrix {
    gaussian(n, m, seed, 1.0)
}

pub fn ones(n: usize) -> DenseMatrix {
    DenseMatrix::new(n, 1, vec![1.0; n]).unwrap()
}

pub fn tri() -> DenseMatrix {
    DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap()
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when numerically singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(r);
            for (x, y) in bottom[0][col..n].iter_mut().zip(&top[col][col..n]) {
                *x -= f * y;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Maximum of `cᵀv` over `{G v <= h}` by enumerating every basic solution.
/// The caller must make the region bounded. `None` means infeasible.
pub fn vertex_enumeration(c: &[f64], g: &[Vec<f64>], h: &[f64]) -> Option<f64> {
    let nv = c.len();
    let mut best: Option<f64> = None;
    for active in Combinations::new(g.len(), nv) {
        let a = active.iter().map(|&i| g[i].clone()).collect();
        let b = active.iter().map(|&i| h[i]).collect();
        let Some(x) = solve_square(a, b) else {
            continue;
        };
        let feasible = g.iter().zip(h).all(|(row, &hi)| {
            let lhs: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            lhs <= hi + 1e-9
        });
        if feasible {
            let val: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
            best = Some(best.map_or(val, |b: f64| b.max(val)));
        }
    }
    best
}
