//! Brute-force `α_k`: evaluates every `k`-support exactly, with no pruning.

use rayon::prelude::*;

use crate::bounds::AlphaValue;
use crate::combinatorics::{binomial, Combinations};
use crate::error::{Error, Result};
use crate::exact::{alpha_exact_on_set, check_basis_shape};
use crate::matrix::DenseMatrix;
use crate::settings::Settings;

/// Maximum of `α_{k,K}` over all supports; ties go to the lexicographically
/// smallest support.
pub fn exhaustive_alpha(
    h: &DenseMatrix,
    k: usize,
    settings: &Settings,
) -> Result<(AlphaValue, Vec<usize>)> {
    check_basis_shape(h)?;
    let n = h.rows();
    if k == 0 || k >= n {
        return Err(Error::Argument(format!(
            "need 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    let count = binomial(n, k);
    if count > settings.oracle_limit as u128 {
        return Err(Error::Capacity {
            what: "exhaustive supports",
            needed: count,
            limit: settings.oracle_limit,
        });
    }
    let supports: Vec<Vec<usize>> = Combinations::new(n, k).collect();
    let values = supports
        .par_iter()
        .map(|set| alpha_exact_on_set(h, set, settings.feas_tol))
        .collect::<Result<Vec<_>>>()?;
    // Sequential reduce over lexicographic order: strict improvement only.
    let (best, value) = values
        .iter()
        .enumerate()
        .fold((0, values[0]), |(bi, bv), (i, v)| {
            if v.alpha > bv.alpha {
                (i, *v)
            } else {
                (bi, bv)
            }
        });
    Ok((value, supports[best].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones() {
        let h = DenseMatrix::new(6, 1, vec![1.0; 6]).unwrap();
        let (a, set) = exhaustive_alpha(&h, 3, &Settings::default()).unwrap();
        assert!((a.alpha - 0.5).abs() < 1e-12);
        assert_eq!(set, vec![0, 1, 2]);
    }

    #[test]
    fn triangle() {
        let h = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let (a, set) = exhaustive_alpha(&h, 1, &Settings::default()).unwrap();
        assert!((a.alpha - 0.5).abs() < 1e-12);
        assert_eq!(set, vec![0]);
        let (a2, _) = exhaustive_alpha(&h, 2, &Settings::default()).unwrap();
        assert!(a2.beta_unbounded);
    }

    #[test]
    fn limit() {
        let h = DenseMatrix::new(10, 1, vec![1.0; 10]).unwrap();
        let s = Settings {
            oracle_limit: 100,
            ..Settings::default()
        };
        assert!(matches!(
            exhaustive_alpha(&h, 3, &s),
            Err(Error::Capacity { .. })
        ));
        assert!(exhaustive_alpha(&h, 0, &s).is_err());
    }
}
