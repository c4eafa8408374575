//! Subset enumeration in lexicographic order and the matching ranking
//! function, so per-subset tables can be stored as flat vectors.

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `C(n, k)` as a float, for coefficients.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n, k) as f64
}

/// Iterator over all `k`-subsets of `{0, .., n-1}` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        // Rightmost position that can still be incremented.
        match (0..k).rev().find(|&i| self.current[i] < self.n - k + i) {
            Some(i) => {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Precomputed binomials for ranking subsets of a fixed ground set.
#[derive(Debug, Clone)]
pub struct SubsetRanker {
    n: usize,
    k: usize,
    // table[a][b] = C(a, b), a <= n, b <= k
    table: Vec<Vec<u64>>,
}

impl SubsetRanker {
    /// Panics if `C(n, k)` does not fit in a `u64`.
    pub fn new(n: usize, k: usize) -> Self {
        assert!(
            binomial(n, k) <= u64::MAX as u128,
            "C({n},{k}) overflows u64"
        );
        let table = (0..=n)
            .map(|a| (0..=k).map(|b| binomial(a, b) as u64).collect())
            .collect();
        SubsetRanker { n, k, table }
    }

    /// Position of the sorted subset `set` in the lexicographic enumeration
    /// produced by [`Combinations::new(n, k)`].
    pub fn rank(&self, set: &[usize]) -> usize {
        debug_assert_eq!(set.len(), self.k);
        let mut rank: u64 = 0;
        let mut next = 0;
        for (i, &s) in set.iter().enumerate() {
            let remaining = self.k - i - 1;
            // Every subset that places a smaller element at position i comes first.
            for v in next..s {
                rank += self.table[self.n - v - 1][remaining];
            }
            next = s + 1;
        }
        rank as usize
    }
}

/// True when `set` is strictly increasing with every index below `n`.
pub fn is_valid_subset(set: &[usize], n: usize) -> bool {
    set.windows(2).all(|w| w[0] < w[1]) && set.last().is_none_or(|&x| x < n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 5), 658_008);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(200, 100), u128::MAX);
    }

    #[test]
    fn lexicographic_order() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(
            Combinations::new(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn subset_validity() {
        assert!(is_valid_subset(&[0, 2, 5], 6));
        assert!(!is_valid_subset(&[0, 2, 6], 6));
        assert!(!is_valid_subset(&[2, 2], 6));
        assert!(is_valid_subset(&[], 0));
    }

    proptest! {
        #[test]
        fn rank_matches_enumeration(n in 1usize..11, k in 0usize..6) {
            prop_assume!(k <= n);
            let ranker = SubsetRanker::new(n, k);
            let mut count = 0usize;
            for (i, set) in Combinations::new(n, k).enumerate() {
                prop_assert_eq!(ranker.rank(&set), i);
                count += 1;
            }
            prop_assert_eq!(count as u128, binomial(n, k));
        }
    }
}
