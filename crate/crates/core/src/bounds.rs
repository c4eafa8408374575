//! Per-subset quantities `α_{l,L}` and the polynomial-time upper bounds on
//! `α_k` built from them.
//!
//! `β_{l,L} = max ‖(Hx)_L‖₁ s.t. ‖(Hx)_{L̄}‖₁ <= 1` is evaluated by fixing the
//! signs of `(Hx)_L`. A pattern and its negation give the same optimum, so the
//! leading sign is pinned to `+1` and `2^{l-1}` linear programs remain.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, binomial_f64, is_valid_subset, Combinations, SubsetRanker};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpOutcome, LpProblem};
use crate::matrix::DenseMatrix;
use crate::settings::Settings;

/// `α = β / (1 + β)`, with an unbounded `β` mapped to `α = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaValue {
    pub alpha: f64,
    pub beta_unbounded: bool,
}

impl AlphaValue {
    pub fn from_beta(beta: f64) -> Self {
        let beta = beta.max(0.0);
        AlphaValue {
            alpha: beta / (1.0 + beta),
            beta_unbounded: false,
        }
    }

    pub fn unbounded() -> Self {
        AlphaValue {
            alpha: 1.0,
            beta_unbounded: true,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        if self.beta_unbounded {
            None
        } else {
            Some(self.alpha / (1.0 - self.alpha))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    pub set: Vec<usize>,
    pub score: AlphaValue,
}

fn check_support(h: &DenseMatrix, set: &[usize]) -> Result<()> {
    let n = h.rows();
    if set.is_empty() || set.len() >= n {
        return Err(Error::Dimension(format!(
            "support of size {} must satisfy 1 <= |L| < n = {}",
            set.len(),
            n
        )));
    }
    if !is_valid_subset(set, n) {
        return Err(Error::Argument(format!(
            "support {set:?} must be strictly increasing indices below {n}"
        )));
    }
    Ok(())
}

/// Exact `α_{|L|,L}` for the rows `set` of `h`.
///
/// Variables are `x ∈ R^m` (free) and `u_j >= 0` for each row `j` outside the
/// support, with `-u_j <= row_j·x <= u_j` and `Σ u_j <= 1`.
pub fn beta_subset(h: &DenseMatrix, set: &[usize], feas_tol: f64) -> Result<AlphaValue> {
    check_support(h, set)?;
    let (n, m) = h.shape();
    let outside: Vec<usize> = {
        let mut inside = vec![false; n];
        set.iter().for_each(|&i| inside[i] = true);
        (0..n).filter(|&j| !inside[j]).collect()
    };
    let nu = outside.len();
    let nvars = m + nu;

    let mut g = DenseMatrix::zeros(2 * nu + 1, nvars);
    for (t, &j) in outside.iter().enumerate() {
        for (c, &v) in h.row(j).iter().enumerate() {
            g[(2 * t, c)] = v;
            g[(2 * t + 1, c)] = -v;
        }
        g[(2 * t, m + t)] = -1.0;
        g[(2 * t + 1, m + t)] = -1.0;
        g[(2 * nu, m + t)] = 1.0;
    }
    let mut rhs = vec![0.0; 2 * nu + 1];
    rhs[2 * nu] = 1.0;
    let mut nonneg = vec![false; m];
    nonneg.resize(nvars, true);
    let mut problem = LpProblem::new(vec![0.0; nvars], g, rhs, nonneg)?;

    let mut best: f64 = 0.0;
    for pattern in 0..1usize << (set.len() - 1) {
        let mut objective = vec![0.0; nvars];
        for (pos, &i) in set.iter().enumerate() {
            // Binary counting over the trailing signs; the first stays +1.
            let negative = pos > 0 && (pattern >> (set.len() - 1 - pos)) & 1 == 1;
            let sign = if negative { -1.0 } else { 1.0 };
            for (c, &v) in h.row(i).iter().enumerate() {
                objective[c] += sign * v;
            }
        }
        problem.set_objective(objective)?;
        match solve_lp(&problem, feas_tol)? {
            LpOutcome::Optimal { value, .. } => best = best.max(value),
            LpOutcome::Unbounded => return Ok(AlphaValue::unbounded()),
            LpOutcome::Infeasible => {
                return Err(Error::NumericalBreakdown(
                    "support LP reported infeasible although x = 0 is feasible".into(),
                ))
            }
        }
    }
    Ok(AlphaValue::from_beta(best))
}

/// Complete table of `α_{l,L}` over every `l`-subset, in lexicographic order.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    n: usize,
    l: usize,
    scores: Vec<SubsetScore>,
    ranker: SubsetRanker,
}

impl ScoreTable {
    /// Validates that `scores` lists every `l`-subset of `{0..n-1}` exactly
    /// once, in lexicographic order.
    pub fn new(n: usize, l: usize, scores: Vec<SubsetScore>) -> Result<Self> {
        if l == 0 || l > n {
            return Err(Error::Argument(format!(
                "subset size {l} invalid for n = {n}"
            )));
        }
        if binomial(n, l) != scores.len() as u128 {
            return Err(Error::Argument(format!(
                "score list has {} entries, C({n},{l}) = {}",
                scores.len(),
                binomial(n, l)
            )));
        }
        for (expected, got) in Combinations::new(n, l).zip(&scores) {
            if expected != got.set {
                return Err(Error::Argument(format!(
                    "score list out of order: expected {expected:?}, found {:?}",
                    got.set
                )));
            }
            let a = got.score.alpha;
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Argument(format!("alpha {a} outside [0, 1]")));
            }
        }
        Ok(ScoreTable {
            n,
            l,
            scores,
            ranker: SubsetRanker::new(n, l),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn scores(&self) -> &[SubsetScore] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `α_{l,L}` of a sorted `l`-subset.
    pub fn alpha_of(&self, set: &[usize]) -> f64 {
        self.scores[self.ranker.rank(set)].score.alpha
    }

    /// Alphas sorted descending; ties keep lexicographic subset order.
    pub fn sorted_alphas(&self) -> Vec<f64> {
        let mut alphas: Vec<f64> = self.scores.iter().map(|s| s.score.alpha).collect();
        alphas.sort_by(|a, b| b.total_cmp(a));
        alphas
    }

    /// Cache format: one `subset_indices;alpha` line per subset, indices
    /// space separated.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.scores.len() * 24);
        for s in &self.scores {
            let idx: Vec<String> = s.set.iter().map(|i| i.to_string()).collect();
            out.push_str(&idx.join(" "));
            out.push(';');
            out.push_str(&format!("{:?}\n", s.score.alpha));
        }
        out
    }

    pub fn from_csv_str(n: usize, l: usize, text: &str) -> Result<Self> {
        let mut scores = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("score line {}: {}", lineno + 1, what));
            let (idx, alpha) = line.split_once(';').ok_or_else(|| bad("missing ';'"))?;
            let set = idx
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad("bad index")))
                .collect::<Result<Vec<_>>>()?;
            let alpha: f64 = alpha.trim().parse().map_err(|_| bad("bad alpha"))?;
            // Finite β always gives α < 1, so α = 1 can only come from an unbounded β.
            let score = AlphaValue {
                alpha,
                beta_unbounded: alpha == 1.0,
            };
            scores.push(SubsetScore { set, score });
        }
        Self::new(n, l, scores)
    }
}

/// Scores every `l`-subset of the rows of `h` in parallel.
pub fn score_all_subsets(h: &DenseMatrix, l: usize, settings: &Settings) -> Result<ScoreTable> {
    let n = h.rows();
    if l == 0 || l >= n {
        return Err(Error::Dimension(format!(
            "subset size {l} must satisfy 1 <= l < n = {n}"
        )));
    }
    let count = binomial(n, l);
    if count > settings.subset_limit as u128 {
        return Err(Error::Capacity {
            what: "subset scores",
            needed: count,
            limit: settings.subset_limit,
        });
    }
    let subsets: Vec<Vec<usize>> = Combinations::new(n, l).collect();
    let scores = subsets
        .into_par_iter()
        .map(|set| {
            let score = beta_subset(h, &set, settings.feas_tol)?;
            Ok(SubsetScore { set, score })
        })
        .collect::<Result<Vec<_>>>()?;
    ScoreTable::new(n, l, scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundMethod {
    Pick1,
    PickL,
    PickLOptimized,
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMethod::Pick1 => "Pick1",
            BoundMethod::PickL => "PickL",
            BoundMethod::PickLOptimized => "PickLOptimized",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    pub l: usize,
    pub method: BoundMethod,
    /// Raw bound; may exceed 1.
    pub bound: f64,
    pub nsc_certified: bool,
}

impl BoundReport {
    fn new(k: usize, l: usize, method: BoundMethod, bound: f64) -> Self {
        BoundReport {
            k,
            l,
            method,
            bound,
            nsc_certified: bound < 0.5,
        }
    }
}

fn check_k(table: &ScoreTable, k: usize) -> Result<()> {
    if k < table.l() || k > table.n() {
        return Err(Error::Argument(format!(
            "k = {k} must satisfy l = {} <= k <= n = {}",
            table.l(),
            table.n()
        )));
    }
    Ok(())
}

/// Sum of the `k` largest single-element scores.
pub fn pick_one_bound(table: &ScoreTable, k: usize) -> Result<BoundReport> {
    if table.l() != 1 {
        return Err(Error::Argument(format!(
            "pick-1 bound needs single-element scores, got l = {}",
            table.l()
        )));
    }
    check_k(table, k)?;
    let bound = table.sorted_alphas()[..k].iter().sum();
    Ok(BoundReport::new(k, 1, BoundMethod::Pick1, bound))
}

/// `(1 / C(k-1, l-1)) · (sum of the C(k, l) largest l-subset scores)`.
pub fn pick_l_bound(table: &ScoreTable, k: usize) -> Result<BoundReport> {
    check_k(table, k)?;
    let l = table.l();
    let take = binomial(k, l) as usize;
    let sum: f64 = table.sorted_alphas()[..take].iter().sum();
    let bound = sum / binomial_f64(k - 1, l - 1);
    Ok(BoundReport::new(k, l, BoundMethod::PickL, bound))
}

/// Pick-l bound with coefficients chosen by a linear program: maximize
/// `Σ γ_i α_{l,L_i}` over `γ >= 0`, `Σ γ_i <= k/l`, and for every `b`-subset
/// `I` (`1 <= b <= l`): `Σ_{I ⊆ L_i} γ_i <= C(k-b, l-b) / C(k-1, l-1)`.
pub fn pick_l_optimized_bound(
    table: &ScoreTable,
    k: usize,
    settings: &Settings,
) -> Result<BoundReport> {
    check_k(table, k)?;
    let (n, l) = (table.n(), table.l());
    let nvars = table.len();

    let mut row_offset = Vec::with_capacity(l + 1);
    let mut rows: u128 = 1;
    for b in 1..=l {
        row_offset.push(rows as usize);
        rows += binomial(n, b);
    }
    let entries = rows.saturating_mul(nvars as u128);
    if rows > settings.subset_limit as u128 || entries > settings.subset_limit as u128 {
        return Err(Error::Capacity {
            what: "optimized-coefficient constraints",
            needed: entries.max(rows),
            limit: settings.subset_limit,
        });
    }
    let rows = rows as usize;

    let denom = binomial_f64(k - 1, l - 1);
    let mut rhs = vec![0.0; rows];
    rhs[0] = k as f64 / l as f64;
    for b in 1..=l {
        let cap = binomial_f64(k - b, l - b) / denom;
        let start = row_offset[b - 1];
        let count = binomial(n, b) as usize;
        rhs[start..start + count].iter_mut().for_each(|r| *r = cap);
    }

    let rankers: Vec<SubsetRanker> = (1..=l).map(|b| SubsetRanker::new(n, b)).collect();
    let mut g = DenseMatrix::zeros(rows, nvars);
    let mut sub = Vec::with_capacity(l);
    for (i, s) in table.scores().iter().enumerate() {
        g[(0, i)] = 1.0;
        for b in 1..=l {
            for positions in Combinations::new(l, b) {
                sub.clear();
                sub.extend(positions.iter().map(|&p| s.set[p]));
                let r = row_offset[b - 1] + rankers[b - 1].rank(&sub);
                g[(r, i)] = 1.0;
            }
        }
    }

    let objective = table.scores().iter().map(|s| s.score.alpha).collect();
    let problem = LpProblem::new(objective, g, rhs, vec![true; nvars])?;
    match solve_lp(&problem, settings.feas_tol)? {
        LpOutcome::Optimal { value, .. } => {
            Ok(BoundReport::new(k, l, BoundMethod::PickLOptimized, value))
        }
        other => Err(Error::NumericalBreakdown(format!(
            "coefficient LP is bounded and feasible, solver said {other:?}"
        ))),
    }
}
