//! Exact `α_k` through sandwiching.
//!
//! Every `k`-support `K` gets a cheap upper bound (CUB) from the pick-l
//! scores of its `l`-subsets. Supports are visited in descending CUB order
//! while a global lower bound (GLB, the best exact `α_{k,K}` so far) is
//! maintained. A support is solved exactly only if both its CUB and its
//! LP-based bound (LPUB) beat the GLB; the run stops as soon as the next CUB
//! no longer does, at which point GUB = GLB = `α_k`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bounds::{
    beta_subset, pick_l_bound, pick_l_optimized_bound, pick_one_bound, score_all_subsets,
    AlphaValue, BoundMethod, ScoreTable,
};
use crate::combinatorics::{binomial, binomial_f64, is_valid_subset, Combinations};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpOutcome, LpProblem};
use crate::matrix::DenseMatrix;
use crate::settings::Settings;

/// Exact `α_{k,K}`. Same subproblem as [`beta_subset`] with `|L| = k`.
pub fn alpha_exact_on_set(h: &DenseMatrix, set: &[usize], feas_tol: f64) -> Result<AlphaValue> {
    beta_subset(h, set, feas_tol)
}

fn check_bound_support(table: &ScoreTable, set: &[usize]) -> Result<()> {
    if set.len() < table.l() || set.len() > table.n() {
        return Err(Error::Argument(format!(
            "support of size {} incompatible with l = {} and n = {}",
            set.len(),
            table.l(),
            table.n()
        )));
    }
    if !is_valid_subset(set, table.n()) {
        return Err(Error::Argument(format!(
            "support {set:?} must be strictly increasing indices below {}",
            table.n()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheapBoundEntry {
    pub set: Vec<usize>,
    pub cub: f64,
}

/// `(1 / C(k-1, l-1)) · Σ_{L ⊆ K, |L| = l} α_{l,L}`.
pub fn cheap_upper_bound(table: &ScoreTable, set: &[usize]) -> Result<f64> {
    check_bound_support(table, set)?;
    Ok(cub_unchecked(table, set))
}

fn cub_unchecked(table: &ScoreTable, set: &[usize]) -> f64 {
    let (k, l) = (set.len(), table.l());
    let mut sub = Vec::with_capacity(l);
    let mut sum = 0.0;
    for positions in Combinations::new(k, l) {
        sub.clear();
        sub.extend(positions.iter().map(|&p| set[p]));
        sum += table.alpha_of(&sub);
    }
    sum / binomial_f64(k - 1, l - 1)
}

/// Packing LP over per-index masses: maximize `Σ_{t∈K} z_t` subject to
/// `Σ_{t∈L} z_t <= α_{l,L}` for every `l`-subset `L ⊆ K`, `z >= 0`.
pub fn lp_upper_bound(table: &ScoreTable, set: &[usize], feas_tol: f64) -> Result<f64> {
    check_bound_support(table, set)?;
    let (k, l) = (set.len(), table.l());
    let rows = binomial(k, l) as usize;
    let mut g = DenseMatrix::zeros(rows, k);
    let mut rhs = Vec::with_capacity(rows);
    let mut sub = Vec::with_capacity(l);
    for (r, positions) in Combinations::new(k, l).enumerate() {
        sub.clear();
        sub.extend(positions.iter().map(|&p| set[p]));
        for &p in &positions {
            g[(r, p)] = 1.0;
        }
        rhs.push(table.alpha_of(&sub));
    }
    let problem = LpProblem::new(vec![1.0; k], g, rhs, vec![true; k])?;
    match solve_lp(&problem, feas_tol)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::NumericalBreakdown(format!(
            "packing LP is bounded and feasible, solver said {other:?}"
        ))),
    }
}

/// How an `α` value in a report was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Bound(BoundMethod),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Exact => f.write_str("Exact"),
            Method::Bound(b) => write!(f, "Bound({b})"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Exact" => Method::Exact,
            "Bound(Pick1)" => Method::Bound(BoundMethod::Pick1),
            "Bound(PickL)" => Method::Bound(BoundMethod::PickL),
            "Bound(PickLOptimized)" => Method::Bound(BoundMethod::PickLOptimized),
            other => return Err(Error::Parse(format!("unknown method {other:?}"))),
        })
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// 1-based position in the CUB-sorted list.
    pub step: usize,
    pub set: Vec<usize>,
    pub cub: f64,
    pub lpub: Option<f64>,
    pub exact_alpha: Option<f64>,
    /// Global bounds after this step.
    pub gub: f64,
    pub glb: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SandwichTrace {
    pub rows: Vec<TraceRow>,
}

impl SandwichTrace {
    pub const CSV_HEADER: &'static str = "step,K,cub,lpub,exact_alpha,gub,glb";

    /// `step,K,cub,lpub,exact_alpha,gub,glb`; `K` is space separated and
    /// skipped gates leave their field empty.
    pub fn to_csv_string(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| format!("{x:?}")).unwrap_or_default()
        }
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let set: Vec<String> = r.set.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!(
                "{},{},{:?},{},{},{:?},{:?}\n",
                r.step,
                set.join(" "),
                r.cub,
                opt(r.lpub),
                opt(r.exact_alpha),
                r.gub,
                r.glb
            ));
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(Self::CSV_HEADER) {
            return Err(Error::Parse("trace CSV header missing".into()));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("trace line {}: {}", lineno + 2, what));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(bad("expected 7 fields"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bad number"));
            let opt = |s: &str| {
                if s.trim().is_empty() {
                    Ok(None)
                } else {
                    num(s).map(Some)
                }
            };
            rows.push(TraceRow {
                step: fields[0].trim().parse().map_err(|_| bad("bad step"))?,
                set: fields[1]
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad("bad index")))
                    .collect::<Result<_>>()?,
                cub: num(fields[2])?,
                lpub: opt(fields[3])?,
                exact_alpha: opt(fields[4])?,
                gub: num(fields[5])?,
                glb: num(fields[6])?,
            });
        }
        Ok(SandwichTrace { rows })
    }
}

/// Running state of the sandwich loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichState {
    pub gub: f64,
    pub glb: f64,
    pub step: usize,
    pub best_set: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub rho: f64,
    pub alpha: f64,
    pub method: Method,
    pub nsc_certified: bool,
    pub steps_examined: Option<u64>,
    pub best_set: Option<Vec<usize>>,
    pub max_certified_k: Option<usize>,
    pub wall_seconds: f64,
}

impl VerificationReport {
    pub fn new(h: &DenseMatrix, k: usize, l: usize, alpha: f64, method: Method) -> Self {
        let (n, m) = h.shape();
        VerificationReport {
            n,
            m,
            k,
            l,
            rho: (n - m) as f64 / n as f64,
            alpha,
            method,
            nsc_certified: alpha < 0.5,
            steps_examined: None,
            best_set: None,
            max_certified_k: None,
            wall_seconds: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SandwichOutcome {
    pub alpha: AlphaValue,
    pub best_set: Option<Vec<usize>>,
    pub state: SandwichState,
    pub lp_bounds_computed: u64,
    pub exact_evaluations: u64,
    pub report: VerificationReport,
}

/// Basis matrices must be tall with at least one column.
pub(crate) fn check_basis_shape(h: &DenseMatrix) -> Result<()> {
    let (n, m) = h.shape();
    if m == 0 || m >= n {
        return Err(Error::Dimension(format!(
            "null-space basis must be n x m with 0 < m < n, got {n}x{m}"
        )));
    }
    Ok(())
}

/// Computes the `l`-subset scores and runs [`sandwich_with_scores`].
pub fn sandwich(
    h: &DenseMatrix,
    k: usize,
    l: usize,
    settings: &Settings,
    trace: &mut SandwichTrace,
) -> Result<SandwichOutcome> {
    check_basis_shape(h)?;
    if l == 0 || l > k || k >= h.rows() {
        return Err(Error::Argument(format!(
            "need 1 <= l <= k < n, got l = {l}, k = {k}, n = {}",
            h.rows()
        )));
    }
    let started = Instant::now();
    let table = score_all_subsets(h, l, settings)?;
    let mut outcome = sandwich_with_scores(h, &table, k, settings, trace)?;
    outcome.report.wall_seconds = started.elapsed().as_secs_f64();
    Ok(outcome)
}

/// Sandwich run over precomputed scores. Rows are appended to `trace` as
/// they are produced, so a failed run leaves the trace up to the failure.
pub fn sandwich_with_scores(
    h: &DenseMatrix,
    table: &ScoreTable,
    k: usize,
    settings: &Settings,
    trace: &mut SandwichTrace,
) -> Result<SandwichOutcome> {
    check_basis_shape(h)?;
    let n = h.rows();
    let l = table.l();
    if table.n() != n {
        return Err(Error::Dimension(format!(
            "scores cover {} rows, matrix has {n}",
            table.n()
        )));
    }
    if l > k || k >= n {
        return Err(Error::Argument(format!(
            "need l <= k < n, got l = {l}, k = {k}, n = {n}"
        )));
    }
    let count = binomial(n, k);
    if count > settings.subset_limit as u128 {
        return Err(Error::Capacity {
            what: "cheap upper bounds",
            needed: count,
            limit: settings.subset_limit,
        });
    }
    let started = Instant::now();

    let supports: Vec<Vec<usize>> = Combinations::new(n, k).collect();
    let mut entries: Vec<CheapBoundEntry> = supports
        .into_par_iter()
        .map(|set| {
            let cub = cub_unchecked(table, &set);
            CheapBoundEntry { set, cub }
        })
        .collect();
    // Stable: equal CUBs stay in lexicographic order.
    entries.sort_by(|a, b| b.cub.total_cmp(&a.cub));
    assert!(
        entries.windows(2).all(|w| w[0].cub >= w[1].cub),
        "CUB list must be sorted descending"
    );

    let tol = settings.cmp_tol;
    let mut state = SandwichState {
        gub: f64::INFINITY,
        glb: 0.0,
        step: 0,
        best_set: None,
    };
    let mut best_alpha = AlphaValue::from_beta(0.0);
    let mut lp_bounds = 0u64;
    let mut exact_evals = 0u64;
    let first_row = trace.rows.len();

    for entry in &entries {
        state.step += 1;
        if state.glb + tol >= entry.cub {
            state.gub = state.glb;
            trace.rows.push(TraceRow {
                step: state.step,
                set: entry.set.clone(),
                cub: entry.cub,
                lpub: None,
                exact_alpha: None,
                gub: state.gub,
                glb: state.glb,
            });
            break;
        }
        state.gub = entry.cub;
        let lpub = lp_upper_bound(table, &entry.set, settings.feas_tol)?;
        lp_bounds += 1;
        let mut exact = None;
        if state.glb + tol < lpub {
            let value = alpha_exact_on_set(h, &entry.set, settings.feas_tol)?;
            exact_evals += 1;
            exact = Some(value.alpha);
            if value.alpha > state.glb {
                state.glb = value.alpha;
                state.best_set = Some(entry.set.clone());
                best_alpha = value;
            }
        }
        trace.rows.push(TraceRow {
            step: state.step,
            set: entry.set.clone(),
            cub: entry.cub,
            lpub: Some(lpub),
            exact_alpha: exact,
            gub: state.gub,
            glb: state.glb,
        });
    }
    // Exhausted without an early stop: every support was examined.
    if state.gub != state.glb {
        state.gub = state.glb;
        if let Some(last) = trace.rows[first_row..].last_mut() {
            last.gub = state.gub;
        }
    }
    log::debug!(
        "sandwich n={n} k={k} l={l}: {} of {} supports visited, {lp_bounds} LP bounds, {exact_evals} exact",
        state.step,
        entries.len()
    );

    let mut report = VerificationReport::new(h, k, l, state.glb, Method::Exact);
    report.steps_examined = Some(state.step as u64);
    report.best_set = state.best_set.clone();
    report.wall_seconds = started.elapsed().as_secs_f64();
    Ok(SandwichOutcome {
        alpha: best_alpha,
        best_set: state.best_set.clone(),
        state,
        lp_bounds_computed: lp_bounds,
        exact_evaluations: exact_evals,
        report,
    })
}

/// Computes `α_k` (exact or a bound, per `mode`) for `k = 1..=k_max`.
///
/// Subset scores are requested once per subset size through `scores`, so
/// callers can serve them from a cache. In exact mode the sweep stops once
/// `α_k = 1` (unbounded `β`), since `α` is nondecreasing in `k` and capped
/// at 1. Every returned report carries the overall `max_certified_k`.
pub fn find_max_certified_k_with(
    h: &DenseMatrix,
    k_max: usize,
    l: usize,
    mode: Method,
    settings: &Settings,
    scores: &mut dyn FnMut(usize) -> Result<ScoreTable>,
) -> Result<Vec<VerificationReport>> {
    check_basis_shape(h)?;
    let n = h.rows();
    if k_max == 0 || k_max >= n || l == 0 {
        return Err(Error::Argument(format!(
            "need 1 <= k_max < n and l >= 1, got k_max = {k_max}, l = {l}, n = {n}"
        )));
    }
    let mut tables: Vec<Option<ScoreTable>> = vec![None; l.max(1) + 1];
    let mut reports = Vec::with_capacity(k_max);

    for k in 1..=k_max {
        let started = Instant::now();
        let l_eff = match mode {
            Method::Bound(BoundMethod::Pick1) => 1,
            _ => l.min(k),
        };
        if tables[l_eff].is_none() {
            tables[l_eff] = Some(scores(l_eff)?);
        }
        let table = tables[l_eff].as_ref().expect("just filled");
        let mut report = match mode {
            Method::Exact => {
                let mut trace = SandwichTrace::default();
                sandwich_with_scores(h, table, k, settings, &mut trace)?.report
            }
            Method::Bound(method) => {
                let bound = match method {
                    BoundMethod::Pick1 => pick_one_bound(table, k)?,
                    BoundMethod::PickL => pick_l_bound(table, k)?,
                    BoundMethod::PickLOptimized => pick_l_optimized_bound(table, k, settings)?,
                };
                VerificationReport::new(h, k, l_eff, bound.bound, mode)
            }
        };
        report.wall_seconds = started.elapsed().as_secs_f64();
        let saturated = mode == Method::Exact && report.alpha >= 1.0;
        reports.push(report);
        if saturated {
            break;
        }
    }

    let max_certified = reports.iter().filter(|r| r.alpha < 0.5).map(|r| r.k).max();
    for r in &mut reports {
        r.max_certified_k = max_certified;
    }
    Ok(reports)
}

/// [`find_max_certified_k_with`] computing scores directly.
pub fn find_max_certified_k(
    h: &DenseMatrix,
    k_max: usize,
    l: usize,
    mode: Method,
    settings: &Settings,
) -> Result<Vec<VerificationReport>> {
    find_max_certified_k_with(h, k_max, l, mode, settings, &mut |size| {
        score_all_subsets(h, size, settings)
    })
}
