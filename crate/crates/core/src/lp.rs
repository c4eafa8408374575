//! Dense two-phase simplex for small linear programs of the form
//!
//! ```text
//! maximize cᵀv  subject to  G·v <= h,  v_j >= 0 for masked j
//! ```
//!
//! Free variables are split into a positive and a negative part. Rows with a
//! negative right-hand side get an artificial variable and are cleared in
//! phase one. Pricing is Dantzig's largest-coefficient rule; after a
//! degenerate pivot the solver switches to Bland's rule until progress is
//! made again. The leaving row comes from a Harris two-pass ratio test that
//! favours large pivots, which matters on the heavily degenerate support LPs.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const HARRIS_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct LpProblem {
    objective: Vec<f64>,
    constraints: DenseMatrix,
    rhs: Vec<f64>,
    nonneg: Vec<bool>,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        constraints: DenseMatrix,
        rhs: Vec<f64>,
        nonneg: Vec<bool>,
    ) -> Result<Self> {
        let vars = objective.len();
        if constraints.cols() != vars || nonneg.len() != vars {
            return Err(Error::Dimension(format!(
                "{} objective coefficients, {} constraint columns, {} sign flags",
                vars,
                constraints.cols(),
                nonneg.len()
            )));
        }
        if rhs.len() != constraints.rows() {
            return Err(Error::Dimension(format!(
                "{} constraint rows but {} right-hand sides",
                constraints.rows(),
                rhs.len()
            )));
        }
        if objective.iter().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite LP coefficient".into()));
        }
        Ok(LpProblem {
            objective,
            constraints,
            rhs,
            nonneg,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &DenseMatrix {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn nonneg(&self) -> &[bool] {
        &self.nonneg
    }

    /// Replaces the objective, keeping the feasible region.
    pub fn set_objective(&mut self, objective: Vec<f64>) -> Result<()> {
        if objective.len() != self.num_vars() {
            return Err(Error::Dimension(format!(
                "objective has {} entries, expected {}",
                objective.len(),
                self.num_vars()
            )));
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite LP coefficient".into()));
        }
        self.objective = objective;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: usize,
    /// Number of columns excluding the right-hand side.
    cols: usize,
    /// Row-major, `rows x (cols + 1)`; the last column is the right-hand side.
    t: Vec<f64>,
    /// Reduced-cost row; the last entry holds the negated objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may not enter the basis.
    barred: Vec<bool>,
    iterations: usize,
    cap: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width();
        let p = self.t[r * w + e];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[e];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[e] = 0.0;
            }
        }
        let f = self.cost[e];
        if f != 0.0 {
            for (x, y) in self.cost.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            self.cost[e] = 0.0;
        }
        self.basis[r] = e;
    }

    /// Installs `c` as the objective and prices out the current basis.
    fn set_cost(&mut self, c: &[f64]) {
        let w = self.width();
        let mut cost = vec![0.0; w];
        cost[..self.cols].copy_from_slice(c);
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for (x, y) in cost.iter_mut().zip(&self.t[i * w..(i + 1) * w]) {
                    *x -= cb * y;
                }
            }
        }
        for &b in &self.basis {
            cost[b] = 0.0;
        }
        self.cost = cost;
    }

    fn run(&mut self) -> Result<Phase> {
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..self.cols).find(|&j| !self.barred[j] && self.cost[j] > COST_TOL)
            } else {
                (0..self.cols)
                    .filter(|&j| !self.barred[j] && self.cost[j] > COST_TOL)
                    .fold(None, |best: Option<usize>, j| match best {
                        Some(b) if self.cost[b] >= self.cost[j] => Some(b),
                        _ => Some(j),
                    })
            };
            let Some(e) = entering else {
                return Ok(Phase::Optimal);
            };

            // Harris two-pass ratio test: bound the step with slightly relaxed
            // rows, then take the largest pivot among rows within that bound.
            let mut bound = f64::INFINITY;
            for i in 0..self.rows {
                let a = self.at(i, e);
                if a > PIVOT_TOL {
                    bound = bound.min((self.rhs(i).max(0.0) + HARRIS_TOL) / a);
                }
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, e);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                if ratio > bound {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((r, _)) => {
                        let best = self.at(r, e);
                        if bland && (a - best).abs() <= 1e-12 * best {
                            self.basis[i] < self.basis[r]
                        } else {
                            a > best
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Phase::Unbounded);
            };

            self.iterations += 1;
            if self.iterations > self.cap {
                return Err(Error::NumericalBreakdown(format!(
                    "simplex exceeded {} pivots",
                    self.cap
                )));
            }
            self.pivot(r, e);
            bland = ratio <= 1e-12;
        }
    }
}

/// Solves `p`. Optimal points are re-checked against the original
/// constraints; a point that violates them beyond `feas_tol` (relative to
/// the row magnitude) is reported as a numerical breakdown.
pub fn solve_lp(p: &LpProblem, feas_tol: f64) -> Result<LpOutcome> {
    let m = p.num_constraints();
    let nv = p.num_vars();

    // Structural columns: one per nonnegative variable, two per free one.
    let mut pos_col = Vec::with_capacity(nv);
    let mut neg_col = vec![None; nv];
    let mut nstruct = 0;
    for (j, &nonneg) in p.nonneg.iter().enumerate() {
        pos_col.push(nstruct);
        nstruct += 1;
        if !nonneg {
            neg_col[j] = Some(nstruct);
            nstruct += 1;
        }
    }
    let negative_rows: Vec<usize> = (0..m).filter(|&i| p.rhs[i] < 0.0).collect();
    let nart = negative_rows.len();
    let cols = nstruct + m + nart;
    let w = cols + 1;

    let mut t = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut art = 0;
    for i in 0..m {
        let sign = if p.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut t[i * w..(i + 1) * w];
        for j in 0..nv {
            let g = p.constraints[(i, j)];
            row[pos_col[j]] = sign * g;
            if let Some(nc) = neg_col[j] {
                row[nc] = -sign * g;
            }
        }
        row[nstruct + i] = sign;
        row[cols] = sign * p.rhs[i];
        if sign < 0.0 {
            let ac = nstruct + m + art;
            row[ac] = 1.0;
            basis[i] = ac;
            art += 1;
        } else {
            basis[i] = nstruct + i;
        }
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        cost: vec![0.0; w],
        basis,
        barred: vec![false; cols],
        iterations: 0,
        cap: 50 * (cols + m).max(1),
    };

    let is_artificial = |j: usize| j >= nstruct + m;

    if nart > 0 {
        let mut c1 = vec![0.0; cols];
        c1[nstruct + m..].iter_mut().for_each(|c| *c = -1.0);
        tab.set_cost(&c1);
        tab.run()?;
        let infeasibility = tab.cost[cols];
        let scale = 1.0 + negative_rows.iter().map(|&i| p.rhs[i].abs()).sum::<f64>();
        if infeasibility > feas_tol * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining (zero-level) artificials out of the basis.
        let mut redundant = Vec::new();
        for i in 0..m {
            if !is_artificial(tab.basis[i]) {
                continue;
            }
            let candidate = (0..nstruct + m)
                .filter(|&j| tab.at(i, j).abs() > PIVOT_TOL)
                .fold(None, |best: Option<usize>, j| match best {
                    Some(b) if tab.at(i, b).abs() >= tab.at(i, j).abs() => Some(b),
                    _ => Some(j),
                });
            match candidate {
                Some(j) => tab.pivot(i, j),
                None => redundant.push(i),
            }
        }
        for j in nstruct + m..cols {
            tab.barred[j] = true;
        }
        // A redundant row keeps its artificial at level zero; with all
        // artificial columns barred and a zero row it never constrains phase two.
        for &i in &redundant {
            let row = &mut tab.t[i * w..(i + 1) * w];
            for (j, v) in row.iter_mut().enumerate() {
                if j != tab.basis[i] {
                    *v = 0.0;
                }
            }
        }
    }

    let mut c2 = vec![0.0; cols];
    for j in 0..nv {
        c2[pos_col[j]] = p.objective[j];
        if let Some(nc) = neg_col[j] {
            c2[nc] = -p.objective[j];
        }
    }
    tab.set_cost(&c2);
    if let Phase::Unbounded = tab.run()? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut level = vec![0.0; cols];
    for i in 0..m {
        level[tab.basis[i]] = tab.rhs(i);
    }
    let point: Vec<f64> = (0..nv)
        .map(|j| level[pos_col[j]] - neg_col[j].map_or(0.0, |nc| level[nc]))
        .collect();

    check_feasible(p, &point, feas_tol)?;
    let value = p.objective.iter().zip(&point).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal { value, point })
}

fn check_feasible(p: &LpProblem, point: &[f64], feas_tol: f64) -> Result<()> {
    for i in 0..p.num_constraints() {
        let row = p.constraints.row(i);
        let lhs: f64 = row.iter().zip(point).map(|(g, v)| g * v).sum();
        let magnitude: f64 = row.iter().zip(point).map(|(g, v)| (g * v).abs()).sum();
        if lhs - p.rhs[i] > feas_tol * (1.0 + p.rhs[i].abs() + magnitude) {
            return Err(Error::NumericalBreakdown(format!(
                "constraint {} violated by {:e}",
                i,
                lhs - p.rhs[i]
            )));
        }
    }
    for (j, v) in point.iter().enumerate() {
        if p.nonneg[j] && *v < -feas_tol {
            return Err(Error::NumericalBreakdown(format!(
                "variable {j} negative ({v:e})"
            )));
        }
    }
    Ok(())
}
