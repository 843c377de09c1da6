//! A small dense-tableau simplex solver.
//!
//! Scope: the linear programs in this crate have tens of rows and at most a
//! few hundred columns, so a two-phase full-tableau method with dense rows is
//! both simple and fast enough. What the rest of the crate depends on:
//!
//! * **basic solutions** — returned points are vertices, so the number of
//!   variables strictly between their bounds never exceeds the row count;
//! * **dual values** at optimality (read off the initial unit columns);
//! * **Farkas certificates** for infeasible programs (the phase-1 duals),
//!   validated by direct multiplication before being returned;
//! * **determinism** — fixed pivot rules, lowest-index tie-breaks.
//!
//! Pivoting uses Dantzig's rule with a lowest-index tie-break and falls back
//! to Bland's rule (which cannot cycle) once the iteration count passes a
//! threshold. A numerical-failure path reports an error rather than ever
//! returning a wrong status.

use thiserror::Error;

/// Feasibility slack shared with the rest of the crate.
const FEAS: f64 = 1e-7;
/// Pivot / support threshold.
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `min c'x` subject to rows `a·x {<=,=,>=} b` and `0 <= x_j (<= u_j)`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
    upper: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { objective, rows: Vec::new(), upper: vec![None; n] }
    }

    /// A pure feasibility program (zero objective).
    pub fn feasibility(num_vars: usize) -> Self {
        Self::minimize(vec![0.0; num_vars])
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "row width mismatch");
        assert!(rhs.is_finite(), "rhs must be finite");
        self.rows.push((coeffs, rel, rhs));
    }

    /// Upper bound for one variable (the lower bound is always 0).
    pub fn set_upper_bound(&mut self, var: usize, bound: f64) {
        assert!(var < self.num_vars());
        assert!(bound.is_finite() && bound >= 0.0, "bad upper bound {bound}");
        self.upper[var] = Some(bound);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// User-visible row count (variable bounds are not rows).
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, r: usize) -> (&[f64], Relation, f64) {
        let (a, rel, b) = &self.rows[r];
        (a, *rel, *b)
    }

    pub fn upper_bound(&self, var: usize) -> Option<f64> {
        self.upper[var]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    Nonbasic,
}

/// An optimal vertex together with its dual information.
///
/// Dual sign convention for this minimization form: `duals[r] >= 0` on `>=`
/// rows, `<= 0` on `<=` rows, free on `=` rows; `bound_duals[j] <= 0` where an
/// upper bound exists (0 elsewhere). Strong duality reads
/// `objective = sum_r duals[r]*b_r + sum_j bound_duals[j]*u_j`.
#[derive(Debug, Clone)]
pub struct OptimalSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals: Vec<f64>,
    pub bound_duals: Vec<f64>,
    pub basis: Vec<VarStatus>,
}

/// Proof of infeasibility: multipliers `y` per row (`>= 0` on `<=` rows,
/// `<= 0` on `>=` rows, free on `=` rows) and `w >= 0` per upper-bounded
/// variable such that `y'A + w >= 0` componentwise while `y'b + w'u < 0`.
#[derive(Debug, Clone)]
pub struct FarkasCertificate {
    pub row_multipliers: Vec<f64>,
    pub bound_multipliers: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible(FarkasCertificate),
    Unbounded,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("simplex iteration limit exceeded")]
    IterationLimit,
    #[error("numerical failure in simplex: {0}")]
    Numerical(String),
}

pub type LpResult<T> = std::result::Result<T, LpError>;

/// Solves the program. Every returned status is re-validated numerically;
/// validation failure surfaces as `LpError::Numerical`, never as a wrong
/// status.
pub fn solve(lp: &LinearProgram) -> LpResult<LpOutcome> {
    Tableau::build(lp).run(lp)
}

/// Ignores the objective and reports feasibility; `Optimal` then carries an
/// arbitrary feasible vertex with objective 0, `Infeasible` carries the
/// phase-1 dual values as the certificate.
pub fn solve_feasibility(lp: &LinearProgram) -> LpResult<LpOutcome> {
    let mut zeroed = lp.clone();
    zeroed.objective = vec![0.0; lp.num_vars()];
    solve(&zeroed)
}

/// One internal row: user rows first, then one row per upper bound.
struct InternalRow {
    /// index of the originating user row, or (num_rows + j) for bound rows
    origin: usize,
    flipped: bool,
}

struct Tableau {
    /// rows x (columns + 1); last column is the rhs
    t: Vec<Vec<f64>>,
    rows: Vec<InternalRow>,
    basis: Vec<usize>,
    num_structural: usize,
    /// column that started as the unit column of each row (slack or artificial)
    init_col: Vec<usize>,
    /// artificial columns (barred from entering in phase 2)
    artificial: Vec<bool>,
    num_cols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let nv = lp.num_vars();
        let mut rows: Vec<(Vec<f64>, Relation, f64, usize)> = lp
            .rows
            .iter()
            .enumerate()
            .map(|(r, (a, rel, b))| (a.clone(), *rel, *b, r))
            .collect();
        for (j, ub) in lp.upper.iter().enumerate() {
            if let Some(u) = ub {
                let mut a = vec![0.0; nv];
                a[j] = 1.0;
                rows.push((a, Relation::Le, *u, lp.num_rows() + j));
            }
        }
        let nr = rows.len();
        // columns: structural, slacks (Le/Ge rows), artificials (as needed)
        let num_slacks = rows
            .iter()
            .filter(|(_, rel, _, _)| *rel != Relation::Eq)
            .count();
        let mut t: Vec<Vec<f64>> = Vec::with_capacity(nr);
        let mut meta = Vec::with_capacity(nr);
        let mut basis = vec![usize::MAX; nr];
        let mut init_col = vec![usize::MAX; nr];
        // first pass: fill structural part, remember slack positions
        let mut slack_idx = 0usize;
        let mut slack_col_of = vec![usize::MAX; nr];
        for (r, (a, rel, b, origin)) in rows.iter().enumerate() {
            let flipped = *b < 0.0;
            let sgn = if flipped { -1.0 } else { 1.0 };
            let mut row = vec![0.0; nv + num_slacks + 1];
            for (j, &c) in a.iter().enumerate() {
                row[j] = sgn * c;
            }
            if *rel != Relation::Eq {
                let base = if *rel == Relation::Le { 1.0 } else { -1.0 };
                row[nv + slack_idx] = sgn * base;
                slack_col_of[r] = nv + slack_idx;
                slack_idx += 1;
            }
            *row.last_mut().unwrap() = sgn * b;
            t.push(row);
            meta.push(InternalRow { origin: *origin, flipped });
        }
        // second pass: rows whose slack is a +1 unit column start basic on it,
        // the rest get artificials
        let mut artificial_cols = Vec::new();
        for r in 0..nr {
            let sc = slack_col_of[r];
            if sc != usize::MAX && t[r][sc] > 0.5 {
                basis[r] = sc;
                init_col[r] = sc;
            } else {
                artificial_cols.push(r);
            }
        }
        let num_art = artificial_cols.len();
        let num_cols = nv + num_slacks + num_art;
        let mut artificial = vec![false; num_cols];
        for row in t.iter_mut() {
            let b = row.pop().unwrap();
            row.extend(std::iter::repeat(0.0).take(num_art));
            row.push(b);
        }
        for (a_idx, &r) in artificial_cols.iter().enumerate() {
            let col = nv + num_slacks + a_idx;
            t[r][col] = 1.0;
            basis[r] = col;
            init_col[r] = col;
            artificial[col] = true;
        }
        Tableau {
            t,
            rows: meta,
            basis,
            num_structural: nv,
            init_col,
            artificial,
            num_cols,
        }
    }

    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.num_cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.t[r][c];
        let inv = 1.0 / piv;
        for v in self.t[r].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.t[r].clone();
        for (k, row) in self.t.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, &p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[c] = 0.0; // exact by construction
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs against `cost`, one entry per column.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let nr = self.t.len();
        let cb: Vec<f64> = (0..nr).map(|r| cost[self.basis[r]]).collect();
        let mut out = Vec::with_capacity(self.num_cols);
        for c in 0..self.num_cols {
            let mut v = cost[c];
            for r in 0..nr {
                if cb[r] != 0.0 {
                    v -= cb[r] * self.t[r][c];
                }
            }
            out.push(v);
        }
        out
    }

    /// Runs one simplex phase to optimality. `barred[c]` columns never enter.
    fn optimize(&mut self, cost: &[f64], barred: &[bool]) -> LpResult<()> {
        let nr = self.t.len();
        let bland_after = 3 * (nr + self.num_cols) + 50;
        let hard_cap = 200 * (nr + self.num_cols) + 10_000;
        let mut iterations = 0usize;
        loop {
            let rc = self.reduced_costs(cost);
            let use_bland = iterations > bland_after;
            let mut entering: Option<usize> = None;
            let mut best = -EPS;
            for c in 0..self.num_cols {
                if barred[c] || self.basis.contains(&c) {
                    continue;
                }
                if use_bland {
                    if rc[c] < -EPS {
                        entering = Some(c);
                        break;
                    }
                } else if rc[c] < best {
                    best = rc[c];
                    entering = Some(c);
                }
            }
            let Some(c) = entering else { return Ok(()) };
            // ratio test: lowest ratio; ties by lowest row index, or by lowest
            // basis variable index under Bland's rule
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..nr {
                let a = self.t[r][c];
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - EPS {
                                leave = Some((r, ratio));
                            } else if (ratio - bratio).abs() <= EPS {
                                let replace = if use_bland {
                                    self.basis[r] < self.basis[br]
                                } else {
                                    false // first (lowest) row already wins
                                };
                                if replace {
                                    leave = Some((r, bratio.min(ratio)));
                                }
                            }
                        }
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => {
                    return Err(LpError::Numerical("unbounded phase".into()));
                }
            }
            iterations += 1;
            if iterations > hard_cap {
                return Err(LpError::IterationLimit);
            }
        }
    }

    /// Like `optimize` but reports unboundedness as a distinct outcome.
    fn optimize_or_unbounded(&mut self, cost: &[f64], barred: &[bool]) -> LpResult<bool> {
        // wrap: re-run the loop but catch the "no leaving row" case; to keep
        // one code path we probe with optimize and translate the error
        match self.optimize(cost, barred) {
            Ok(()) => Ok(false),
            Err(LpError::Numerical(msg)) if msg == "unbounded phase" => Ok(true),
            Err(e) => Err(e),
        }
    }

    /// Dual values per internal row read off the initial unit columns.
    fn internal_duals(&self, cost: &[f64]) -> Vec<f64> {
        let rc = self.reduced_costs(cost);
        (0..self.t.len())
            .map(|r| {
                let col = self.init_col[r];
                cost[col] - rc[col]
            })
            .collect()
    }

    fn run(mut self, lp: &LinearProgram) -> LpResult<LpOutcome> {
        let nv = self.num_structural;
        let nr = self.t.len();

        // phase 1: minimize the artificial total
        if self.artificial.iter().any(|&a| a) {
            let mut cost = vec![0.0; self.num_cols];
            for (c, &is_art) in self.artificial.iter().enumerate() {
                if is_art {
                    cost[c] = 1.0;
                }
            }
            let barred = vec![false; self.num_cols];
            self.optimize(&cost, &barred)?;
            let infeas: f64 = (0..nr)
                .map(|r| if self.artificial[self.basis[r]] { self.rhs(r) } else { 0.0 })
                .sum();
            if infeas > FEAS {
                let y = self.internal_duals(&cost);
                return self.extract_certificate(lp, &y);
            }
            self.evict_artificials();
        }

        // phase 2
        let mut cost = vec![0.0; self.num_cols];
        cost[..nv].copy_from_slice(&lp.objective);
        let barred = self.artificial.clone();
        if self.optimize_or_unbounded(&cost, &barred)? {
            return Ok(LpOutcome::Unbounded);
        }
        self.extract_optimal(lp, &cost)
    }

    /// Pivots basic artificials out at value zero; drops rows that turned out
    /// redundant.
    fn evict_artificials(&mut self) {
        let nr = self.t.len();
        let mut dead = Vec::new();
        for r in 0..nr {
            if !self.artificial[self.basis[r]] {
                continue;
            }
            // choose the largest eligible pivot for stability
            let mut pick: Option<(usize, f64)> = None;
            for c in 0..self.num_cols {
                if self.artificial[c] || self.basis.contains(&c) {
                    continue;
                }
                let a = self.t[r][c].abs();
                if a > FEAS && pick.map_or(true, |(_, best)| a > best) {
                    pick = Some((c, a));
                }
            }
            match pick {
                Some((c, _)) => self.pivot(r, c),
                None => dead.push(r),
            }
        }
        if !dead.is_empty() {
            for &r in dead.iter().rev() {
                self.t.remove(r);
                self.rows.remove(r);
                self.basis.remove(r);
                self.init_col.remove(r);
            }
        }
    }

    fn structural_x(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.num_structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.num_structural {
                x[b] = self.rhs(r);
            }
        }
        // degenerate negatives within tolerance snap to zero
        for v in x.iter_mut() {
            if *v < 0.0 && *v > -FEAS {
                *v = 0.0;
            }
        }
        x
    }

    /// Splits internal duals back into user rows and bound rows, applying the
    /// flip signs so multipliers refer to rows exactly as the caller wrote
    /// them.
    fn split_duals(&self, lp: &LinearProgram, internal: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut row_duals = vec![0.0; lp.num_rows()];
        let mut bound_duals = vec![0.0; lp.num_vars()];
        for (r, meta) in self.rows.iter().enumerate() {
            let v = if meta.flipped { -internal[r] } else { internal[r] };
            if meta.origin < lp.num_rows() {
                row_duals[meta.origin] = v;
            } else {
                bound_duals[meta.origin - lp.num_rows()] = v;
            }
        }
        (row_duals, bound_duals)
    }

    fn extract_certificate(self, lp: &LinearProgram, phase1_duals: &[f64]) -> LpResult<LpOutcome> {
        // the certificate is the negated phase-1 dual vector
        let neg: Vec<f64> = phase1_duals.iter().map(|&v| -v).collect();
        let (mut y, mut w) = self.split_duals(lp, &neg);
        // clamp sign-constrained entries that are only off by round-off
        for (r, yr) in y.iter_mut().enumerate() {
            match lp.rows[r].1 {
                Relation::Le if *yr < 0.0 && *yr > -FEAS => *yr = 0.0,
                Relation::Ge if *yr > 0.0 && *yr < FEAS => *yr = 0.0,
                _ => {}
            }
        }
        for wj in w.iter_mut() {
            if *wj < 0.0 && *wj > -FEAS {
                *wj = 0.0;
            }
        }
        validate_certificate(lp, &y, &w)?;
        Ok(LpOutcome::Infeasible(FarkasCertificate {
            row_multipliers: y,
            bound_multipliers: w,
        }))
    }

    fn extract_optimal(self, lp: &LinearProgram, cost: &[f64]) -> LpResult<LpOutcome> {
        let x = self.structural_x();
        // primal feasibility re-check against the caller's rows
        for (r, (a, rel, b)) in lp.rows.iter().enumerate() {
            let lhs: f64 = a.iter().zip(&x).map(|(&c, &v)| c * v).sum();
            let slack = 1.0 + b.abs();
            let ok = match rel {
                Relation::Le => lhs <= b + FEAS * slack,
                Relation::Ge => lhs >= b - FEAS * slack,
                Relation::Eq => (lhs - b).abs() <= FEAS * slack,
            };
            if !ok {
                return Err(LpError::Numerical(format!(
                    "row {r} violated at claimed optimum: {lhs} vs {b}"
                )));
            }
        }
        for (j, ub) in lp.upper.iter().enumerate() {
            if let Some(u) = ub {
                if x[j] > u + FEAS * (1.0 + u.abs()) {
                    return Err(LpError::Numerical(format!("upper bound {j} violated")));
                }
            }
        }
        let objective: f64 = lp.objective.iter().zip(&x).map(|(&c, &v)| c * v).sum();
        let internal = self.internal_duals(cost);
        let (duals, bound_duals) = self.split_duals(lp, &internal);
        // strong duality check
        let dual_obj: f64 = duals
            .iter()
            .zip(&lp.rows)
            .map(|(&y, (_, _, b))| y * b)
            .sum::<f64>()
            + bound_duals
                .iter()
                .zip(&lp.upper)
                .map(|(&w, u)| w * u.unwrap_or(0.0))
                .sum::<f64>();
        if (objective - dual_obj).abs() > 1e-6 * (1.0 + objective.abs()) {
            return Err(LpError::Numerical(format!(
                "duality gap at optimum: primal {objective}, dual {dual_obj}"
            )));
        }
        let mut basis = vec![VarStatus::Nonbasic; lp.num_vars()];
        for &b in &self.basis {
            if b < lp.num_vars() {
                basis[b] = VarStatus::Basic;
            }
        }
        Ok(LpOutcome::Optimal(OptimalSolution {
            x,
            objective,
            duals,
            bound_duals,
            basis,
        }))
    }
}

/// Direct arithmetic check of a Farkas certificate; used both internally
/// before returning one and by tests.
pub fn validate_certificate(
    lp: &LinearProgram,
    y: &[f64],
    w: &[f64],
) -> LpResult<()> {
    if y.len() != lp.num_rows() || w.len() != lp.num_vars() {
        return Err(LpError::Numerical("certificate shape mismatch".into()));
    }
    for (r, &yr) in y.iter().enumerate() {
        let bad = match lp.rows[r].1 {
            Relation::Le => yr < -FEAS,
            Relation::Ge => yr > FEAS,
            Relation::Eq => false,
        };
        if bad {
            return Err(LpError::Numerical(format!(
                "certificate multiplier {r} has the wrong sign: {yr}"
            )));
        }
    }
    for (j, &wj) in w.iter().enumerate() {
        if wj < -FEAS {
            return Err(LpError::Numerical(format!("bound multiplier {j} negative")));
        }
        if wj > FEAS && lp.upper[j].is_none() {
            return Err(LpError::Numerical(format!(
                "bound multiplier {j} positive without an upper bound"
            )));
        }
    }
    let mut scale: f64 = 1.0;
    for (a, _, b) in &lp.rows {
        scale = scale.max(b.abs());
        for &c in a {
            scale = scale.max(c.abs());
        }
    }
    for j in 0..lp.num_vars() {
        let combo: f64 = y
            .iter()
            .enumerate()
            .map(|(r, &yr)| yr * lp.rows[r].0[j])
            .sum::<f64>()
            + w[j];
        if combo < -FEAS * scale {
            return Err(LpError::Numerical(format!(
                "certificate violates y'A + w >= 0 at column {j}: {combo}"
            )));
        }
    }
    let rhs_combo: f64 = y
        .iter()
        .enumerate()
        .map(|(r, &yr)| yr * lp.rows[r].2)
        .sum::<f64>()
        + w.iter()
            .enumerate()
            .map(|(j, &wj)| wj * lp.upper[j].unwrap_or(0.0))
            .sum::<f64>();
    if rhs_combo >= -EPS {
        return Err(LpError::Numerical(format!(
            "certificate fails strictness: y'b + w'u = {rhs_combo}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expect_optimal(outcome: LpOutcome) -> OptimalSolution {
        match outcome {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn single_lower_bounded_var() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add_row(vec![1.0], Relation::Ge, 3.0);
        let sol = expect_optimal(solve(&lp).unwrap());
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_bounds_are_infeasible_with_certificate() {
        let mut lp = LinearProgram::feasibility(1);
        lp.add_row(vec![1.0], Relation::Le, -1.0);
        match solve_feasibility(&lp).unwrap() {
            LpOutcome::Infeasible(cert) => {
                validate_certificate(&lp, &cert.row_multipliers, &cert.bound_multipliers)
                    .unwrap();
                assert!(cert.row_multipliers[0] > 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_direction_is_reported() {
        let lp = LinearProgram::minimize(vec![-1.0]);
        assert!(matches!(solve(&lp).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn upper_bound_duals_close_the_gap() {
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.set_upper_bound(0, 5.0);
        let sol = expect_optimal(solve(&lp).unwrap());
        assert!((sol.x[0] - 5.0).abs() < 1e-9);
        assert!((sol.objective + 5.0).abs() < 1e-9);
        assert!((sol.bound_duals[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasibility_through_upper_bounds() {
        // x1 + x2 = 3 with both variables capped at 1
        let mut lp = LinearProgram::feasibility(2);
        lp.add_row(vec![1.0, 1.0], Relation::Eq, 3.0);
        lp.set_upper_bound(0, 1.0);
        lp.set_upper_bound(1, 1.0);
        match solve_feasibility(&lp).unwrap() {
            LpOutcome::Infeasible(cert) => {
                validate_certificate(&lp, &cert.row_multipliers, &cert.bound_multipliers)
                    .unwrap();
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn small_diet_style_program() {
        // min 2x + 3y st x + y >= 4, x - y <= 2, y <= 3
        let mut lp = LinearProgram::minimize(vec![2.0, 3.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Ge, 4.0);
        lp.add_row(vec![1.0, -1.0], Relation::Le, 2.0);
        lp.add_row(vec![0.0, 1.0], Relation::Le, 3.0);
        let sol = expect_optimal(solve(&lp).unwrap());
        // optimum at x=3, y=1 with cost 9
        assert!((sol.objective - 9.0).abs() < 1e-9, "objective {}", sol.objective);
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
        let dual_obj: f64 = sol
            .duals
            .iter()
            .zip([4.0, 2.0, 3.0])
            .map(|(&y, b)| y * b)
            .sum();
        assert!((dual_obj - 9.0).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_and_degenerate_vertices() {
        // transportation-style: two sources, two sinks, balanced
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0, 3.0, 1.0]);
        lp.add_row(vec![1.0, 1.0, 0.0, 0.0], Relation::Eq, 1.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 1.0], Relation::Eq, 1.0);
        lp.add_row(vec![1.0, 0.0, 1.0, 0.0], Relation::Eq, 1.0);
        lp.add_row(vec![0.0, 1.0, 0.0, 1.0], Relation::Eq, 1.0);
        let sol = expect_optimal(solve(&lp).unwrap());
        assert!((sol.objective - 2.0).abs() < 1e-9);
        let interior = sol
            .x
            .iter()
            .filter(|&&v| v > 1e-9)
            .count();
        assert!(interior <= lp.num_rows());
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // the classic cycling instance for Dantzig's rule; the Bland fallback
        // must still reach the optimum -1/20
        let mut lp = LinearProgram::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_row(vec![0.25, -60.0, -1.0 / 25.0, 9.0], Relation::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -1.0 / 50.0, 3.0], Relation::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = expect_optimal(solve(&lp).unwrap());
        assert!((sol.objective + 0.05).abs() < 1e-9, "objective {}", sol.objective);
    }

    #[test]
    fn redundant_rows_do_not_break_phase_transition() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Eq, 2.0);
        lp.add_row(vec![2.0, 2.0], Relation::Eq, 4.0); // same hyperplane
        lp.add_row(vec![1.0, 0.0], Relation::Ge, 0.5);
        let sol = expect_optimal(solve(&lp).unwrap());
        assert!((sol.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn feasibility_mode_zeroes_the_objective() {
        let mut lp = LinearProgram::minimize(vec![-5.0]); // would be unbounded
        lp.add_row(vec![1.0], Relation::Ge, 1.0);
        match solve_feasibility(&lp).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert_eq!(sol.objective, 0.0);
                assert!(sol.x[0] >= 1.0 - 1e-9);
            }
            other => panic!("expected feasible point, got {other:?}"),
        }
    }

    #[test]
    fn determinism_bit_for_bit() {
        let mut lp = LinearProgram::minimize(vec![1.0, -2.0, 0.5]);
        lp.add_row(vec![1.0, 1.0, 1.0], Relation::Le, 10.0);
        lp.add_row(vec![-1.0, 2.0, 0.0], Relation::Ge, -3.0);
        lp.add_row(vec![0.0, 1.0, 4.0], Relation::Eq, 5.0);
        let a = expect_optimal(solve(&lp).unwrap());
        let b = expect_optimal(solve(&lp).unwrap());
        assert_eq!(a.x, b.x);
        assert_eq!(a.duals, b.duals);
    }
}
