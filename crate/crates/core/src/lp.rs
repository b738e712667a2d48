//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for the handful of variables the negativity search needs. Pivoting
//! is fully deterministic: the entering column is the lowest-index column
//! with negative reduced cost, and ratio-test ties go to the row whose basic
//! variable has the lowest index.

use crate::error::{Error, Result};

/// Reduced costs above `-OPTIMALITY_TOL` count as nonnegative.
const OPTIMALITY_TOL: f64 = 1e-10;
/// Smallest admissible pivot magnitude.
pub const PIVOT_TOL: f64 = 1e-12;
/// Constraint slack allowed in a returned assignment.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Tableau entries smaller than this are flushed to zero after each pivot.
const ZERO_TOL: f64 = 1e-14;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    GreaterEq,
    Equal,
}

/// `minimize objective . x` subject to `matrix x (relation) rhs` and
/// `bounds[v].0 <= x[v] <= bounds[v].1`.
///
/// Bounds may be infinite; every other entry must be finite.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A program with no constraints and every variable in `[0, inf)`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            matrix: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.matrix.len()
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.matrix.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.bounds.len() != n {
            return bad(format!("{} bounds for {n} variables", self.bounds.len()));
        }
        if self.relations.len() != self.matrix.len() || self.rhs.len() != self.matrix.len() {
            return bad("constraint matrix, relations and rhs differ in length".into());
        }
        if let Some(row) = self.matrix.iter().position(|r| r.len() != n) {
            return bad(format!("constraint {row} has the wrong number of coefficients"));
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.rhs.iter().all(|v| v.is_finite())
            && self.matrix.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return bad("non-finite coefficient".into());
        }
        for (v, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return bad(format!("variable {v} has invalid bounds [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    /// Largest constraint or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for ((row, rel), &b) in self.matrix.iter().zip(&self.relations).zip(&self.rhs) {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let excess = match rel {
                Relation::LessEq => lhs - b,
                Relation::GreaterEq => b - lhs,
                Relation::Equal => (lhs - b).abs(),
            };
            worst = worst.max(excess / b.abs().max(1.0));
        }
        for (&v, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective at the optimum; `-inf` when unbounded, `NaN` when
    /// infeasible.
    pub optimal_value: f64,
    /// Empty unless the status is optimal.
    pub assignment: Vec<f64>,
}

/// How an original variable is recovered from nonnegative columns.
#[derive(Clone, Copy, Debug)]
enum Column {
    /// `x = lower + y`
    Shifted { col: usize, lower: f64 },
    /// `x = upper - y`
    Mirrored { col: usize, upper: f64 },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// Rows of `[coefficients..., rhs]`.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    num_cols: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> f64 {
        self.rows[row][self.num_cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.num_cols + 1;
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        self.rows[row][col] = 1.0;
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..width {
                r[j] -= factor * pivot_row[j];
                if r[j].abs() < ZERO_TOL {
                    r[j] = 0.0;
                }
            }
            r[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for (j, rj) in r.iter_mut().enumerate() {
                *rj -= cb * row[j];
            }
        }
        r
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        (0..self.rows.len())
            .map(|i| cost[self.basis[i]] * self.rhs(i))
            .sum()
    }

    /// Runs primal simplex on `cost` over the columns marked `allowed`.
    /// Returns `Ok(false)` when the objective is unbounded below.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        for _ in 0..MAX_ITERATIONS {
            let reduced = self.reduced_costs(cost);
            let entering = (0..self.num_cols).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && reduced[j] < -OPTIMALITY_TOL
            });
            let Some(col) = entering else {
                return Ok(true);
            };

            let mut leaving: Option<(usize, f64)> = None;
            let mut tiny_positive = false;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a <= PIVOT_TOL {
                    tiny_positive |= a > 0.0;
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - PIVOT_TOL
                            || (ratio <= best_ratio + PIVOT_TOL && self.basis[i] < self.basis[best])
                        {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None if tiny_positive => {
                    return Err(Error::Degenerate(format!(
                        "column {col} has only pivot candidates below {PIVOT_TOL:e}"
                    )))
                }
                None => return Ok(false),
            }
        }
        Err(Error::Degenerate(format!(
            "no convergence after {MAX_ITERATIONS} pivots"
        )))
    }
}

/// Solves `lp`. Identical input always yields identical output.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;

    // Nonnegative columns for the original variables.
    let mut columns = Vec::with_capacity(lp.num_vars());
    let mut num_cols = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        let column = if lo.is_finite() {
            if hi.is_finite() {
                bound_rows.push((num_cols, hi - lo));
            }
            Column::Shifted { col: num_cols, lower: lo }
        } else if hi.is_finite() {
            Column::Mirrored { col: num_cols, upper: hi }
        } else {
            num_cols += 1;
            Column::Split { pos: num_cols - 1, neg: num_cols }
        };
        num_cols += 1;
        columns.push(column);
    }
    let structural = num_cols;

    // Rows over the structural columns, with substituted right-hand sides.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for ((coeffs, &rel), &b) in lp.matrix.iter().zip(&lp.relations).zip(&lp.rhs) {
        let mut row = vec![0.0; structural];
        let mut rhs = b;
        for (&a, column) in coeffs.iter().zip(&columns) {
            match *column {
                Column::Shifted { col, lower } => {
                    row[col] += a;
                    rhs -= a * lower;
                }
                Column::Mirrored { col, upper } => {
                    row[col] -= a;
                    rhs -= a * upper;
                }
                Column::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows.push((row, rel, rhs));
    }
    for (col, width) in bound_rows {
        let mut row = vec![0.0; structural];
        row[col] = 1.0;
        rows.push((row, Relation::LessEq, width));
    }

    // Slack columns, then flip rows to a nonnegative right-hand side.
    let num_slacks = rows.iter().filter(|r| r.1 != Relation::Equal).count();
    let num_rows = rows.len();
    let mut tableau_rows = Vec::with_capacity(num_rows);
    let mut slack_of_row = vec![None; num_rows];
    let mut next_slack = structural;
    for (i, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
        let mut r = coeffs;
        r.resize(structural + num_slacks, 0.0);
        match rel {
            Relation::LessEq => r[next_slack] = 1.0,
            Relation::GreaterEq => r[next_slack] = -1.0,
            Relation::Equal => {}
        }
        if rel != Relation::Equal {
            slack_of_row[i] = Some(next_slack);
            next_slack += 1;
        }
        let mut rhs = rhs;
        if rhs < 0.0 {
            r.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        r.push(rhs);
        tableau_rows.push(r);
    }

    // Starting basis: a +1 slack where available, an artificial otherwise.
    let base_cols = structural + num_slacks;
    let mut basis = Vec::with_capacity(num_rows);
    let mut artificial_rows = Vec::new();
    for (i, r) in tableau_rows.iter().enumerate() {
        match slack_of_row[i] {
            Some(s) if r[s] == 1.0 => basis.push(s),
            _ => {
                basis.push(base_cols + artificial_rows.len());
                artificial_rows.push(i);
            }
        }
    }
    let num_artificial = artificial_rows.len();
    let total_cols = base_cols + num_artificial;
    for r in tableau_rows.iter_mut() {
        let rhs = r.pop().unwrap_or(0.0);
        r.resize(total_cols, 0.0);
        r.push(rhs);
    }
    for (k, &i) in artificial_rows.iter().enumerate() {
        tableau_rows[i][base_cols + k] = 1.0;
    }
    let mut tableau = Tableau {
        rows: tableau_rows,
        basis,
        num_cols: total_cols,
    };

    if num_artificial > 0 {
        let mut phase_one = vec![0.0; total_cols];
        phase_one[base_cols..].iter_mut().for_each(|c| *c = 1.0);
        let allowed = vec![true; total_cols];
        tableau.optimize(&phase_one, &allowed)?;
        if tableau.objective(&phase_one) > FEASIBILITY_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                optimal_value: f64::NAN,
                assignment: Vec::new(),
            });
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tableau.rows.len() {
            if tableau.basis[i] >= base_cols {
                let replacement =
                    (0..base_cols).find(|&j| tableau.rows[i][j].abs() > PIVOT_TOL);
                match replacement {
                    Some(j) => tableau.pivot(i, j),
                    None => {
                        tableau.rows.remove(i);
                        tableau.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![0.0; total_cols];
    for (&c, column) in lp.objective.iter().zip(&columns) {
        match *column {
            Column::Shifted { col, .. } => cost[col] += c,
            Column::Mirrored { col, .. } => cost[col] -= c,
            Column::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    let mut allowed = vec![true; total_cols];
    allowed[base_cols..].iter_mut().for_each(|a| *a = false);
    if !tableau.optimize(&cost, &allowed)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            optimal_value: f64::NEG_INFINITY,
            assignment: Vec::new(),
        });
    }

    let mut y = vec![0.0; total_cols];
    for (i, &b) in tableau.basis.iter().enumerate() {
        y[b] = tableau.rhs(i);
    }
    let assignment: Vec<f64> = columns
        .iter()
        .map(|column| match *column {
            Column::Shifted { col, lower } => lower + y[col],
            Column::Mirrored { col, upper } => upper - y[col],
            Column::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();

    let violation = lp.max_violation(&assignment);
    if violation > FEASIBILITY_TOL {
        return Err(Error::Degenerate(format!(
            "terminal basis violates constraints by {violation:e}"
        )));
    }
    let optimal_value = lp
        .objective
        .iter()
        .zip(&assignment)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        optimal_value,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound_constraint() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_free(0).add_constraint(vec![1.0], Relation::GreaterEq, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.optimal_value - 3.0).abs() < 1e-12);
        assert!((s.assignment[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(vec![-3.0, -5.0]);
        lp.add_constraint(vec![1.0, 0.0], Relation::LessEq, 4.0)
            .add_constraint(vec![0.0, 2.0], Relation::LessEq, 12.0)
            .add_constraint(vec![3.0, 2.0], Relation::LessEq, 18.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.optimal_value + 36.0).abs() < 1e-9);
        assert!((s.assignment[0] - 2.0).abs() < 1e-9);
        assert!((s.assignment[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_bounds() {
        // min x - y s.t. x + y = 1, x in [0.25, 2], y <= 0.5
        let mut lp = LinearProgram::new(vec![1.0, -1.0]);
        lp.set_bounds(0, 0.25, 2.0)
            .set_bounds(1, f64::NEG_INFINITY, 0.5)
            .add_constraint(vec![1.0, 1.0], Relation::Equal, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.assignment[0] - 0.5).abs() < 1e-12);
        assert!((s.assignment[1] - 0.5).abs() < 1e-12);
        assert!(s.optimal_value.abs() < 1e-12);
    }

    #[test]
    fn infeasible_program() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::LessEq, -1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_program() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_constraint(vec![1.0, -1.0], Relation::LessEq, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        assert_eq!(s.optimal_value, f64::NEG_INFINITY);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Equal, 2.0)
            .add_constraint(vec![2.0, 2.0], Relation::Equal, 4.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.optimal_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_vertex_does_not_cycle() {
        // Beale's cycling example.
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::LessEq, 0.0)
            .add_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::LessEq, 0.0)
            .add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::LessEq, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.optimal_value + 0.05).abs() < 1e-9);
    }

    #[test]
    fn rejects_malformed_programs() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0], Relation::LessEq, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidInput(_))));

        let mut lp = LinearProgram::new(vec![f64::NAN]);
        lp.add_constraint(vec![1.0], Relation::LessEq, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidInput(_))));

        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn deterministic_output() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0, 1.0]);
        lp.add_constraint(vec![1.0, 1.0, 1.0], Relation::GreaterEq, 1.0);
        let first = solve_lp(&lp).unwrap();
        for _ in 0..5 {
            assert_eq!(solve_lp(&lp).unwrap(), first);
        }
    }
}
