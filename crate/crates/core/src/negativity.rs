//! Minimum total negativity over the solution family of a box.
//!
//! The objective `sum_i max(0, -m_i(f))` is convex and piecewise linear in
//! the free parameters `f`, so its epigraph form
//!
//! ```text
//! minimize    sum_i t_i
//! subject to  t_i + m_i(f) >= 0,   t_i >= 0,   f free
//! ```
//!
//! is an ordinary linear program.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::model::{chsh_report, ensure_consistent, MeasureVector, ProbabilitySet};
use crate::solver::{affine_family, general_solution, independent_probs, FreeParameters, IndependentProbabilities};

/// Tolerance applied to optimization results.
pub const RESULT_EPS: f64 = 1e-6;

const NUM_FREE: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct NegativityResult {
    /// `sum_i max(0, -m_i)` of the witness.
    pub min_negativity: f64,
    pub witness: MeasureVector,
    pub witness_free_params: FreeParameters,
    /// The CHSH bound `max_v max(0, (|delta_v| - 2) / 4)`.
    pub lower_bound: f64,
    /// A nonnegative measure reproduces the box.
    pub feasible: bool,
}

/// Epigraph LP over the family: variables `0..7` are the free parameters,
/// `7..23` the per-strategy negative parts.
pub fn build_negativity_lp(ip: &IndependentProbabilities) -> LinearProgram {
    let (offset, jacobian) = affine_family(ip);
    let mut objective = vec![0.0; NUM_FREE];
    objective.extend([1.0; 16]);
    let mut lp = LinearProgram::new(objective);
    for v in 0..NUM_FREE {
        lp.set_free(v);
    }
    for (i, coeffs) in jacobian.iter().enumerate() {
        let mut row = vec![0.0; NUM_FREE + 16];
        row[..NUM_FREE].copy_from_slice(coeffs);
        row[NUM_FREE + i] = 1.0;
        lp.add_constraint(row, Relation::GreaterEq, -offset[i]);
    }
    lp
}

/// `max_v max(0, (|delta_v| - 2) / 4)` over the eight CHSH variants.
///
/// Any measure reproducing `p` carries at least this much negative weight.
pub fn chsh_lower_bound(p: &ProbabilitySet, eps: f64) -> Result<f64> {
    ensure_consistent(p, eps)?;
    let report = chsh_report(p, eps)?;
    Ok(((report.max_abs_delta - 2.0) / 4.0).max(0.0))
}

/// Finds a measure of least total negativity reproducing `p`.
pub fn min_negativity(p: &ProbabilitySet, eps: f64) -> Result<NegativityResult> {
    ensure_consistent(p, eps)?;
    let ip = independent_probs(p, eps)?;
    let lp = build_negativity_lp(&ip);
    let solution = solve_lp(&lp)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Degenerate(format!(
            "negativity program reported {:?}",
            solution.status
        )));
    }
    let mut free = [0.0; NUM_FREE];
    free.copy_from_slice(&solution.assignment[..NUM_FREE]);
    let witness_free_params = FreeParameters(free);
    let witness = general_solution(&ip, &witness_free_params);
    let min_negativity = witness.total_negativity();
    Ok(NegativityResult {
        min_negativity,
        witness,
        witness_free_params,
        lower_bound: chsh_lower_bound(p, eps)?,
        feasible: min_negativity <= RESULT_EPS,
    })
}
