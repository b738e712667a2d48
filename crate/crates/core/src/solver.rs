//! Inversion of the forward map.
//!
//! A consistent box is fixed by eight of its entries, and the forward map
//! plus normalization gives nine equations in sixteen weights. The solution
//! set is therefore a 7-dimensional affine family, parameterized here by the
//! weights of strategies 2, 3, 7, 10, 14, 15 and 16.

use crate::error::{Error, Result};
use crate::model::{
    check_derived_relations, check_range, dependent_entries, ensure_consistent, MeasureVector,
    ProbabilitySet, DEPENDENT_ENTRIES, INDEPENDENT_ENTRIES,
};

/// Strategy numbers of the free weights, in parameter order.
pub const FREE_STRATEGIES: [usize; 7] = [2, 3, 7, 10, 14, 15, 16];

/// Strategy numbers of the weights the solution determines.
pub const DETERMINED_STRATEGIES: [usize; 9] = [1, 4, 5, 6, 8, 9, 11, 12, 13];

/// Coordinates on the solution family: the weights of strategies
/// `[2, 3, 7, 10, 14, 15, 16]`. Any values are admissible.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FreeParameters(pub [f64; 7]);

impl FreeParameters {
    pub fn zeros() -> Self {
        FreeParameters([0.0; 7])
    }

    pub fn splat(value: f64) -> Self {
        FreeParameters([value; 7])
    }

    /// Reads the free coordinates off an existing measure vector.
    pub fn from_measures(m: &MeasureVector) -> Self {
        FreeParameters(FREE_STRATEGIES.map(|n| m[n - 1]))
    }

    pub fn values(&self) -> &[f64; 7] {
        &self.0
    }
}

/// The entries `[p1, p4, p5, p8, p9, p12, p14, p15]` of a consistent box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndependentProbabilities(pub [f64; 8]);

impl IndependentProbabilities {
    pub fn splat(value: f64) -> Self {
        IndependentProbabilities([value; 8])
    }

    pub fn values(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Extracts the independent entries from a consistent box.
pub fn independent_probs(p: &ProbabilitySet, eps: f64) -> Result<IndependentProbabilities> {
    let mut violations = check_range(p, eps);
    violations.extend(check_derived_relations(p, eps));
    if !violations.is_empty() {
        return Err(Error::Inconsistent(violations));
    }
    Ok(IndependentProbabilities(INDEPENDENT_ENTRIES.map(|n| p.entry(n))))
}

/// Rebuilds the full box, rejecting independent values whose extension
/// leaves `[0, 1]`.
pub fn reconstruct_probs(ip: &IndependentProbabilities, eps: f64) -> Result<ProbabilitySet> {
    let mut p = [0.0; 16];
    for (&n, &v) in INDEPENDENT_ENTRIES.iter().zip(ip.values()) {
        p[n - 1] = v;
    }
    for (&n, v) in DEPENDENT_ENTRIES.iter().zip(dependent_entries(ip.values())) {
        p[n - 1] = v;
    }
    let bad: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, &v)| !(v >= -eps && v <= 1.0 + eps))
        .map(|(i, v)| format!("p{} = {v}", i + 1))
        .collect();
    if !bad.is_empty() {
        return Err(Error::InfeasibleIndependentSet(bad.join(", ")));
    }
    Ok(ProbabilitySet::new(p))
}

/// The member of the solution family at coordinates `f`.
///
/// Total affine map; the result always sums to one and reproduces the box
/// that `ip` determines.
pub fn general_solution(ip: &IndependentProbabilities, f: &FreeParameters) -> MeasureVector {
    let [p1, p4, p5, p8, p9, p12, p14, p15] = ip.0;
    let [m2, m3, m7, m10, m14, m15, m16] = f.0;
    let s = ip.sum();

    let m1 = 0.5 * (-1.0 - 2.0 * (m2 + m3 + m7 + m10 + m14 + m15 + m16) + s);
    let m4 = 0.5
        * (1.0 + 2.0 * (m7 + m10 + m14 + m15 + m16) + p1 - p4 - p5 - p8 - p9 - p12 - p14 - p15);
    let m5 = 0.5
        * (1.0 + 2.0 * (m2 + m10 + m14 + m15 + m16) - p1 - p4 + p5 - p8 - p9 - p12 - p14 - p15);
    let m6 = -m2 - m10 - m14 + p14;
    let m8 = -m7 - m15 - m16 + p12;
    let m9 = 0.5
        * (1.0 + 2.0 * (m3 + m7 + m14 + m15 + m16) - p1 - p4 - p5 - p8 + p9 - p12 - p14 - p15);
    let m11 = -m3 - m7 - m15 + p15;
    let m12 = -m10 - m14 - m16 + p8;
    let m13 = -m14 - m15 - m16 + p4;

    MeasureVector::new([
        m1, m2, m3, m4, m5, m6, m7, m8, m9, m10, m11, m12, m13, m14, m15, m16,
    ])
}

/// `general_solution(independent_probs(p), f)`.
pub fn solve(p: &ProbabilitySet, f: &FreeParameters, eps: f64) -> Result<MeasureVector> {
    let ip = independent_probs(p, eps)?;
    Ok(general_solution(&ip, f))
}

/// The solution family as `m(f) = offset + jacobian * f`.
///
/// Row `i` of `jacobian` holds the coefficients of strategy `i + 1`.
pub fn affine_family(ip: &IndependentProbabilities) -> ([f64; 16], [[f64; 7]; 16]) {
    let offset = *general_solution(ip, &FreeParameters::zeros()).weights();
    let mut jacobian = [[0.0; 7]; 16];
    for col in 0..7 {
        let mut unit = [0.0; 7];
        unit[col] = 1.0;
        let m = general_solution(ip, &FreeParameters(unit));
        // coefficients of the family are integers
        for (row, coeffs) in jacobian.iter_mut().enumerate() {
            coeffs[col] = (m[row] - offset[row]).round();
        }
    }
    (offset, jacobian)
}

/// The one-parameter family for boxes where `a1` and `b1` always agree
/// (`p2 = p3 = 0`): strategies 5 through 12 get zero weight and `m16` is
/// the remaining free coordinate.
pub fn perfect_correlation_solution(
    p: &ProbabilitySet,
    m16: f64,
    eps: f64,
) -> Result<MeasureVector> {
    ensure_consistent(p, eps)?;
    let (p2, p3) = (p.entry(2), p.entry(3));
    if p2.abs() > eps || p3.abs() > eps {
        return Err(Error::Precondition(format!(
            "a1 and b1 are not perfectly correlated: p2 = {p2}, p3 = {p3}"
        )));
    }
    let [p4, p8, p9, p12, p14, p15] = [4, 8, 9, 12, 14, 15].map(|n| p.entry(n));

    let mut m = [0.0; 16];
    m[0] = -m16 + p8 + p9 - p14;
    m[1] = m16 - p8 + p14;
    m[2] = m16 - p12 + p15;
    m[3] = 1.0 - m16 - p4 - p9 + p12 - p15;
    m[12] = m16 + p4 - p8 - p12;
    m[13] = -m16 + p8;
    m[14] = -m16 + p12;
    m[15] = m16;
    Ok(MeasureVector::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{chsh_from_measures, forward_map, sigmas, Strategy, DEFAULT_EPS};
    use std::f64::consts::SQRT_2;

    fn assert_close_all(a: &[f64], b: &[f64], tol: f64) {
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).abs() <= tol, "index {i}: {x} vs {y}");
        }
    }

    #[test]
    fn independent_probs_examples() {
        let ip = independent_probs(&ProbabilitySet::uniform(), DEFAULT_EPS).unwrap();
        assert_eq!(ip, IndependentProbabilities::splat(0.25));
        let ip = independent_probs(&ProbabilitySet::tsirelson(), DEFAULT_EPS).unwrap();
        assert_close_all(ip.values(), &[(2.0 + SQRT_2) / 8.0; 8], 1e-15);
        let ip = independent_probs(&ProbabilitySet::pr_box(), DEFAULT_EPS).unwrap();
        assert_eq!(ip, IndependentProbabilities::splat(0.5));

        let mut entries = *ProbabilitySet::uniform().entries();
        entries[2] = 0.4;
        let err = independent_probs(&ProbabilitySet::new(entries), DEFAULT_EPS).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(ref v) if !v.is_empty()));
    }

    #[test]
    fn reconstruct_probs_examples() {
        let p = reconstruct_probs(&IndependentProbabilities::splat(0.25), DEFAULT_EPS).unwrap();
        assert_close_all(p.entries(), ProbabilitySet::uniform().entries(), 1e-15);

        let high = (2.0 + SQRT_2) / 8.0;
        let p = reconstruct_probs(&IndependentProbabilities::splat(high), DEFAULT_EPS).unwrap();
        assert_close_all(p.entries(), ProbabilitySet::tsirelson().entries(), 1e-15);

        let err = reconstruct_probs(&IndependentProbabilities::splat(1.0), DEFAULT_EPS).unwrap_err();
        match err {
            Error::InfeasibleIndependentSet(msg) => assert!(msg.contains("p2 = -0.5"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn general_solution_equally_distributed() {
        let ip = IndependentProbabilities::splat((2.0 + SQRT_2) / 8.0);
        let m = general_solution(&ip, &FreeParameters::splat((1.0 + SQRT_2) / 16.0));
        assert_close_all(
            m.weights(),
            MeasureVector::equally_distributed_tsirelson().weights(),
            1e-15,
        );
    }

    #[test]
    fn general_solution_uniform() {
        let m = general_solution(
            &IndependentProbabilities::splat(0.25),
            &FreeParameters::splat(1.0 / 16.0),
        );
        assert_close_all(m.weights(), &[1.0 / 16.0; 16], 1e-15);
    }

    #[test]
    fn general_solution_pr_box() {
        let ip = IndependentProbabilities::splat(0.5);
        let m = general_solution(&ip, &FreeParameters([0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0]));
        let mut expected = [0.0; 16];
        expected[0] = 0.5;
        expected[12] = -0.5;
        expected[13] = 0.5;
        expected[14] = 0.5;
        assert_close_all(m.weights(), &expected, 1e-15);
        assert_close_all(forward_map(&m).entries(), ProbabilitySet::pr_box().entries(), 1e-15);
        assert_eq!(sigmas(&m).sigma1, -0.5);
    }

    #[test]
    fn free_parameters_read_back() {
        let f = FreeParameters([0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7]);
        let m = general_solution(&IndependentProbabilities::splat(0.25), &f);
        assert_eq!(FreeParameters::from_measures(&m), f);
    }

    #[test]
    fn affine_family_matches_general_solution() {
        let ip = IndependentProbabilities([0.3, 0.2, 0.35, 0.15, 0.4, 0.1, 0.3, 0.25]);
        let (offset, jac) = affine_family(&ip);
        let f = FreeParameters([1.5, -2.0, 0.25, 3.0, -0.75, 0.5, 2.0]);
        let m = general_solution(&ip, &f);
        for i in 0..16 {
            let predicted: f64 = offset[i] + (0..7).map(|c| jac[i][c] * f.0[c]).sum::<f64>();
            assert!((predicted - m[i]).abs() < 1e-12);
        }
        // free coordinates map to themselves
        for (col, &n) in FREE_STRATEGIES.iter().enumerate() {
            assert_eq!(jac[n - 1][col], 1.0);
        }
    }

    #[test]
    fn perfect_correlation_deterministic_box() {
        let p = ProbabilitySet::deterministic(Strategy::from_index(0));
        let m = perfect_correlation_solution(&p, 0.0, DEFAULT_EPS).unwrap();
        let mut expected = [0.0; 16];
        expected[0] = 1.0;
        assert_close_all(m.weights(), &expected, 0.0);
    }

    #[test]
    fn perfect_correlation_pr_box() {
        let p = ProbabilitySet::pr_box();
        let m = perfect_correlation_solution(&p, 0.0, DEFAULT_EPS).unwrap();
        let mut expected = [0.0; 16];
        expected[0] = 0.5;
        expected[12] = -0.5;
        expected[13] = 0.5;
        expected[14] = 0.5;
        assert_close_all(m.weights(), &expected, 1e-15);
        assert_eq!(m[3] + m[12], 1.0 - p.entry(8) - p.entry(9) - p.entry(15));
        assert_eq!(chsh_from_measures(&m, DEFAULT_EPS).unwrap(), 4.0);
    }

    #[test]
    fn perfect_correlation_rejects_uncorrelated_box() {
        let err = perfect_correlation_solution(&ProbabilitySet::uniform(), 0.0, DEFAULT_EPS)
            .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let mut bad = *ProbabilitySet::pr_box().entries();
        bad[0] = 0.7;
        assert!(matches!(
            perfect_correlation_solution(&ProbabilitySet::new(bad), 0.0, DEFAULT_EPS),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn perfect_correlation_violation_forces_negative_weight() {
        // correlated box with p8 + p9 + p15 > 1
        let p = ProbabilitySet::pr_box().mix(&ProbabilitySet::deterministic(Strategy::from_index(0)), 0.2);
        assert!(p.entry(8) + p.entry(9) + p.entry(15) > 1.0);
        for m16 in [-1.0, -0.1, 0.0, 0.3, 2.0] {
            let m = perfect_correlation_solution(&p, m16, DEFAULT_EPS).unwrap();
            assert!(m[3] < 0.0 || m[12] < 0.0);
        }
    }

    #[test]
    fn solve_examples() {
        let m = solve(&ProbabilitySet::uniform(), &FreeParameters::splat(1.0 / 16.0), DEFAULT_EPS)
            .unwrap();
        assert_close_all(m.weights(), &[1.0 / 16.0; 16], 1e-15);

        let m = solve(
            &ProbabilitySet::tsirelson(),
            &FreeParameters::splat((1.0 + SQRT_2) / 16.0),
            DEFAULT_EPS,
        )
        .unwrap();
        assert_close_all(
            m.weights(),
            MeasureVector::equally_distributed_tsirelson().weights(),
            1e-15,
        );

        let p = ProbabilitySet::tsirelson().mix(&ProbabilitySet::uniform(), 0.3);
        let m = solve(&p, &FreeParameters::zeros(), DEFAULT_EPS).unwrap();
        assert!((m.total() - 1.0).abs() < 1e-12);
        assert_close_all(forward_map(&m).entries(), p.entries(), 1e-12);
    }
}
