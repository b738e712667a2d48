mod common;

use common::max_abs_diff;
use quasilocal::model::INDEPENDENT_ENTRIES;
use quasilocal::{
    forward_map, independent_probs, perfect_correlation_solution, sigmas, solve, FreeParameters,
    Party, ProbabilitySet, QubitScenario, TwoQubitState,
};

#[test]
fn round_trip_holds_for_large_free_parameters() {
    let mut rng = common::rng(10);
    for _ in 0..300 {
        let p = common::random_consistent_box(&mut rng);
        for scale in [1.0, 10.0, 1e3] {
            let f = common::random_free_params(&mut rng, scale);
            let m = solve(&p, &f, 1e-9).unwrap();
            let back = forward_map(&m);
            assert!(max_abs_diff(back.entries(), p.entries()) < 1e-9, "scale {scale}");
            assert!((m.total() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn solution_is_affine_in_free_parameters() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let p = common::random_consistent_box(&mut rng);
        let [f0, f1, f2] = [0, 1, 2].map(|_| common::random_free_params(&mut rng, 5.0));
        let combined = FreeParameters(std::array::from_fn(|i| f1.0[i] + f2.0[i] - f0.0[i]));
        let [m0, m1, m2, mc] = [&f0, &f1, &f2, &combined].map(|f| solve(&p, f, 1e-9).unwrap());
        for i in 0..16 {
            let lhs = m1[i] + m2[i] - m0[i];
            assert!((lhs - mc[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn sigma1_depends_only_on_independent_sum() {
    let mut rng = common::rng(12);
    for _ in 0..200 {
        let p = common::random_consistent_box(&mut rng);
        let s: f64 = INDEPENDENT_ENTRIES.iter().map(|&e| p.entry(e)).sum();
        assert!((independent_probs(&p, 1e-9).unwrap().sum() - s).abs() < 1e-15);
        for _ in 0..10 {
            let f = common::random_free_params(&mut rng, 10.0);
            let m = solve(&p, &f, 1e-9).unwrap();
            assert!((sigmas(&m).sigma1 - 0.5 * (3.0 - s)).abs() < 1e-9);
        }
    }
}

fn perfectly_correlated_boxes() -> Vec<ProbabilitySet> {
    let mut boxes = vec![ProbabilitySet::pr_box()];
    // the singlet anticorrelates on (a1, b1); flipping B's outcomes correlates it
    for b2 in [30.0, 45.0, 90.0, 135.0, 200.0] {
        let s = QubitScenario::coplanar(TwoQubitState::singlet(), 0.0, 90.0, 0.0, b2);
        boxes.push(quasilocal::generate_probability_set(&s).flip_outcomes(Party::B));
    }
    let all_plus = ProbabilitySet::deterministic(quasilocal::Strategy::from_index(0));
    boxes.push(ProbabilitySet::pr_box().mix(&all_plus, 0.3));
    boxes.retain(|p| p.entry(2).abs() < 1e-12 && p.entry(3).abs() < 1e-12);
    boxes
}

#[test]
fn perfect_correlation_family_is_a_line_with_constant_image() {
    let boxes = perfectly_correlated_boxes();
    assert!(boxes.len() >= 6);
    for p in boxes {
        let target = 1.0 - p.entry(8) - p.entry(9) - p.entry(15);
        let base = perfect_correlation_solution(&p, 0.0, 1e-9).unwrap();
        let unit = perfect_correlation_solution(&p, 1.0, 1e-9).unwrap();
        for m16 in [-3.0, -0.5, 0.0, 0.25, 1.0, 7.5] {
            let m = perfect_correlation_solution(&p, m16, 1e-9).unwrap();
            assert!(max_abs_diff(forward_map(&m).entries(), p.entries()) < 1e-9);
            assert!((m[3] + m[12] - target).abs() < 1e-12);
            for i in 0..16 {
                let on_line = base[i] + m16 * (unit[i] - base[i]);
                assert!((m[i] - on_line).abs() < 1e-12);
            }
            // the same point of the general family
            let f = FreeParameters([m[1], m[2], 0.0, 0.0, m[13], m[14], m[15]]);
            let general = solve(&p, &f, 1e-9).unwrap();
            assert!(max_abs_diff(general.weights(), m.weights()) < 1e-12);
        }
    }
}

#[test]
fn perfect_correlation_rejects_anticorrelated_boxes() {
    let singlet = quasilocal::generate_probability_set(&QubitScenario::coplanar(
        TwoQubitState::singlet(),
        0.0,
        90.0,
        0.0,
        45.0,
    ));
    assert!(matches!(
        perfect_correlation_solution(&singlet, 0.0, 1e-9),
        Err(quasilocal::Error::Precondition(_))
    ));
}
