//! The one-parameter family for boxes correlated on (a1, b1), applied to the
//! PR box and to a singlet box with B's outcomes relabeled.
//!
//! ```bash
//! cargo run --example perfect_correlation
//! ```

use quasilocal::{
    chsh_from_measures, generate_probability_set, perfect_correlation_solution, Party,
    ProbabilitySet, QubitScenario, TwoQubitState,
};

fn main() {
    let pr = ProbabilitySet::pr_box();
    for m16 in [0.0, 0.25, -0.25] {
        let m = perfect_correlation_solution(&pr, m16, 1e-9).unwrap();
        println!("PR box, m16 = {m16:+}: {:?}", m.weights());
        println!("  m4 + m13 = {}, chsh = {}", m[3] + m[12], chsh_from_measures(&m, 1e-9).unwrap());
    }

    // the singlet is anticorrelated along equal directions
    let singlet = generate_probability_set(&QubitScenario::coplanar(
        TwoQubitState::singlet(),
        0.0,
        90.0,
        0.0,
        45.0,
    ));
    println!("\nsinglet block (a1, b1): {:?}", singlet.block(quasilocal::SettingPair::ALL[0]));
    match perfect_correlation_solution(&singlet, 0.0, 1e-9) {
        Ok(_) => unreachable!(),
        Err(e) => println!("  {e}"),
    }
    let flipped = singlet.flip_outcomes(Party::B);
    let m = perfect_correlation_solution(&flipped, 0.0, 1e-9).unwrap();
    println!("after relabeling B: negativity {:.6}", m.total_negativity());
}
