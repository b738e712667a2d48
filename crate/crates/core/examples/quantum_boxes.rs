//! Born-rule boxes for two qubits and a coplanar grid search for the
//! largest CHSH value.
//!
//! ```bash
//! cargo run --release --example quantum_boxes -- 5
//! ```

use num_complex::Complex64;
use quasilocal::{
    chsh_report, generate_probability_set, maximize_chsh, QubitScenario, TwoQubitState,
};

fn main() {
    let resolution: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5.0);

    let s = QubitScenario::coplanar(TwoQubitState::singlet(), 0.0, 270.0, 135.0, 225.0);
    let p = generate_probability_set(&s);
    println!("singlet at a1=0 a2=270 b1=135 b2=225");
    println!("  block (a1, b1): {:?}", p.block(quasilocal::SettingPair::ALL[0]));
    println!("  canonical chsh: {}", chsh_report(&p, 1e-9).unwrap().canonical_delta());

    let r = 0.5f64.sqrt();
    let states = [
        ("singlet", TwoQubitState::singlet()),
        ("phi+", TwoQubitState::new([r, 0.0, 0.0, r].map(|x| Complex64::new(x, 0.0))).unwrap()),
        (
            "partly entangled",
            TwoQubitState::normalized([0.9, 0.0, 0.0, 0.3].map(|x| Complex64::new(x, 0.0))).unwrap(),
        ),
        ("product |++>", TwoQubitState::basis(quasilocal::Outcome::Plus, quasilocal::Outcome::Plus)),
    ];
    println!("\ngrid search, {resolution} degree steps:");
    for (name, state) in states {
        let best = maximize_chsh(&state, resolution).unwrap();
        println!(
            "  {name:<17} {:.6} at {:?} ({})",
            best.best_delta,
            best.angles,
            best.variant.label()
        );
    }
}
