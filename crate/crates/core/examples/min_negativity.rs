//! Least total negativity along the PR-box / uniform mixing line, next to the
//! bound implied by the largest CHSH value.
//!
//! ```bash
//! cargo run --example min_negativity
//! ```

use quasilocal::{min_negativity, ProbabilitySet};

fn main() {
    println!("{:>6} {:>12} {:>12} {:>9}", "lambda", "negativity", "chsh bound", "local");
    for step in 0..=10 {
        let lambda = step as f64 / 10.0;
        let p = ProbabilitySet::uniform().mix(&ProbabilitySet::pr_box(), lambda);
        let r = min_negativity(&p, 1e-9).unwrap();
        println!(
            "{lambda:>6.1} {:>12.6} {:>12.6} {:>9}",
            r.min_negativity, r.lower_bound, r.feasible
        );
    }

    let r = min_negativity(&ProbabilitySet::tsirelson(), 1e-9).unwrap();
    println!("\nTsirelson box: {:.12} (bound {:.12})", r.min_negativity, r.lower_bound);
    for (s, w) in r.witness.iter().filter(|(_, w)| w.abs() > 1e-12) {
        println!("  {} {w:+.6}", s.pattern());
    }
}
