//! Reading and writing the two text formats, plus their JSON forms.
//!
//! ```bash
//! cargo run --example box_files
//! ```

use quasilocal::format::{box_to_json, parse_box, parse_measures, write_box, write_measures};
use quasilocal::{check_consistency, solve, FreeParameters, ProbabilitySet};

const INPUT: &str = "\
# PR box, one block per setting pair
a1 + b1 + 0.5
a1 + b1 - 0
a1 - b1 + 0
a1 - b1 - 0.5
A1 + B2 + 0.5   # labels are case-insensitive
a1 + b2 - 0
a1 - b2 + 0
a1 - b2 - 0.5
a2 + b1 + 0.5
a2 + b1 - 0
a2 - b1 + 0
a2 - b1 - 0.5
a2 + b2 + 0
a2 + b2 - 0.5
a2 - b2 + 0.5
a2 - b2 - 0
";

fn main() {
    let p = parse_box(INPUT).unwrap();
    assert_eq!(p, ProbabilitySet::pr_box());
    println!("consistent: {}", check_consistency(&p, 1e-9).is_empty());

    let m = solve(&p, &FreeParameters::zeros(), 1e-9).unwrap();
    let text = write_measures(&m, &["zero free parameters".to_string()]);
    print!("{text}");
    assert_eq!(parse_measures(&text).unwrap(), m);

    let json = box_to_json(&p).to_string();
    println!("\n{json}");
    assert_eq!(parse_box(&json).unwrap(), p);

    match parse_box("a1 + b1 + 0.5\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("\nincomplete file: {e}"),
    }
    print!("\n{}", write_box(&ProbabilitySet::uniform(), &[]));
}
