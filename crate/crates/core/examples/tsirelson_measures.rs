//! The equally distributed signed measure that reproduces the Tsirelson box.
//!
//! ```bash
//! cargo run --example tsirelson_measures
//! ```

use quasilocal::{chsh_from_measures, chsh_report, forward_map, MeasureVector};

fn main() {
    let m = MeasureVector::equally_distributed_tsirelson();
    for (s, w) in m.iter() {
        println!("m{:<2} {}  {w:+.6}", s.number(), s.pattern());
    }
    println!("total negativity {:.6}", m.total_negativity());

    let p = forward_map(&m);
    for (pair, block) in quasilocal::SettingPair::ALL.iter().map(|&q| (q, p.block(q))) {
        println!("a{} b{}: {:?}", pair.j(), pair.k(), block);
    }

    let delta = chsh_from_measures(&m, 1e-9).unwrap();
    println!("chsh from measures {delta:.12}");
    println!("max |chsh| over variants {:.12}", chsh_report(&p, 1e-9).unwrap().max_abs_delta);
}
