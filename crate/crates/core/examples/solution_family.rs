//! Every box has a seven-parameter family of measure vectors. Walk one
//! parameter and watch the weights move while the box stays fixed.
//!
//! ```bash
//! cargo run --example solution_family
//! ```

use quasilocal::solver::{affine_family, FREE_STRATEGIES};
use quasilocal::{
    forward_map, independent_probs, sigmas, solve, FreeParameters, ProbabilitySet,
};

fn main() {
    let p = ProbabilitySet::tsirelson();
    let ip = independent_probs(&p, 1e-9).unwrap();
    println!("independent probabilities {:?}", ip.values());
    println!("sum {:.6}, so sigma1 = {:.6} for every member", ip.sum(), 0.5 * (3.0 - ip.sum()));

    let (offset, coeffs) = affine_family(&ip);
    println!("\nm_i = offset + sum_k c_ik f_k, f = weights of strategies {FREE_STRATEGIES:?}");
    for i in 0..16 {
        let c: Vec<String> = coeffs[i].iter().map(|c| format!("{c:>3}")).collect();
        println!("m{:<2} {:>9.5} [{}]", i + 1, offset[i], c.join(" "));
    }

    println!("\nvarying the weight of strategy 16:");
    for t in [-0.2, 0.0, 0.1, 0.3] {
        let mut f = FreeParameters::zeros();
        f.0[6] = t;
        let m = solve(&p, &f, 1e-9).unwrap();
        let drift = forward_map(&m)
            .entries()
            .iter()
            .zip(p.entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "m16 = {t:+.2}: negativity {:.5}, sigma1 {:.5}, box drift {drift:.1e}",
            m.total_negativity(),
            sigmas(&m).sigma1
        );
    }
}
