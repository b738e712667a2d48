//! A CHSH violation forces negative weights: sample signed measure vectors
//! and tally how the violation and the sign pattern line up.
//!
//! ```bash
//! cargo run --example necessity_theorem -- 20000
//! ```

use quasilocal::{negativity_necessity_verdict, MeasureVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut counts = [[0usize; 2]; 2]; // [violates][has negative]
    for _ in 0..n {
        let mut w: [f64; 16] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let shift = (1.0 - w.iter().sum::<f64>()) / 16.0;
        w.iter_mut().for_each(|v| *v += shift);
        let v = negativity_necessity_verdict(&MeasureVector::new(w), 1e-9);
        counts[v.violates_canonical_chsh as usize][v.has_negative_entry as usize] += 1;
    }
    println!("{n} normalized measure vectors, entries in [-2, 2] before shifting");
    println!("                 all >= 0   some < 0");
    println!("|chsh| <= 2   {:>10} {:>10}", counts[0][0], counts[0][1]);
    println!("|chsh| >  2   {:>10} {:>10}", counts[1][0], counts[1][1]);
    assert_eq!(counts[1][0], 0);

    // a nonnegative vector never violates
    let v = negativity_necessity_verdict(&MeasureVector::uniform(), 1e-9);
    println!("uniform: chsh {} sigma1 {}", v.delta, v.sigmas.sigma1);
}
