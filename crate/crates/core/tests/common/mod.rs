#![allow(dead_code)]

use quasilocal::{
    forward_map, FreeParameters, MeasureVector, MeasurementDirection, Party, ProbabilitySet,
    QubitScenario, TwoQubitState,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5EED_2000;

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream)
}

/// Entries drawn from `[-2, 2]`, then shifted so they sum to one.
pub fn random_signed_measure(rng: &mut impl Rng) -> MeasureVector {
    let mut w = [0.0; 16];
    for v in w.iter_mut() {
        *v = rng.gen_range(-2.0..2.0);
    }
    let shift = (1.0 - w.iter().sum::<f64>()) / 16.0;
    w.iter_mut().for_each(|v| *v += shift);
    MeasureVector::new(w)
}

pub fn random_nonnegative_measure(rng: &mut impl Rng) -> MeasureVector {
    let mut w = [0.0; 16];
    for v in w.iter_mut() {
        // exponential weights give a uniform point on the simplex
        *v = -rng.gen_range(f64::EPSILON..1.0f64).ln();
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    MeasureVector::new(w)
}

/// One of the four PR boxes reachable by relabeling outcomes.
pub fn random_pr_box(rng: &mut impl Rng) -> ProbabilitySet {
    let mut p = ProbabilitySet::pr_box();
    if rng.gen_bool(0.5) {
        p = p.flip_outcomes(Party::A);
    }
    if rng.gen_bool(0.5) {
        p = p.flip_outcomes(Party::B);
    }
    p
}

/// A consistent box: a random local box mixed with a PR box.
pub fn random_consistent_box(rng: &mut impl Rng) -> ProbabilitySet {
    let local = forward_map(&random_nonnegative_measure(rng));
    let weight = rng.gen_range(0.0..1.0);
    local.mix(&random_pr_box(rng), weight)
}

pub fn random_free_params(rng: &mut impl Rng, scale: f64) -> FreeParameters {
    let mut f = [0.0; 7];
    for v in f.iter_mut() {
        *v = rng.gen_range(-scale..scale);
    }
    FreeParameters(f)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn random_state(rng: &mut impl Rng) -> TwoQubitState {
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for a in amps.iter_mut() {
        *a = Complex64::new(gaussian(rng), gaussian(rng));
    }
    TwoQubitState::normalized(amps).unwrap()
}

pub fn random_direction(rng: &mut impl Rng) -> MeasurementDirection {
    loop {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-6 {
            if let Ok(d) = MeasurementDirection::new(v.map(|c| c / n)) {
                return d;
            }
        }
    }
}

pub fn random_scenario(rng: &mut impl Rng) -> QubitScenario {
    QubitScenario {
        state: random_state(rng),
        a1: random_direction(rng),
        a2: random_direction(rng),
        b1: random_direction(rng),
        b2: random_direction(rng),
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Strategy numbers summed into each joint probability, row by row.
const FORWARD_TABLE: [[usize; 4]; 16] = [
    [1, 2, 3, 4],
    [5, 6, 7, 8],
    [9, 10, 11, 12],
    [13, 14, 15, 16],
    [1, 3, 5, 7],
    [2, 4, 6, 8],
    [9, 11, 13, 15],
    [10, 12, 14, 16],
    [1, 2, 9, 10],
    [5, 6, 13, 14],
    [3, 4, 11, 12],
    [7, 8, 15, 16],
    [1, 5, 9, 13],
    [2, 6, 10, 14],
    [3, 7, 11, 15],
    [4, 8, 12, 16],
];

/// Solves a square system by Gaussian elimination with partial pivoting;
/// `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Parametrizes `{m : forward_map(m) = p, sum m = 1}` from scratch by
/// reducing the linear system to row echelon form. Returns the particular
/// solution and the null-space basis (one column per free variable).
pub fn solution_family_by_elimination(p: &ProbabilitySet) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (entry, members) in FORWARD_TABLE.iter().enumerate() {
        let mut r = vec![0.0; 17];
        for &s in members {
            r[s - 1] = 1.0;
        }
        r[16] = p.entry(entry + 1);
        rows.push(r);
    }
    let mut ones = vec![1.0; 17];
    ones[16] = 1.0;
    rows.push(ones);

    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..16 {
        let Some(piv) = (r..rows.len()).max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs())) else {
            break;
        };
        if rows[piv][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(r, piv);
        let lead = rows[r][col];
        rows[r].iter_mut().for_each(|v| *v /= lead);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][col];
                if f != 0.0 {
                    for k in 0..17 {
                        rows[i][k] -= f * rows[r][k];
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..16).filter(|c| !pivots.contains(c)).collect();
    let mut particular = vec![0.0; 16];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = rows[i][16];
    }
    let mut basis = vec![vec![0.0; free.len()]; 16];
    for (k, &fc) in free.iter().enumerate() {
        basis[fc][k] = 1.0;
        for (i, &c) in pivots.iter().enumerate() {
            basis[c][k] = -rows[i][fc];
        }
    }
    (particular, basis)
}

/// Minimum of `sum_i max(0, -m_i)` over the solution family of `p`, found
/// by enumerating every vertex of the hyperplane arrangement `m_i = 0`.
///
/// The objective is convex and piecewise linear with linear pieces on the
/// (pointed) cells of the arrangement, so its minimum sits at a vertex.
pub fn min_negativity_by_vertex_enumeration(p: &ProbabilitySet) -> f64 {
    let (particular, basis) = solution_family_by_elimination(p);
    let dim = basis[0].len();
    assert_eq!(dim, 7, "solution family should be 7-dimensional");
    let objective = |f: &[f64]| -> f64 {
        (0..16)
            .map(|i| {
                let m = particular[i] + (0..dim).map(|k| basis[i][k] * f[k]).sum::<f64>();
                (-m).max(0.0)
            })
            .sum()
    };
    let mut best = f64::INFINITY;
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| basis[i].clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| -particular[i]).collect();
        if let Some(f) = solve_square(a, b) {
            best = best.min(objective(&f));
        }
        // next combination
        let mut i = dim;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < 16 - dim + i {
                subset[i] += 1;
                for j in i + 1..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}
