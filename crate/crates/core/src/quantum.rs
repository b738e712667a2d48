//! Born-rule boxes for two qubits measured along spin directions.
//!
//! Amplitudes are ordered `|++>, |+->, |-+>, |-->` in the z basis, first
//! symbol for qubit A. Outcome `+` along direction `n` is the projector
//! `(I + n.sigma) / 2`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ChshVariant, Outcome, ProbabilitySet, Setting, SettingPair};

const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState([Complex64; 4]);

impl TwoQubitState {
    /// Requires unit norm within `1e-12`.
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "state has squared norm {norm_sq}, expected 1"
            )));
        }
        Ok(TwoQubitState(amplitudes))
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidInput(format!("cannot normalize state of norm {norm}")));
        }
        Ok(TwoQubitState(amplitudes.map(|a| a / norm)))
    }

    /// `(|+-> - |-+>) / sqrt 2`
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TwoQubitState([
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(0.0, 0.0),
        ])
    }

    /// The z-basis product state `|a b>`.
    pub fn basis(a: Outcome, b: Outcome) -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        amps[2 * a.bit() + b.bit()] = Complex64::new(1.0, 0.0);
        TwoQubitState(amps)
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.0
    }
}

/// A unit Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementDirection([f64; 3]);

impl MeasurementDirection {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "direction has norm {norm}, expected 1"
            )));
        }
        Ok(MeasurementDirection(v))
    }

    /// The x-z plane direction at `degrees` from +z towards +x.
    pub fn in_xz_plane(degrees: f64) -> Self {
        let t = degrees.to_radians();
        MeasurementDirection([t.sin(), 0.0, t.cos()])
    }

    pub fn z() -> Self {
        MeasurementDirection([0.0, 0.0, 1.0])
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    fn projector(&self, outcome: Outcome) -> [[Complex64; 2]; 2] {
        let s = outcome.sign();
        let [x, y, z] = self.0;
        [
            [
                Complex64::new(0.5 * (1.0 + s * z), 0.0),
                Complex64::new(0.5 * s * x, -0.5 * s * y),
            ],
            [
                Complex64::new(0.5 * s * x, 0.5 * s * y),
                Complex64::new(0.5 * (1.0 - s * z), 0.0),
            ],
        ]
    }
}

/// A state plus the four measurement directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitScenario {
    pub state: TwoQubitState,
    pub a1: MeasurementDirection,
    pub a2: MeasurementDirection,
    pub b1: MeasurementDirection,
    pub b2: MeasurementDirection,
}

impl QubitScenario {
    /// All four directions in the x-z plane; angles in degrees.
    pub fn coplanar(state: TwoQubitState, a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        QubitScenario {
            state,
            a1: MeasurementDirection::in_xz_plane(a1),
            a2: MeasurementDirection::in_xz_plane(a2),
            b1: MeasurementDirection::in_xz_plane(b1),
            b2: MeasurementDirection::in_xz_plane(b2),
        }
    }

    pub fn direction(&self, setting: Setting) -> MeasurementDirection {
        match setting {
            Setting::A1 => self.a1,
            Setting::A2 => self.a2,
            Setting::B1 => self.b1,
            Setting::B2 => self.b2,
        }
    }
}

/// `<psi| P_a(dir_a) (x) P_b(dir_b) |psi>`, clamped to `[0, 1]`.
pub fn born_probability(
    state: &TwoQubitState,
    dir_a: &MeasurementDirection,
    out_a: Outcome,
    dir_b: &MeasurementDirection,
    out_b: Outcome,
) -> f64 {
    let pa = dir_a.projector(out_a);
    let pb = dir_b.projector(out_b);
    let psi = &state.0;
    // For a projector P, <psi|P|psi> = |P psi|^2.
    let mut prob = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let mut amp = Complex64::new(0.0, 0.0);
            for a2 in 0..2 {
                for b2 in 0..2 {
                    amp += pa[a][a2] * pb[b][b2] * psi[2 * a2 + b2];
                }
            }
            prob += amp.norm_sqr();
        }
    }
    prob.clamp(0.0, 1.0)
}

/// The 16 Born-rule probabilities of a scenario.
pub fn generate_probability_set(s: &QubitScenario) -> ProbabilitySet {
    let mut p = ProbabilitySet::new([0.0; 16]);
    for pair in SettingPair::ALL {
        let (da, db) = (s.direction(pair.a()), s.direction(pair.b()));
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                p.set(pair, a, b, born_probability(&s.state, &da, a, &db, b));
            }
        }
    }
    p
}

const TIE_TOL: f64 = 1e-12;

/// Best CHSH configuration found by [`maximize_chsh`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChshMaximum {
    /// Largest CHSH value over all variants and grid points.
    pub best_delta: f64,
    pub variant: ChshVariant,
    /// `[a1, a2, b1, b2]` in degrees.
    pub angles: [f64; 4],
    pub scenario: QubitScenario,
}

/// Grid search over coplanar (x-z plane) directions with angles
/// `0, step, 2 step, ... < 360` degrees.
///
/// Ties (values within `1e-12` of the maximum) are broken towards the
/// lexicographically smallest angle tuple.
pub fn maximize_chsh(state: &TwoQubitState, resolution: f64) -> Result<ChshMaximum> {
    if !(resolution > 0.0 && resolution <= 45.0) {
        return Err(Error::InvalidInput(format!(
            "resolution {resolution} outside (0, 45] degrees"
        )));
    }
    let steps = (360.0 / resolution - 1e-9).ceil() as usize;
    let angles: Vec<f64> = (0..steps).map(|k| k as f64 * resolution).collect();
    let dirs: Vec<MeasurementDirection> = angles
        .iter()
        .map(|&t| MeasurementDirection::in_xz_plane(t))
        .collect();

    // corr[i][j]: correlation between A along angle i and B along angle j.
    let corr: Vec<Vec<f64>> = dirs
        .iter()
        .map(|da| {
            dirs.iter()
                .map(|db| {
                    let mut c = 0.0;
                    for a in Outcome::BOTH {
                        for b in Outcome::BOTH {
                            c += a.sign() * b.sign() * born_probability(state, da, a, db, b);
                        }
                    }
                    c
                })
                .collect()
        })
        .collect();

    // Visits every grid point in lexicographic angle order, variants in
    // `ChshVariant::ALL` order.
    let scan = |i1: usize, visit: &mut dyn FnMut(f64, usize, [usize; 4]) -> bool| {
        for i2 in 0..steps {
            for j1 in 0..steps {
                for j2 in 0..steps {
                    let c = [corr[i1][j1], corr[i1][j2], corr[i2][j1], corr[i2][j2]];
                    let total: f64 = c.iter().sum();
                    for (v, variant) in ChshVariant::ALL.iter().enumerate() {
                        let negated = variant.negated_pair().block();
                        let delta = variant.sign() * (total - 2.0 * c[negated]);
                        if visit(delta, v, [i1, i2, j1, j2]) {
                            return;
                        }
                    }
                }
            }
        }
    };

    let max = (0..steps)
        .into_par_iter()
        .map(|i1| {
            let mut best = f64::NEG_INFINITY;
            scan(i1, &mut |delta, _, _| {
                best = best.max(delta);
                false
            });
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);

    // Values within rounding of the maximum count as ties, so the reported
    // configuration does not hinge on the last bit.
    let best = (0..steps)
        .into_par_iter()
        .find_map_first(|i1| {
            let mut hit = None;
            scan(i1, &mut |delta, v, idx| {
                if delta >= max - TIE_TOL {
                    hit = Some((delta, v, idx));
                }
                hit.is_some()
            });
            hit
        })
        .expect("grid is nonempty");

    let (best_delta, v, idx) = best;
    let deg = idx.map(|i| angles[i]);
    Ok(ChshMaximum {
        best_delta,
        variant: ChshVariant::ALL[v],
        angles: deg,
        scenario: QubitScenario::coplanar(*state, deg[0], deg[1], deg[2], deg[3]),
    })
}
