//! Measure vectors over the 16 deterministic local strategies, joint
//! probability sets over the four setting pairs, and the CHSH quantities
//! that connect them.
//!
//! Indexing follows two fixed layouts:
//!
//! * a [`Strategy`] is the outcome quadruple for `(a1, b1, a2, b2)`; with
//!   `+ -> 0` and `- -> 1` its canonical index is
//!   `8*a1 + 4*b1 + 2*a2 + b2`, so strategy number 1 is `++++` and number 16
//!   is `----`.
//! * a [`ProbabilitySet`] stores `p(a_j = x, b_k = y)` at
//!   `4*(2*(j-1) + (k-1)) + 2*x + y`, giving blocks of four for the pairs
//!   `(a1,b1)`, `(a1,b2)`, `(a2,b1)`, `(a2,b2)` in that order.
//!
//! Entry and strategy *numbers* (1-based) are used in diagnostics and in
//! the solver formulas; array indices are 0-based.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// Default absolute tolerance for every consistency check.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Entry numbers of the eight probabilities that determine a consistent set.
pub const INDEPENDENT_ENTRIES: [usize; 8] = [1, 4, 5, 8, 9, 12, 14, 15];

/// Entry numbers of the eight probabilities fixed by the independent ones.
pub const DEPENDENT_ENTRIES: [usize; 8] = [2, 3, 6, 7, 10, 11, 13, 16];

/// Strategy numbers whose weights add up to `sigma1`.
pub const SIGMA1_STRATEGIES: [usize; 8] = [4, 5, 6, 8, 9, 11, 12, 13];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn bit(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }

    /// Accepts `+`, ASCII `-` and the Unicode minus sign.
    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '+' => Some(Outcome::Plus),
            '-' | '\u{2212}' => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::A => f.write_str("a"),
            Party::B => f.write_str("b"),
        }
    }
}

/// One of the four local measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Setting {
    A1,
    A2,
    B1,
    B2,
}

impl Setting {
    pub const ALL: [Setting; 4] = [Setting::A1, Setting::A2, Setting::B1, Setting::B2];

    pub fn new(party: Party, index: usize) -> Option<Self> {
        match (party, index) {
            (Party::A, 1) => Some(Setting::A1),
            (Party::A, 2) => Some(Setting::A2),
            (Party::B, 1) => Some(Setting::B1),
            (Party::B, 2) => Some(Setting::B2),
            _ => None,
        }
    }

    pub fn party(self) -> Party {
        match self {
            Setting::A1 | Setting::A2 => Party::A,
            Setting::B1 | Setting::B2 => Party::B,
        }
    }

    /// 1 or 2.
    pub fn index(self) -> usize {
        match self {
            Setting::A1 | Setting::B1 => 1,
            Setting::A2 | Setting::B2 => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Setting::A1 => "a1",
            Setting::A2 => "a2",
            Setting::B1 => "b1",
            Setting::B2 => "b2",
        }
    }

    /// Case-insensitive parse of `a1`, `a2`, `b1`, `b2`.
    pub fn parse(label: &str) -> Option<Self> {
        match label.to_ascii_lowercase().as_str() {
            "a1" => Some(Setting::A1),
            "a2" => Some(Setting::A2),
            "b1" => Some(Setting::B1),
            "b2" => Some(Setting::B2),
            _ => None,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A joint setting choice `(a_j, b_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SettingPair {
    j: usize,
    k: usize,
}

impl SettingPair {
    /// The four pairs in block order.
    pub const ALL: [SettingPair; 4] = [
        SettingPair { j: 1, k: 1 },
        SettingPair { j: 1, k: 2 },
        SettingPair { j: 2, k: 1 },
        SettingPair { j: 2, k: 2 },
    ];

    pub fn new(j: usize, k: usize) -> Option<Self> {
        ((1..=2).contains(&j) && (1..=2).contains(&k)).then_some(SettingPair { j, k })
    }

    pub fn j(self) -> usize {
        self.j
    }

    pub fn k(self) -> usize {
        self.k
    }

    pub fn a(self) -> Setting {
        if self.j == 1 {
            Setting::A1
        } else {
            Setting::A2
        }
    }

    pub fn b(self) -> Setting {
        if self.k == 1 {
            Setting::B1
        } else {
            Setting::B2
        }
    }

    /// Position of this pair's block of four in a [`ProbabilitySet`].
    pub fn block(self) -> usize {
        2 * (self.j - 1) + (self.k - 1)
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a{},b{})", self.j, self.k)
    }
}

/// A deterministic local strategy: the outcome each of the four
/// measurements returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub a1: Outcome,
    pub b1: Outcome,
    pub a2: Outcome,
    pub b2: Outcome,
}

impl Strategy {
    /// Builds the strategy at a 0-based canonical index (`0..16`).
    pub fn from_index(index: usize) -> Self {
        assert!(index < 16, "strategy index {index} out of range");
        Strategy {
            a1: Outcome::from_bit(index >> 3),
            b1: Outcome::from_bit(index >> 2),
            a2: Outcome::from_bit(index >> 1),
            b2: Outcome::from_bit(index),
        }
    }

    pub fn index(&self) -> usize {
        8 * self.a1.bit() + 4 * self.b1.bit() + 2 * self.a2.bit() + self.b2.bit()
    }

    /// 1-based row number.
    pub fn number(&self) -> usize {
        self.index() + 1
    }

    pub fn all() -> impl Iterator<Item = Strategy> {
        (0..16).map(Strategy::from_index)
    }

    pub fn outcome(&self, setting: Setting) -> Outcome {
        match setting {
            Setting::A1 => self.a1,
            Setting::A2 => self.a2,
            Setting::B1 => self.b1,
            Setting::B2 => self.b2,
        }
    }

    /// Four-character outcome pattern in `(a1, b1, a2, b2)` order.
    pub fn pattern(&self) -> String {
        [self.a1, self.b1, self.a2, self.b2]
            .iter()
            .map(|o| o.symbol())
            .collect()
    }

    pub fn parse_pattern(pattern: &str) -> Option<Self> {
        let outcomes: Vec<Outcome> = pattern
            .chars()
            .map(Outcome::from_symbol)
            .collect::<Option<_>>()?;
        match outcomes.as_slice() {
            &[a1, b1, a2, b2] => Some(Strategy { a1, b1, a2, b2 }),
            _ => None,
        }
    }

    /// The value this strategy assigns to a CHSH expression; always `+-2`.
    pub fn chsh(&self, variant: ChshVariant) -> f64 {
        let sum: f64 = SettingPair::ALL
            .iter()
            .map(|&pair| {
                let c = self.outcome(pair.a()).sign() * self.outcome(pair.b()).sign();
                if pair == variant.negated {
                    -c
                } else {
                    c
                }
            })
            .sum();
        variant.sign() * sum
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern())
    }
}

/// Signed weights over the 16 strategies. Negative weights are allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureVector([f64; 16]);

impl MeasureVector {
    pub fn new(weights: [f64; 16]) -> Self {
        MeasureVector(weights)
    }

    pub fn uniform() -> Self {
        MeasureVector([1.0 / 16.0; 16])
    }

    /// All weight on a single strategy.
    pub fn deterministic(strategy: Strategy) -> Self {
        let mut w = [0.0; 16];
        w[strategy.index()] = 1.0;
        MeasureVector(w)
    }

    /// `(1 - sqrt 2)/16` on the sigma1 strategies and `(1 + sqrt 2)/16`
    /// elsewhere; reproduces the Tsirelson box.
    pub fn equally_distributed_tsirelson() -> Self {
        let low = (1.0 - std::f64::consts::SQRT_2) / 16.0;
        let high = (1.0 + std::f64::consts::SQRT_2) / 16.0;
        let mut w = [high; 16];
        for n in SIGMA1_STRATEGIES {
            w[n - 1] = low;
        }
        MeasureVector(w)
    }

    pub fn weights(&self) -> &[f64; 16] {
        &self.0
    }

    pub fn weight(&self, strategy: Strategy) -> f64 {
        self.0[strategy.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_normalized(&self, eps: f64) -> bool {
        (self.total() - 1.0).abs() <= eps
    }

    /// Sum of the magnitudes of the negative weights.
    pub fn total_negativity(&self) -> f64 {
        self.0.iter().map(|&w| (-w).max(0.0)).sum()
    }

    pub fn negative_strategies(&self) -> Vec<Strategy> {
        Strategy::all().filter(|s| self.weight(*s) < 0.0).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Strategy, f64)> + '_ {
        Strategy::all().map(move |s| (s, self.weight(s)))
    }
}

impl Index<usize> for MeasureVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// The 16 joint probabilities `p(a_j = x, b_k = y)`.
///
/// Construction does not validate; use the `check_*` functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilitySet([f64; 16]);

impl ProbabilitySet {
    pub fn new(entries: [f64; 16]) -> Self {
        ProbabilitySet(entries)
    }

    /// 0-based storage index of `p(a_j = x, b_k = y)`.
    pub fn index_of(pair: SettingPair, a: Outcome, b: Outcome) -> usize {
        4 * pair.block() + 2 * a.bit() + b.bit()
    }

    pub fn get(&self, pair: SettingPair, a: Outcome, b: Outcome) -> f64 {
        self.0[Self::index_of(pair, a, b)]
    }

    pub fn set(&mut self, pair: SettingPair, a: Outcome, b: Outcome, value: f64) {
        self.0[Self::index_of(pair, a, b)] = value;
    }

    /// Entry by 1-based number.
    pub fn entry(&self, number: usize) -> f64 {
        self.0[number - 1]
    }

    pub fn entries(&self) -> &[f64; 16] {
        &self.0
    }

    /// `[p(++), p(+-), p(-+), p(--)]` for one setting pair.
    pub fn block(&self, pair: SettingPair) -> [f64; 4] {
        let start = 4 * pair.block();
        [self.0[start], self.0[start + 1], self.0[start + 2], self.0[start + 3]]
    }

    /// `high` on the eight entries a canonical-CHSH-maximizing box favours,
    /// `low` on the rest.
    pub fn chsh_pattern(high: f64, low: f64) -> Self {
        let mut p = [low; 16];
        for n in INDEPENDENT_ENTRIES {
            p[n - 1] = high;
        }
        ProbabilitySet(p)
    }

    pub fn uniform() -> Self {
        ProbabilitySet([0.25; 16])
    }

    /// The Popescu-Rohrlich box aligned with the canonical CHSH expression.
    pub fn pr_box() -> Self {
        Self::chsh_pattern(0.5, 0.0)
    }

    /// The box that attains `2 sqrt 2` on the canonical CHSH expression.
    pub fn tsirelson() -> Self {
        let s = std::f64::consts::SQRT_2;
        Self::chsh_pattern((2.0 + s) / 8.0, (2.0 - s) / 8.0)
    }

    pub fn deterministic(strategy: Strategy) -> Self {
        forward_map(&MeasureVector::deterministic(strategy))
    }

    /// `(1 - weight) * self + weight * other`.
    pub fn mix(&self, other: &ProbabilitySet, weight: f64) -> Self {
        let mut p = [0.0; 16];
        for (i, v) in p.iter_mut().enumerate() {
            *v = (1.0 - weight) * self.0[i] + weight * other.0[i];
        }
        ProbabilitySet(p)
    }

    /// Relabels one party's outcomes (`+ <-> -`) for both of its settings.
    ///
    /// Turns perfect anticorrelation into perfect correlation.
    pub fn flip_outcomes(&self, party: Party) -> Self {
        let mut out = *self;
        for pair in SettingPair::ALL {
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    let (fa, fb) = match party {
                        Party::A => (a.flipped(), b),
                        Party::B => (a, b.flipped()),
                    };
                    out.set(pair, fa, fb, self.get(pair, a, b));
                }
            }
        }
        out
    }
}

impl Index<usize> for ProbabilitySet {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// The predictions of a measure vector: `p(a_j = x, b_k = y)` is the total
/// weight of the strategies answering `x` to `a_j` and `y` to `b_k`.
///
/// Accepts unnormalized input and never clamps.
pub fn forward_map(m: &MeasureVector) -> ProbabilitySet {
    let mut p = [0.0; 16];
    for (strategy, weight) in m.iter() {
        for pair in SettingPair::ALL {
            let idx = ProbabilitySet::index_of(
                pair,
                strategy.outcome(pair.a()),
                strategy.outcome(pair.b()),
            );
            p[idx] += weight;
        }
    }
    ProbabilitySet(p)
}

/// A single failed consistency condition.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    OutOfRange {
        entry: usize,
        value: f64,
    },
    Normalization {
        pair: SettingPair,
        sum: f64,
    },
    /// A party's marginal for `(setting, outcome)` depends on the remote
    /// setting: `first` is under remote setting 1, `second` under 2.
    Signaling {
        party: Party,
        setting: usize,
        outcome: Outcome,
        first: f64,
        second: f64,
    },
    DerivedRelation {
        entry: usize,
        actual: f64,
        expected: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange { entry, value } => {
                write!(f, "p{entry} = {value} lies outside [0, 1]")
            }
            Violation::Normalization { pair, sum } => {
                write!(f, "block {pair} sums to {sum}, expected 1")
            }
            Violation::Signaling {
                party,
                setting,
                outcome,
                first,
                second,
            } => {
                let remote = match party {
                    Party::A => "b",
                    Party::B => "a",
                };
                write!(
                    f,
                    "marginal p({party}{setting}={outcome}) is {first} under {remote}1 but {second} under {remote}2"
                )
            }
            Violation::DerivedRelation {
                entry,
                actual,
                expected,
            } => write!(
                f,
                "p{entry} = {actual} but the independent entries require {expected}"
            ),
        }
    }
}

pub fn check_range(p: &ProbabilitySet, eps: f64) -> Vec<Violation> {
    p.0.iter()
        .enumerate()
        .filter(|(_, &v)| !(v >= -eps && v <= 1.0 + eps))
        .map(|(i, &value)| Violation::OutOfRange {
            entry: i + 1,
            value,
        })
        .collect()
}

/// Blocks whose four entries do not sum to one.
pub fn check_normalization(p: &ProbabilitySet, eps: f64) -> Vec<Violation> {
    SettingPair::ALL
        .iter()
        .filter_map(|&pair| {
            let sum: f64 = p.block(pair).iter().sum();
            ((sum - 1.0).abs() > eps || sum.is_nan())
                .then_some(Violation::Normalization { pair, sum })
        })
        .collect()
}

/// The eight marginal equalities: each party's outcome statistics must not
/// depend on the other party's setting.
pub fn check_no_signaling(p: &ProbabilitySet, eps: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for party in [Party::A, Party::B] {
        for setting in 1..=2 {
            for outcome in Outcome::BOTH {
                let marginal = |remote: usize| -> f64 {
                    Outcome::BOTH
                        .iter()
                        .map(|&other| match party {
                            Party::A => {
                                p.get(SettingPair { j: setting, k: remote }, outcome, other)
                            }
                            Party::B => {
                                p.get(SettingPair { j: remote, k: setting }, other, outcome)
                            }
                        })
                        .sum()
                };
                let (first, second) = (marginal(1), marginal(2));
                if (first - second).abs() > eps || first.is_nan() || second.is_nan() {
                    out.push(Violation::Signaling {
                        party,
                        setting,
                        outcome,
                        first,
                        second,
                    });
                }
            }
        }
    }
    out
}

/// The eight dependent entries `[p2, p3, p6, p7, p10, p11, p13, p16]` of a
/// consistent set, computed from the independent entries
/// `[p1, p4, p5, p8, p9, p12, p14, p15]`.
pub fn dependent_entries(independent: &[f64; 8]) -> [f64; 8] {
    let [p1, p4, p5, p8, p9, p12, p14, p15] = *independent;
    [
        0.5 * (1.0 - p1 - p4 + p5 - p8 - p9 + p12 + p14 - p15),
        0.5 * (1.0 - p1 - p4 - p5 + p8 + p9 - p12 - p14 + p15),
        0.5 * (1.0 + p1 - p4 - p5 - p8 - p9 + p12 + p14 - p15),
        0.5 * (1.0 - p1 + p4 - p5 - p8 + p9 - p12 - p14 + p15),
        0.5 * (1.0 - p1 + p4 + p5 - p8 - p9 - p12 + p14 - p15),
        0.5 * (1.0 + p1 - p4 - p5 + p8 - p9 - p12 - p14 + p15),
        0.5 * (1.0 - p1 + p4 + p5 - p8 + p9 - p12 - p14 - p15),
        0.5 * (1.0 + p1 - p4 - p5 + p8 - p9 + p12 - p14 - p15),
    ]
}

/// Checks the dependent entries against the values the independent ones
/// force. Holding within `eps` is equivalent to normalization plus
/// no-signaling.
pub fn check_derived_relations(p: &ProbabilitySet, eps: f64) -> Vec<Violation> {
    let independent = INDEPENDENT_ENTRIES.map(|n| p.entry(n));
    let expected = dependent_entries(&independent);
    DEPENDENT_ENTRIES
        .iter()
        .zip(expected)
        .filter_map(|(&entry, expected)| {
            let actual = p.entry(entry);
            ((actual - expected).abs() > eps || actual.is_nan()).then_some(
                Violation::DerivedRelation {
                    entry,
                    actual,
                    expected,
                },
            )
        })
        .collect()
}

/// Every check at once: range, normalization, no-signaling and the derived
/// relations. Empty means the set is consistent.
pub fn check_consistency(p: &ProbabilitySet, eps: f64) -> Vec<Violation> {
    let mut out = check_range(p, eps);
    out.extend(check_normalization(p, eps));
    out.extend(check_no_signaling(p, eps));
    out.extend(check_derived_relations(p, eps));
    out
}

pub fn ensure_consistent(p: &ProbabilitySet, eps: f64) -> Result<()> {
    let violations = check_consistency(p, eps);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Inconsistent(violations))
    }
}

/// `p(++) + p(--) - p(+-) - p(-+)` for one setting pair.
pub fn correlation(p: &ProbabilitySet, pair: SettingPair, eps: f64) -> Result<f64> {
    let [pp, pm, mp, mm] = p.block(pair);
    let sum = pp + pm + mp + mm;
    if (sum - 1.0).abs() > eps || sum.is_nan() {
        return Err(Error::Inconsistent(vec![Violation::Normalization {
            pair,
            sum,
        }]));
    }
    Ok(pp + mm - pm - mp)
}

/// One of the eight CHSH expressions: the sum of the four correlations with
/// one pair negated, times an overall sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChshVariant {
    negated: SettingPair,
    positive: bool,
}

impl ChshVariant {
    /// `c11 + c12 + c21 - c22`.
    pub const CANONICAL: ChshVariant = ChshVariant {
        negated: SettingPair { j: 2, k: 2 },
        positive: true,
    };

    /// All eight variants; the canonical one comes first.
    pub const ALL: [ChshVariant; 8] = [
        ChshVariant::CANONICAL,
        ChshVariant {
            negated: SettingPair { j: 2, k: 1 },
            positive: true,
        },
        ChshVariant {
            negated: SettingPair { j: 1, k: 2 },
            positive: true,
        },
        ChshVariant {
            negated: SettingPair { j: 1, k: 1 },
            positive: true,
        },
        ChshVariant {
            negated: SettingPair { j: 2, k: 2 },
            positive: false,
        },
        ChshVariant {
            negated: SettingPair { j: 2, k: 1 },
            positive: false,
        },
        ChshVariant {
            negated: SettingPair { j: 1, k: 2 },
            positive: false,
        },
        ChshVariant {
            negated: SettingPair { j: 1, k: 1 },
            positive: false,
        },
    ];

    pub fn new(negated: SettingPair, sign: f64) -> Self {
        ChshVariant {
            negated,
            positive: sign >= 0.0,
        }
    }

    pub fn negated_pair(self) -> SettingPair {
        self.negated
    }

    pub fn sign(self) -> f64 {
        if self.positive {
            1.0
        } else {
            -1.0
        }
    }

    /// Human-readable expression, e.g. `c11 + c12 + c21 - c22`.
    pub fn label(self) -> String {
        let terms: Vec<String> = SettingPair::ALL
            .iter()
            .map(|pair| format!("c{}{}", pair.j, pair.k))
            .collect();
        let mut expr = terms[0].clone();
        if SettingPair::ALL[0] == self.negated {
            expr = format!("-{expr}");
        }
        for (pair, term) in SettingPair::ALL.iter().zip(&terms).skip(1) {
            let op = if *pair == self.negated { '-' } else { '+' };
            expr.push_str(&format!(" {op} {term}"));
        }
        if self.positive {
            expr
        } else {
            format!("-({expr})")
        }
    }
}

impl fmt::Display for ChshVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The CHSH sum for `variant`, built from the four correlations.
pub fn chsh(p: &ProbabilitySet, variant: ChshVariant, eps: f64) -> Result<f64> {
    let normalization = check_normalization(p, eps);
    if !normalization.is_empty() {
        return Err(Error::Inconsistent(normalization));
    }
    let mut sum = 0.0;
    for pair in SettingPair::ALL {
        let c = correlation(p, pair, eps)?;
        sum += if pair == variant.negated { -c } else { c };
    }
    Ok(variant.sign() * sum)
}

/// Canonical CHSH sum in reduced form,
/// `2 (p1 + p4 + p5 + p8 + p9 + p12 + p14 + p15 - 2)`. Only meaningful for
/// normalized input.
pub fn chsh_reduced(p: &ProbabilitySet) -> f64 {
    let s: f64 = INDEPENDENT_ENTRIES.iter().map(|&n| p.entry(n)).sum();
    2.0 * (s - 2.0)
}

/// The two complementary weight sums controlling the canonical CHSH value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sigmas {
    pub sigma1: f64,
    pub sigma2: f64,
}

/// `sigma1` is the weight on strategies scoring `-2` on the canonical CHSH
/// expression; `sigma2` is the remaining weight.
pub fn sigmas(m: &MeasureVector) -> Sigmas {
    sigmas_for(m, ChshVariant::CANONICAL)
}

/// [`sigmas`] generalised to any variant.
pub fn sigmas_for(m: &MeasureVector, variant: ChshVariant) -> Sigmas {
    let sigma1: f64 = m
        .iter()
        .filter(|(s, _)| s.chsh(variant) < 0.0)
        .map(|(_, w)| w)
        .sum();
    Sigmas {
        sigma1,
        sigma2: m.total() - sigma1,
    }
}

/// `2 (1 - 2 sigma1)`, the canonical CHSH value a normalized measure
/// predicts.
pub fn chsh_from_measures(m: &MeasureVector, eps: f64) -> Result<f64> {
    let total = m.total();
    if (total - 1.0).abs() > eps || total.is_nan() {
        return Err(Error::InvalidInput(format!(
            "measure weights sum to {total}, expected 1"
        )));
    }
    Ok(2.0 * (1.0 - 2.0 * sigmas(m).sigma1))
}

/// All eight CHSH values of a box.
#[derive(Clone, Debug, PartialEq)]
pub struct ChshReport {
    /// Aligned with [`ChshVariant::ALL`].
    pub deltas: [f64; 8],
    pub violated: [bool; 8],
    pub max_abs_delta: f64,
    /// Present when the report was computed from a measure vector.
    pub sigmas: Option<Sigmas>,
}

impl ChshReport {
    pub fn canonical_delta(&self) -> f64 {
        self.deltas[0]
    }

    pub fn any_violated(&self) -> bool {
        self.violated.iter().any(|&v| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ChshVariant, f64, bool)> + '_ {
        ChshVariant::ALL
            .iter()
            .zip(self.deltas.iter().zip(&self.violated))
            .map(|(&v, (&d, &x))| (v, d, x))
    }
}

pub fn chsh_report(p: &ProbabilitySet, eps: f64) -> Result<ChshReport> {
    let mut deltas = [0.0; 8];
    for (slot, variant) in deltas.iter_mut().zip(ChshVariant::ALL) {
        *slot = chsh(p, variant, eps)?;
    }
    let violated = deltas.map(|d| d.abs() > 2.0 + eps);
    let max_abs_delta = deltas.iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    Ok(ChshReport {
        deltas,
        violated,
        max_abs_delta,
        sigmas: None,
    })
}

/// [`chsh_report`] of the predicted box, annotated with the sigmas.
pub fn chsh_report_from_measures(m: &MeasureVector, eps: f64) -> Result<ChshReport> {
    if !m.is_normalized(eps) {
        return Err(Error::InvalidInput(format!(
            "measure weights sum to {}, expected 1",
            m.total()
        )));
    }
    let mut report = chsh_report(&forward_map(m), eps)?;
    report.sigmas = Some(sigmas(m));
    Ok(report)
}

/// Whether a measure vector violates canonical CHSH, and whether it has to
/// carry negative weight to do so.
///
/// For normalized input `violates_canonical_chsh` implies
/// `has_negative_entry`; the converse does not hold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NecessityVerdict {
    pub delta: f64,
    pub sigmas: Sigmas,
    pub violates_canonical_chsh: bool,
    pub sigma_in_unit_interval: bool,
    pub has_negative_entry: bool,
}

pub fn negativity_necessity_verdict(m: &MeasureVector, eps: f64) -> NecessityVerdict {
    let sigmas = sigmas(m);
    let sigma_in_unit_interval = sigmas.sigma1 >= -eps && sigmas.sigma1 <= 1.0 + eps;
    NecessityVerdict {
        delta: 2.0 * (1.0 - 2.0 * sigmas.sigma1),
        sigmas,
        violates_canonical_chsh: !sigma_in_unit_interval,
        sigma_in_unit_interval,
        has_negative_entry: m.weights().iter().any(|&w| w < 0.0),
    }
}
