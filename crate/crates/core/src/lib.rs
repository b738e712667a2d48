//! Signed local hidden-variable measures for two-party, two-setting,
//! two-outcome correlation experiments.
//!
//! * [`model`]: strategies, measure vectors, boxes, consistency checks and
//!   CHSH quantities.
//! * [`solver`]: the 7-parameter family of measures reproducing a box.
//! * [`negativity`]: least total negativity over that family, via [`lp`].
//! * [`quantum`]: Born-rule boxes for two qubits.
//! * [`format`] and [`cli`]: file formats and the command line.

pub mod cli;
pub mod error;
pub mod format;
pub mod lp;
pub mod model;
pub mod negativity;
pub mod quantum;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    check_consistency, check_derived_relations, check_no_signaling, check_normalization, chsh,
    chsh_from_measures, chsh_report, correlation, forward_map, negativity_necessity_verdict,
    sigmas, ChshReport, ChshVariant, MeasureVector, NecessityVerdict, Outcome, Party,
    ProbabilitySet, Setting, SettingPair, Sigmas, Strategy, Violation, DEFAULT_EPS,
};
pub use negativity::{chsh_lower_bound, min_negativity, NegativityResult};
pub use quantum::{
    born_probability, generate_probability_set, maximize_chsh, MeasurementDirection,
    QubitScenario, TwoQubitState,
};
pub use solver::{
    general_solution, independent_probs, perfect_correlation_solution, reconstruct_probs, solve,
    FreeParameters, IndependentProbabilities,
};
