//! Counting oracles and planted synthetic scenarios.
//!
//! The counting functions compute Shannon quantities from empirical
//! frequencies. On one-hot inputs an affine-softmax probe can represent any
//! conditional table, so its V-entropy infimum on a sample equals the
//! empirical conditional entropy there; that is what makes these oracles
//! usable as exact references for the trained estimators.

mod counting;
mod synth;

pub use counting::{
    empirical_conditional_entropy, empirical_entropy, shannon_mi, DiscreteJoint, MAX_CARDINALITY,
};
pub use synth::{synth_generate, Scenario, ScenarioSpec, SyntheticCorpus};
