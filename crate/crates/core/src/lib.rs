//! Usable-information estimation for layer-indexed representations.
//!
//! Probes from a restricted predictive family are trained to approximate
//! V-entropies `H_V(Y | C)`; differences of those estimates give
//! V-information, baselined probing and conditional probing results in
//! bits. Counting oracles and planted scenarios make every estimate
//! checkable on synthetic data.

pub mod corpus_io;
pub mod curves;
pub mod error;
pub mod estimator;
pub mod metrics;
pub mod oracle;
pub mod pipeline;
pub mod probes;
pub mod rng;
pub mod selfcheck;
pub mod trainer;

pub use corpus_io::{
    Granularity, LabeledDataset, RepresentationBundle, Sentence, Split, SplitPart,
};
pub use error::{Error, Result};
pub use estimator::{
    baselined_probing, conditional_probing, run_experiment, v_information, ExperimentSettings,
    LayerRecord, ProbingReport, VInfoEstimate,
};
pub use metrics::TaskMetric;
pub use oracle::{Scenario, ScenarioSpec, SyntheticCorpus};
pub use probes::{
    assemble_input, forward, loss_and_gradient, zero_masked_family, Architecture,
    DistributionOverLabels, KnownSetSpec, PredictiveFamilySpec, ProbeParams,
};
pub use trainer::{
    adam_step, evaluate, schedule_step, train_probe, EvaluationResult, TrainConfig,
    VEntropyEstimate,
};
