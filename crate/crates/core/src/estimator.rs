//! Baselined probing, conditional probing and V-information.
//!
//! All quantities are differences of V-entropy estimates that share one
//! family, one training config and one evaluation split:
//!
//! * `I_V(X -> Y | C) = H_V(Y | C) - H_V(Y | C, X)`
//! * baselined: `H_V(Y | B) - H_V(Y | phi)`
//! * conditional: `H_V(Y | B) - H_V(Y | B, phi)`
//!
//! Negative values are reported as they are.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus_io::{LabeledDataset, RepresentationBundle, SplitPart};
use crate::error::{Error, Result};
use crate::metrics::{span_f1_from_ids, TaskMetric};
use crate::oracle::empirical_entropy;
use crate::probes::{Architecture, KnownSetSpec, PredictiveFamilySpec};
use crate::trainer::{estimate_v_entropy, ProbeDataset, ProbeFit, TrainConfig, VEntropyEstimate};

/// I_V(source -> Y | conditioning), in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VInfoEstimate {
    pub bits: f64,
    /// Slots known in the richer estimate but not the poorer one.
    pub source_slots: Vec<usize>,
    pub conditioning_slots: Vec<usize>,
}

fn check_compatible(a: &VEntropyEstimate, b: &VEntropyEstimate) -> Result<()> {
    if a.family != b.family {
        return Err(Error::Composition("estimates use different families".into()));
    }
    if a.config != b.config {
        return Err(Error::Composition("estimates use different training configs".into()));
    }
    if a.eval_split != b.eval_split {
        return Err(Error::Composition(format!(
            "estimates evaluated on different splits ({} vs {})",
            a.eval_split, b.eval_split
        )));
    }
    if !a.known_set.same_placeholder(&b.known_set) {
        return Err(Error::Composition("estimates use different placeholders".into()));
    }
    Ok(())
}

pub fn v_information(h_without: &VEntropyEstimate, h_with: &VEntropyEstimate) -> Result<VInfoEstimate> {
    check_compatible(h_without, h_with)?;
    if !h_without.known_set.is_subset_of(&h_with.known_set) {
        return Err(Error::Composition(format!(
            "known slots {:?} are not a subset of {:?}",
            h_without.known_set.known_slots, h_with.known_set.known_slots
        )));
    }
    Ok(VInfoEstimate {
        bits: h_without.bits - h_with.bits,
        source_slots: h_with
            .known_set
            .known_slots
            .iter()
            .copied()
            .filter(|s| !h_without.known_set.is_known(*s))
            .collect(),
        conditioning_slots: h_without.known_set.known_slots.clone(),
    })
}

/// `I_V(phi -> Y) - I_V(B -> Y)`, which equals `H_V(Y|B) - H_V(Y|phi)`.
pub fn baselined_probing(perf_phi: &VEntropyEstimate, perf_b: &VEntropyEstimate) -> Result<f64> {
    check_compatible(perf_phi, perf_b)?;
    for e in [perf_phi, perf_b] {
        if e.known_set.known_slots.len() != 1 {
            return Err(Error::Composition(format!(
                "baselined probing needs single-slot estimates, got known slots {:?}",
                e.known_set.known_slots
            )));
        }
    }
    Ok(perf_b.bits - perf_phi.bits)
}

/// `H_V(Y | B) - H_V(Y | B, phi)` for a two-slot family `[B; phi]`.
pub fn conditional_probing(perf_b_phi: &VEntropyEstimate, perf_b_0: &VEntropyEstimate) -> Result<f64> {
    check_compatible(perf_b_phi, perf_b_0)?;
    if perf_b_phi.family.arity() != 2 {
        return Err(Error::Composition(format!(
            "conditional probing needs a two-slot family, got {} slots",
            perf_b_phi.family.arity()
        )));
    }
    if perf_b_phi.known_set.known_slots != [0, 1] || perf_b_0.known_set.known_slots != [0] {
        return Err(Error::Composition(
            "conditional probing expects known slots {0, 1} and {0}".into(),
        ));
    }
    Ok(perf_b_0.bits - perf_b_phi.bits)
}

/// Settings shared by every probe of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    pub task: String,
    pub architecture: Architecture,
    pub hidden_dim: usize,
    pub train: TrainConfig,
    pub eval_split: SplitPart,
    pub baseline_layer: usize,
    pub placeholder: f64,
    pub metric: TaskMetric,
}

impl ExperimentSettings {
    pub fn new(task: impl Into<String>, train: TrainConfig) -> Self {
        Self {
            task: task.into(),
            architecture: Architecture::AffineSoftmax,
            hidden_dim: 0,
            train,
            eval_split: SplitPart::Dev,
            baseline_layer: 0,
            placeholder: 0.0,
            metric: TaskMetric::Accuracy,
        }
    }

    pub fn family(&self, slot_dims: Vec<usize>, num_classes: usize) -> Result<PredictiveFamilySpec> {
        match self.architecture {
            Architecture::AffineSoftmax => PredictiveFamilySpec::affine(slot_dims, num_classes),
            Architecture::OneHiddenLayer => {
                PredictiveFamilySpec::one_hidden_layer(slot_dims, self.hidden_dim, num_classes)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub layer: usize,
    pub h_given_b: f64,
    pub h_given_b_and_layer: f64,
    pub h_given_layer: f64,
    pub h_marginal: f64,
    pub baselined_bits: f64,
    pub conditional_bits: f64,
    /// `I_V(phi -> Y) = H_V(Y) - H_V(Y | phi)`.
    pub v_info_bits: f64,
    /// Task metric of the `[B; phi]` probe on the evaluation split.
    pub task_metric: f64,
}

impl LayerRecord {
    /// Fills the derived columns from the four stored V-entropies.
    pub fn from_entropies(
        layer: usize,
        h_given_b: f64,
        h_given_b_and_layer: f64,
        h_given_layer: f64,
        h_marginal: f64,
        task_metric: f64,
    ) -> Self {
        Self {
            layer,
            h_given_b,
            h_given_b_and_layer,
            h_given_layer,
            h_marginal,
            baselined_bits: h_given_b - h_given_layer,
            conditional_bits: h_given_b - h_given_b_and_layer,
            v_info_bits: h_marginal - h_given_layer,
            task_metric,
        }
    }

    /// True when every derived column equals the arithmetic over the stored
    /// entropies exactly.
    pub fn is_consistent(&self) -> bool {
        let r = Self::from_entropies(
            self.layer,
            self.h_given_b,
            self.h_given_b_and_layer,
            self.h_given_layer,
            self.h_marginal,
            self.task_metric,
        );
        r == *self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbingReport {
    pub task: String,
    pub seed: u64,
    pub settings: ExperimentSettings,
    pub records: Vec<LayerRecord>,
}

fn task_metric(
    fit: &ProbeFit,
    metric: TaskMetric,
    vocab: &[String],
) -> Result<f64> {
    match metric {
        TaskMetric::Accuracy => Ok(fit.eval.accuracy),
        TaskMetric::SpanF1 => Ok(span_f1_from_ids(
            &fit.predictions,
            fit.eval_examples.labels(),
            fit.eval_examples.sentence_lengths(),
            vocab,
        )?
        .f1),
    }
}

#[derive(Clone, Copy)]
enum Job {
    BaselineOnly,
    Marginal,
    Both(usize),
    LayerOnly(usize),
}

/// Runs the four probes per layer: `[B; phi]`, `[B; 0]`, `[0; phi]` and
/// `[0; 0]`, all on the two-slot family with the same seed and config.
///
/// `[B; 0]` and `[0; 0]` see identical inputs for every layer, so they are
/// trained once and shared. Independent probes run in parallel on the
/// current rayon pool; results do not depend on the thread count.
pub fn run_experiment(
    labels: &LabeledDataset,
    bundle: &RepresentationBundle,
    layers: &[usize],
    settings: &ExperimentSettings,
) -> Result<ProbingReport> {
    settings.train.validate()?;
    if layers.is_empty() {
        return Err(Error::Argument("no layers requested".into()));
    }
    if let Some(&l) = layers
        .iter()
        .chain([&settings.baseline_layer])
        .find(|&&l| l >= bundle.n_layers())
    {
        return Err(Error::Data(format!(
            "layer {l} requested, representation file has {} layers",
            bundle.n_layers()
        )));
    }
    labels.check_against(bundle)?;
    let dims = vec![bundle.dim(); 2];
    let family = settings.family(dims.clone(), labels.num_classes())?;
    let known = |slots: &[usize]| KnownSetSpec::with_constant(&dims, slots, settings.placeholder);

    let mut jobs = vec![Job::BaselineOnly, Job::Marginal];
    for &l in layers {
        jobs.push(Job::Both(l));
        jobs.push(Job::LayerOnly(l));
    }
    let fits: Vec<ProbeFit> = jobs
        .par_iter()
        .map(|job| {
            let (layer, slots): (usize, &[usize]) = match *job {
                Job::BaselineOnly => (settings.baseline_layer, &[0]),
                Job::Marginal => (settings.baseline_layer, &[]),
                Job::Both(l) => (l, &[0, 1]),
                Job::LayerOnly(l) => (l, &[1]),
            };
            let slot_layers = [settings.baseline_layer, layer];
            let data = ProbeDataset::new(labels, bundle, &slot_layers)?;
            estimate_v_entropy(&data, &family, &known(slots)?, &settings.train, settings.eval_split)
        })
        .collect::<Result<_>>()?;

    let h_given_b = &fits[0].estimate;
    let h_marginal = &fits[1].estimate;
    let mut records = Vec::with_capacity(layers.len());
    for (i, &layer) in layers.iter().enumerate() {
        let both = &fits[2 + 2 * i];
        let only = &fits[3 + 2 * i];
        let record = LayerRecord::from_entropies(
            layer,
            h_given_b.bits,
            both.estimate.bits,
            only.estimate.bits,
            h_marginal.bits,
            task_metric(both, settings.metric, &labels.label_vocab)?,
        );
        debug_assert_eq!(
            record.conditional_bits,
            conditional_probing(&both.estimate, h_given_b)?
        );
        debug_assert_eq!(
            record.baselined_bits,
            baselined_probing(&only.estimate, h_given_b)?
        );
        records.push(record);
    }
    Ok(ProbingReport {
        task: settings.task.clone(),
        seed: settings.train.seed,
        settings: settings.clone(),
        records,
    })
}

/// Plug-in entropy of the labels on one split part, in bits.
pub fn label_entropy(labels: &LabeledDataset, part: SplitPart) -> Result<f64> {
    let ids: Vec<usize> = labels
        .split()?
        .part(part)
        .iter()
        .flat_map(|&s| labels.sentences[s].labels.iter().copied())
        .collect();
    empirical_entropy(&ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn estimate(bits: f64, slots: &[usize]) -> VEntropyEstimate {
        let family = PredictiveFamilySpec::affine(vec![4, 4], 5).unwrap();
        VEntropyEstimate::external(
            bits,
            SplitPart::Dev,
            KnownSetSpec::new(&[4, 4], slots).unwrap(),
            family,
            TrainConfig::default(),
        )
    }

    #[test]
    fn v_information_arithmetic() {
        let v = v_information(&estimate(2.0, &[]), &estimate(1.2, &[1])).unwrap();
        assert_abs_diff_eq!(v.bits, 0.8, epsilon = 1e-15);
        assert_eq!(v.source_slots, vec![1]);
        assert!(v.conditioning_slots.is_empty());
    }

    #[test]
    fn v_information_from_published_two_layer_entropies() {
        // upos rows 0-0 and 0-1 of the two-layer V-entropy table.
        let v = v_information(&estimate(0.335, &[0]), &estimate(0.141, &[0, 1])).unwrap();
        assert_abs_diff_eq!(v.bits, 0.194, epsilon = 1e-12);
        assert_eq!(v.conditioning_slots, vec![0]);
    }

    #[test]
    fn v_information_same_known_set_is_zero() {
        let v = v_information(&estimate(0.7, &[0]), &estimate(0.7, &[0])).unwrap();
        assert_eq!(v.bits, 0.0);
    }

    #[test]
    fn v_information_rejects_mismatch() {
        let mut other = estimate(1.0, &[0, 1]);
        other.config.seed = 5;
        assert!(matches!(
            v_information(&estimate(2.0, &[0]), &other),
            Err(Error::Composition(_))
        ));
        let mut other = estimate(1.0, &[0, 1]);
        other.eval_split = SplitPart::Test;
        assert!(v_information(&estimate(2.0, &[0]), &other).is_err());
        assert!(v_information(&estimate(2.0, &[1]), &estimate(1.0, &[0])).is_err());
    }

    #[test]
    fn baselined_from_published_single_layer_entropies() {
        // upos layers 0 and 1 of the single-layer V-entropy table.
        let b = baselined_probing(&estimate(0.145, &[1]), &estimate(0.336, &[0])).unwrap();
        assert_abs_diff_eq!(b, 0.191, epsilon = 1e-12);
        assert_eq!(baselined_probing(&estimate(0.3, &[1]), &estimate(0.3, &[0])).unwrap(), 0.0);
        let worse = baselined_probing(&estimate(0.9, &[1]), &estimate(0.3, &[0])).unwrap();
        assert!(worse < 0.0);
        assert!(baselined_probing(&estimate(0.1, &[0, 1]), &estimate(0.3, &[0])).is_err());
    }

    #[test]
    fn conditional_from_published_two_layer_entropies() {
        let c = conditional_probing(&estimate(0.141, &[0, 1]), &estimate(0.335, &[0])).unwrap();
        assert_abs_diff_eq!(c, 0.194, epsilon = 1e-12);
    }

    #[test]
    fn conditional_needs_two_slots() {
        let family = PredictiveFamilySpec::affine(vec![4, 4, 4], 5).unwrap();
        let mk = |slots: &[usize]| {
            VEntropyEstimate::external(
                1.0,
                SplitPart::Dev,
                KnownSetSpec::new(&[4, 4, 4], slots).unwrap(),
                family.clone(),
                TrainConfig::default(),
            )
        };
        assert!(matches!(
            conditional_probing(&mk(&[0, 1]), &mk(&[0])),
            Err(Error::Composition(_))
        ));
    }

    #[test]
    fn record_arithmetic_is_exact() {
        let r = LayerRecord::from_entropies(3, 0.335, 0.141, 0.145, 2.1, 0.97);
        assert_eq!(r.conditional_bits, 0.335 - 0.141);
        assert_eq!(r.baselined_bits, 0.335 - 0.145);
        assert_eq!(r.v_info_bits, 2.1 - 0.145);
        assert!(r.is_consistent());
        let mut bad = r.clone();
        bad.conditional_bits += 1e-12;
        assert!(!bad.is_consistent());
    }
}
