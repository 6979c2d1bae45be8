//! A compact end-to-end battery of oracle and property checks, run by the
//! `selfcheck` CLI subcommand. Sizes are smaller than the full acceptance
//! suite so it finishes in seconds; tolerances are the same.

use std::f64::consts::LN_2;

use rand::Rng;

use crate::error::Result;
use crate::estimator::{label_entropy, run_experiment, ExperimentSettings};
use crate::oracle::{empirical_conditional_entropy, synth_generate, Scenario, ScenarioSpec};
use crate::probes::{loss_and_gradient, mean_nll, zero_masked_family, Example, KnownSetSpec, PredictiveFamilySpec};
use crate::rng::{derive_seed, seeded};
use crate::trainer::{evaluate, estimate_v_entropy, fit, ProbeDataset, TrainConfig};
use crate::SplitPart;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

/// Largest relative error between analytic and five-point finite-difference gradients
/// over `trials` random probes and batches of the given (unmasked) family.
pub fn max_gradient_error(family: &PredictiveFamilySpec, trials: u64, seed: u64) -> Result<f64> {
    const STEP: f64 = 1e-4;
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = seeded(derive_seed(seed, trial));
        let mut params = family.init_params(&mut rng);
        for v in params.values_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let dim = family.total_dim();
        let inputs: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let labels: Vec<usize> = (0..8).map(|_| rng.random_range(0..family.num_classes)).collect();
        let batch: Vec<Example<'_>> = inputs.iter().map(Vec::as_slice).zip(labels).collect();
        let (_, grads) = loss_and_gradient(family, &params, &batch)?;
        for i in 0..params.values().len() {
            let at = |offset: f64| -> Result<f64> {
                let mut p = params.clone();
                p.values_mut()[i] += offset;
                mean_nll(&p, &batch)
            };
            let (m2, m1, p1, p2) = (at(-2.0 * STEP)?, at(-STEP)?, at(STEP)?, at(2.0 * STEP)?);
            // the stencil straddles a ReLU kink
            if ((p1 - m1) / (2.0 * STEP) - (p2 - m2) / (4.0 * STEP)).abs() > 1e-5 {
                continue;
            }
            let numeric = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * STEP);
            let analytic = grads.values()[i];
            let err = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

fn settings(seed: u64) -> ExperimentSettings {
    ExperimentSettings::new("selfcheck", TrainConfig::with_seed(seed))
}

/// Runs every check with `seeds` seeds per randomized property.
pub fn run_selfcheck(seeds: u64, base_seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    let affine = PredictiveFamilySpec::affine(vec![3, 2], 4)?;
    let hidden = PredictiveFamilySpec::one_hidden_layer(vec![3, 2], 5, 3)?;
    let g = max_gradient_error(&affine, 10, base_seed)?.max(max_gradient_error(&hidden, 10, base_seed)?);
    out.push(outcome("gradient", g < 1e-4, format!("max relative error {g:.2e} (< 1e-4)")));

    let spec = ScenarioSpec::new(Scenario::Tabular, base_seed);
    let corpus = synth_generate(&spec)?;
    let layers = [0];
    let data = ProbeDataset::new(&corpus.dataset, &corpus.bundle, &layers)?;
    let family = PredictiveFamilySpec::affine(data.slot_dims(), spec.classes)?;
    let known = KnownSetSpec::new(&data.slot_dims(), &[0])?;
    let cfg = TrainConfig::with_seed(base_seed);
    let fitted = estimate_v_entropy(&data, &family, &known, &cfg, SplitPart::Dev)?;
    let train_bits = evaluate(&fitted.params, &data, SplitPart::Train, &known)?.nll_bits;
    let h_train = empirical_conditional_entropy(&corpus.joint(SplitPart::Train), &[0])?;
    let h_dev = empirical_conditional_entropy(&corpus.joint(SplitPart::Dev), &[0])?;
    let (gap_train, gap_dev) = ((train_bits - h_train).abs(), (fitted.estimate.bits - h_dev).abs());
    out.push(outcome(
        "tabular-oracle",
        gap_train < 0.02 && gap_dev < 0.05,
        format!("|train gap| {gap_train:.4} (< 0.02), |dev gap| {gap_dev:.4} (< 0.05)"),
    ));

    let mut worst_cond: f64 = f64::INFINITY;
    let mut worst_marginal: f64 = 0.0;
    let mut worst_indep: f64 = 0.0;
    let mut worst_self: f64 = 0.0;
    let mut planted_ok = true;
    let mut planted_detail = String::new();
    for s in 0..seeds {
        let seed = derive_seed(base_seed, s);
        for scenario in [Scenario::Independence, Scenario::SelfCondition, Scenario::PlantedAmbiguity] {
            let spec = ScenarioSpec::new(scenario, seed).with_sizes(2048, 1024, 0);
            let corpus = synth_generate(&spec)?;
            let layers: &[usize] = if scenario == Scenario::PlantedAmbiguity { &[1, 2] } else { &[1] };
            let report = run_experiment(&corpus.dataset, &corpus.bundle, layers, &settings(seed))?;
            let hy = label_entropy(&corpus.dataset, SplitPart::Dev)?;
            for r in &report.records {
                worst_cond = worst_cond.min(r.conditional_bits);
                worst_marginal = worst_marginal.max((r.h_marginal - hy).abs());
            }
            let cond = report.records[0].conditional_bits;
            match scenario {
                Scenario::Independence => worst_indep = worst_indep.max(cond.abs()),
                Scenario::SelfCondition => worst_self = worst_self.max(cond.abs()),
                _ => {
                    let r2 = &report.records[1];
                    if !(r2.baselined_bits < 0.0 && r2.conditional_bits > 0.1) {
                        planted_ok = false;
                    }
                    planted_detail = format!(
                        "layer 2 baselined {:.3} (< 0), conditional {:.3} (> 0.1)",
                        r2.baselined_bits, r2.conditional_bits
                    );
                }
            }
        }
    }
    out.push(outcome("marginal", worst_marginal < 0.02, format!("max |H_V(Y) - H(Y)| {worst_marginal:.4} (< 0.02)")));
    out.push(outcome("non-negativity", worst_cond >= -0.02, format!("min conditional {worst_cond:.4} (>= -0.02)")));
    out.push(outcome("independence", worst_indep <= 0.03, format!("max |conditional| {worst_indep:.4} (<= 0.03)")));
    out.push(outcome("self-conditioning", worst_self <= 0.02, format!("max |I(B -> Y | B)| {worst_self:.4} (<= 0.02)")));
    out.push(outcome("planted-signs", planted_ok, planted_detail));

    let spec = ScenarioSpec::new(Scenario::PlantedAmbiguity, base_seed).with_sizes(2048, 1024, 0);
    let corpus = synth_generate(&spec)?;
    let layers = [0, 1];
    let data = ProbeDataset::new(&corpus.dataset, &corpus.bundle, &layers)?;
    let dims = data.slot_dims();
    let known = KnownSetSpec::new(&dims, &[0, 1])?;
    let train = data.examples(SplitPart::Train, &known)?;
    let dev = data.examples(SplitPart::Dev, &known)?;
    let full = PredictiveFamilySpec::affine(dims.clone(), spec.classes)?;
    let nested = [
        full.clone(),
        zero_masked_family(&full, &(0..dims[0]).collect::<Vec<_>>())?,
        zero_masked_family(&full, &[])?,
    ];
    let mut entropies = Vec::new();
    for fam in &nested {
        let t = fit(&train, &dev, fam, &cfg)?;
        entropies.push(mean_nll(&t.params, &dev.batch())? / LN_2);
    }
    let mono = entropies.windows(2).all(|w| w[0] <= w[1] + 0.02);
    out.push(outcome(
        "monotonicity",
        mono,
        format!("nested H = {:.4} <= {:.4} <= {:.4} (+0.02)", entropies[0], entropies[1], entropies[2]),
    ));

    let mut bits = Vec::new();
    for value in [0.0, 1.0] {
        let known = KnownSetSpec::with_constant(&dims, &[0], value)?;
        bits.push(estimate_v_entropy(&data, &full, &known, &cfg, SplitPart::Dev)?.estimate.bits);
    }
    let diff = (bits[0] - bits[1]).abs();
    out.push(outcome(
        "optional-ignorance",
        diff < 0.02,
        format!("placeholder 0 vs 1 changes H by {diff:.4} (< 0.02)"),
    ));

    Ok(out)
}
