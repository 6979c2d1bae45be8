//! Predictive families and probe parameterizations.
//!
//! A family maps the concatenation of its input slots to a distribution
//! over labels. Two architectures are provided: affine followed by softmax
//! (the convex case used for every estimate by default) and a single
//! ReLU hidden layer. A family may carry a mask of active input dims; the
//! weights on inactive dims are pinned at zero, which yields a nested
//! sub-family of the unmasked parent.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    AffineSoftmax,
    OneHiddenLayer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
}

/// The predictive family V.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredictiveFamilySpec {
    pub architecture: Architecture,
    /// Dimension of each input slot, in slot order.
    pub input_slots: Vec<usize>,
    /// Width of the hidden layer; ignored for `AffineSoftmax`.
    pub hidden_dim: usize,
    pub activation: Activation,
    pub num_classes: usize,
    /// Active input dims. `None` means every dim is active.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_dims: Option<Vec<bool>>,
}

impl PredictiveFamilySpec {
    pub fn affine(input_slots: Vec<usize>, num_classes: usize) -> Result<Self> {
        let spec = Self {
            architecture: Architecture::AffineSoftmax,
            input_slots,
            hidden_dim: 0,
            activation: Activation::Relu,
            num_classes,
            active_dims: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn one_hidden_layer(
        input_slots: Vec<usize>,
        hidden_dim: usize,
        num_classes: usize,
    ) -> Result<Self> {
        let spec = Self {
            architecture: Architecture::OneHiddenLayer,
            input_slots,
            hidden_dim,
            activation: Activation::Relu,
            num_classes,
            active_dims: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_slots.is_empty() || self.total_dim() == 0 {
            return Err(Error::Argument("family needs a positive total input dim".into()));
        }
        if self.num_classes < 2 {
            return Err(Error::Argument(format!(
                "family needs at least 2 classes, got {}",
                self.num_classes
            )));
        }
        if self.architecture == Architecture::OneHiddenLayer && self.hidden_dim == 0 {
            return Err(Error::Argument("hidden_dim must be >= 1".into()));
        }
        if let Some(mask) = &self.active_dims {
            if mask.len() != self.total_dim() {
                return Err(Error::Shape(format!(
                    "active mask has {} entries, family has {} input dims",
                    mask.len(),
                    self.total_dim()
                )));
            }
        }
        Ok(())
    }

    pub fn total_dim(&self) -> usize {
        self.input_slots.iter().sum()
    }

    pub fn arity(&self) -> usize {
        self.input_slots.len()
    }

    /// Offset of each slot inside the concatenated input.
    pub fn slot_offsets(&self) -> Vec<usize> {
        self.input_slots
            .iter()
            .scan(0, |acc, &d| {
                let start = *acc;
                *acc += d;
                Some(start)
            })
            .collect()
    }

    pub fn is_active(&self, dim: usize) -> bool {
        self.active_dims.as_ref().map_or(true, |m| m[dim])
    }

    pub fn shape(&self) -> ParamShape {
        match self.architecture {
            Architecture::AffineSoftmax => ParamShape::Affine {
                inputs: self.total_dim(),
                classes: self.num_classes,
            },
            Architecture::OneHiddenLayer => ParamShape::Hidden {
                inputs: self.total_dim(),
                hidden: self.hidden_dim,
                classes: self.num_classes,
            },
        }
    }

    /// Deterministic initial parameters.
    ///
    /// Affine probes start at zero. Hidden-layer probes draw every weight
    /// and bias uniformly from `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`; weights
    /// on inactive dims are zero in both cases.
    pub fn init_params<R: Rng + ?Sized>(&self, rng: &mut R) -> ProbeParams {
        let shape = self.shape();
        let mut params = ProbeParams::zeros(shape);
        if let ParamShape::Hidden {
            inputs,
            hidden,
            classes,
        } = shape
        {
            let bound1 = 1.0 / (inputs as f64).sqrt();
            let bound2 = 1.0 / (hidden as f64).sqrt();
            let (w1, b1, w2, b2) = params.hidden_parts_mut();
            for (idx, w) in w1.iter_mut().enumerate() {
                let v = rng.random_range(-bound1..bound1);
                *w = if self.is_active(idx % inputs) { v } else { 0.0 };
            }
            b1.iter_mut()
                .for_each(|b| *b = rng.random_range(-bound1..bound1));
            w2.iter_mut()
                .for_each(|w| *w = rng.random_range(-bound2..bound2));
            b2.iter_mut()
                .for_each(|b| *b = rng.random_range(-bound2..bound2));
            debug_assert_eq!(w2.len(), classes * hidden);
        }
        params
    }

    pub(crate) fn check_params(&self, params: &ProbeParams) -> Result<()> {
        if params.shape != self.shape() {
            return Err(Error::Shape(format!(
                "params have shape {:?}, family expects {:?}",
                params.shape,
                self.shape()
            )));
        }
        Ok(())
    }
}

/// Restricts `spec` to the given input dims; weights on all other dims are
/// fixed at zero. An empty active set leaves only the bias, i.e. the family
/// of constant distributions.
pub fn zero_masked_family(
    spec: &PredictiveFamilySpec,
    active_dims: &[usize],
) -> Result<PredictiveFamilySpec> {
    let total = spec.total_dim();
    let mut mask = vec![false; total];
    for &d in active_dims {
        if d >= total {
            return Err(Error::Argument(format!(
                "active dim {d} outside input dim {total}"
            )));
        }
        if spec.is_active(d) {
            mask[d] = true;
        }
    }
    let mut out = spec.clone();
    out.active_dims = if mask.iter().all(|&a| a) {
        None
    } else {
        Some(mask)
    };
    Ok(out)
}

/// Which slots are observed. Unknown slots are filled with a constant
/// placeholder (zeros unless configured otherwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownSetSpec {
    pub known_slots: Vec<usize>,
    /// One placeholder vector per slot; only the unknown slots' entries are used.
    pub placeholder: Vec<Vec<f64>>,
}

impl KnownSetSpec {
    /// Zero placeholders for every slot.
    pub fn new(slot_dims: &[usize], known_slots: &[usize]) -> Result<Self> {
        Self::with_constant(slot_dims, known_slots, 0.0)
    }

    /// Every placeholder entry equal to `value`.
    pub fn with_constant(slot_dims: &[usize], known_slots: &[usize], value: f64) -> Result<Self> {
        let mut known: Vec<usize> = known_slots.to_vec();
        known.sort_unstable();
        known.dedup();
        if let Some(&bad) = known.iter().find(|&&s| s >= slot_dims.len()) {
            return Err(Error::Argument(format!(
                "known slot {bad} outside {} slots",
                slot_dims.len()
            )));
        }
        if !value.is_finite() {
            return Err(Error::Numeric("placeholder must be finite".into()));
        }
        Ok(Self {
            known_slots: known,
            placeholder: slot_dims.iter().map(|&d| vec![value; d]).collect(),
        })
    }

    pub fn is_known(&self, slot: usize) -> bool {
        self.known_slots.binary_search(&slot).is_ok()
    }

    pub fn num_slots(&self) -> usize {
        self.placeholder.len()
    }

    pub fn is_subset_of(&self, other: &KnownSetSpec) -> bool {
        self.known_slots.iter().all(|s| other.is_known(*s))
    }

    /// True when both specs fill unknown slots identically.
    pub fn same_placeholder(&self, other: &KnownSetSpec) -> bool {
        self.placeholder == other.placeholder
    }
}

/// Concatenates slot values in slot order, substituting the placeholder for
/// every unknown slot. Values supplied for unknown slots are ignored.
pub fn assemble_input(slot_values: &[Option<&[f64]>], known: &KnownSetSpec) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(known.placeholder.iter().map(Vec::len).sum());
    assemble_into(slot_values, known, &mut out)?;
    Ok(out)
}

pub(crate) fn assemble_into(
    slot_values: &[Option<&[f64]>],
    known: &KnownSetSpec,
    out: &mut Vec<f64>,
) -> Result<()> {
    if slot_values.len() != known.num_slots() {
        return Err(Error::Shape(format!(
            "got {} slot values for {} slots",
            slot_values.len(),
            known.num_slots()
        )));
    }
    for (slot, (value, placeholder)) in slot_values.iter().zip(&known.placeholder).enumerate() {
        if !known.is_known(slot) {
            out.extend_from_slice(placeholder);
            continue;
        }
        let value = value.ok_or_else(|| {
            Error::Argument(format!("known slot {slot} has no value"))
        })?;
        if value.len() != placeholder.len() {
            return Err(Error::Shape(format!(
                "slot {slot} has dim {}, expected {}",
                value.len(),
                placeholder.len()
            )));
        }
        out.extend_from_slice(value);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamShape {
    Affine {
        inputs: usize,
        classes: usize,
    },
    Hidden {
        inputs: usize,
        hidden: usize,
        classes: usize,
    },
}

impl ParamShape {
    pub fn len(&self) -> usize {
        match *self {
            ParamShape::Affine { inputs, classes } => classes * inputs + classes,
            ParamShape::Hidden {
                inputs,
                hidden,
                classes,
            } => hidden * inputs + hidden + classes * hidden + classes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Probe parameters stored as one flat vector.
///
/// Affine layout: `W` (classes x inputs, row-major) then `b`.
/// Hidden layout: `W1` (hidden x inputs), `b1`, `W2` (classes x hidden), `b2`.
/// Gradients use the same type and layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    shape: ParamShape,
    values: Vec<f64>,
}

impl ProbeParams {
    pub fn zeros(shape: ParamShape) -> Self {
        Self {
            shape,
            values: vec![0.0; shape.len()],
        }
    }

    pub fn from_values(shape: ParamShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::Shape(format!(
                "{} values for a parameter shape of size {}",
                values.len(),
                shape.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("parameters must be finite".into()));
        }
        Ok(Self { shape, values })
    }

    /// Affine parameters from an explicit weight matrix (one row per class) and bias.
    pub fn affine(weight: &[Vec<f64>], bias: &[f64]) -> Result<Self> {
        let classes = bias.len();
        if weight.len() != classes {
            return Err(Error::Shape("weight rows must equal bias length".into()));
        }
        let inputs = weight.first().map_or(0, Vec::len);
        if weight.iter().any(|r| r.len() != inputs) {
            return Err(Error::Shape("ragged weight matrix".into()));
        }
        let mut values: Vec<f64> = weight.iter().flatten().copied().collect();
        values.extend_from_slice(bias);
        Self::from_values(ParamShape::Affine { inputs, classes }, values)
    }

    pub fn shape(&self) -> ParamShape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn hidden_parts(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        let ParamShape::Hidden {
            inputs,
            hidden,
            classes,
        } = self.shape
        else {
            unreachable!("hidden_parts on affine params")
        };
        let (w1, rest) = self.values.split_at(hidden * inputs);
        let (b1, rest) = rest.split_at(hidden);
        let (w2, b2) = rest.split_at(classes * hidden);
        (w1, b1, w2, b2)
    }

    fn hidden_parts_mut(&mut self) -> (&mut [f64], &mut [f64], &mut [f64], &mut [f64]) {
        let ParamShape::Hidden {
            inputs,
            hidden,
            classes,
        } = self.shape
        else {
            unreachable!("hidden_parts_mut on affine params")
        };
        let (w1, rest) = self.values.split_at_mut(hidden * inputs);
        let (b1, rest) = rest.split_at_mut(hidden);
        let (w2, b2) = rest.split_at_mut(classes * hidden);
        (w1, b1, w2, b2)
    }
}

/// A probability vector over labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionOverLabels {
    pub probs: Vec<f64>,
}

impl DistributionOverLabels {
    /// Most probable label; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probs.iter().enumerate().skip(1) {
            if p > self.probs[best] {
                best = k;
            }
        }
        best
    }
}

/// In-place softmax with max subtraction. Returns log of the normalizer
/// relative to the max, so `log p_k = z_k - max - log_norm`.
fn softmax_in_place(logits: &mut [f64]) -> (f64, f64) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for z in logits.iter_mut() {
        *z = (*z - max).exp();
        sum += *z;
    }
    for z in logits.iter_mut() {
        *z /= sum;
    }
    (max, sum.ln())
}

/// Scratch buffers reused across examples within a single call.
struct Workspace {
    hidden_pre: Vec<f64>,
    hidden_act: Vec<f64>,
    probs: Vec<f64>,
    logits: Vec<f64>,
}

impl Workspace {
    fn new(shape: ParamShape) -> Self {
        let (hidden, classes) = match shape {
            ParamShape::Affine { classes, .. } => (0, classes),
            ParamShape::Hidden {
                hidden, classes, ..
            } => (hidden, classes),
        };
        Self {
            hidden_pre: vec![0.0; hidden],
            hidden_act: vec![0.0; hidden],
            probs: vec![0.0; classes],
            logits: vec![0.0; classes],
        }
    }
}

fn affine_into(weight: &[f64], bias: &[f64], input: &[f64], out: &mut [f64]) {
    let n_in = input.len();
    for (k, o) in out.iter_mut().enumerate() {
        let row = &weight[k * n_in..(k + 1) * n_in];
        *o = bias[k] + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
    }
}

/// Fills `ws.logits` and `ws.probs` for one input. Returns the log-normalizer
/// pieces from the softmax.
fn forward_ws(params: &ProbeParams, input: &[f64], ws: &mut Workspace) -> (f64, f64) {
    match params.shape {
        ParamShape::Affine { inputs, classes } => {
            let (w, b) = params.values.split_at(classes * inputs);
            affine_into(w, b, input, &mut ws.logits);
        }
        ParamShape::Hidden { .. } => {
            let (w1, b1, w2, b2) = params.hidden_parts();
            affine_into(w1, b1, input, &mut ws.hidden_pre);
            for (a, &z) in ws.hidden_act.iter_mut().zip(&ws.hidden_pre) {
                *a = z.max(0.0);
            }
            affine_into(w2, b2, &ws.hidden_act, &mut ws.logits);
        }
    }
    ws.probs.copy_from_slice(&ws.logits);
    softmax_in_place(&mut ws.probs)
}

fn check_input(params: &ProbeParams, input: &[f64]) -> Result<()> {
    let inputs = match params.shape {
        ParamShape::Affine { inputs, .. } | ParamShape::Hidden { inputs, .. } => inputs,
    };
    if input.len() != inputs {
        return Err(Error::Shape(format!(
            "input has dim {}, probe expects {inputs}",
            input.len()
        )));
    }
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("input contains a non-finite value".into()));
    }
    Ok(())
}

/// Evaluates the probe on one input.
pub fn forward(params: &ProbeParams, input: &[f64]) -> Result<DistributionOverLabels> {
    check_input(params, input)?;
    let mut ws = Workspace::new(params.shape);
    forward_ws(params, input, &mut ws);
    Ok(DistributionOverLabels { probs: ws.probs })
}

/// One labeled input.
pub type Example<'a> = (&'a [f64], usize);

fn num_classes(shape: ParamShape) -> usize {
    match shape {
        ParamShape::Affine { classes, .. } | ParamShape::Hidden { classes, .. } => classes,
    }
}

/// Mean negative log-likelihood (nats) over a batch and its exact gradient.
/// Gradient entries for weights on inactive input dims are zero.
pub fn loss_and_gradient(
    family: &PredictiveFamilySpec,
    params: &ProbeParams,
    batch: &[Example<'_>],
) -> Result<(f64, ProbeParams)> {
    family.check_params(params)?;
    if batch.is_empty() {
        return Err(Error::Argument("empty batch".into()));
    }
    let classes = num_classes(params.shape);
    let mut grads = ProbeParams::zeros(params.shape);
    let mut ws = Workspace::new(params.shape);
    let mut dhidden = vec![0.0; ws.hidden_pre.len()];
    let mut total = 0.0;

    for &(input, label) in batch {
        check_input(params, input)?;
        if label >= classes {
            return Err(Error::Argument(format!(
                "label {label} outside {classes} classes"
            )));
        }
        let (max, log_norm) = forward_ws(params, input, &mut ws);
        total += max + log_norm - ws.logits[label];
        // d loss / d logits = p - onehot(label)
        ws.probs[label] -= 1.0;
        let dlogits = &ws.probs;

        match params.shape {
            ParamShape::Affine { inputs, .. } => {
                let (gw, gb) = grads.values.split_at_mut(classes * inputs);
                for (k, &d) in dlogits.iter().enumerate() {
                    gb[k] += d;
                    let row = &mut gw[k * inputs..(k + 1) * inputs];
                    for (g, x) in row.iter_mut().zip(input) {
                        *g += d * x;
                    }
                }
            }
            ParamShape::Hidden { inputs, hidden, .. } => {
                let (_, _, w2, _) = params.hidden_parts();
                let (gw1, gb1, gw2, gb2) = grads.hidden_parts_mut();
                dhidden.iter_mut().for_each(|v| *v = 0.0);
                for (k, &d) in dlogits.iter().enumerate() {
                    gb2[k] += d;
                    let row = &mut gw2[k * hidden..(k + 1) * hidden];
                    let w_row = &w2[k * hidden..(k + 1) * hidden];
                    for j in 0..hidden {
                        row[j] += d * ws.hidden_act[j];
                        dhidden[j] += d * w_row[j];
                    }
                }
                for j in 0..hidden {
                    if ws.hidden_pre[j] <= 0.0 {
                        continue;
                    }
                    let d = dhidden[j];
                    gb1[j] += d;
                    let row = &mut gw1[j * inputs..(j + 1) * inputs];
                    for (g, x) in row.iter_mut().zip(input) {
                        *g += d * x;
                    }
                }
            }
        }
    }

    let n = batch.len() as f64;
    grads.values.iter_mut().for_each(|g| *g /= n);
    apply_mask(family, &mut grads);
    Ok((total / n, grads))
}

/// Mean negative log-likelihood (nats) without gradients.
pub fn mean_nll(params: &ProbeParams, batch: &[Example<'_>]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Argument("empty batch".into()));
    }
    let classes = num_classes(params.shape);
    let mut ws = Workspace::new(params.shape);
    let mut total = 0.0;
    for &(input, label) in batch {
        check_input(params, input)?;
        if label >= classes {
            return Err(Error::Argument(format!(
                "label {label} outside {classes} classes"
            )));
        }
        let (max, log_norm) = forward_ws(params, input, &mut ws);
        total += max + log_norm - ws.logits[label];
    }
    Ok(total / batch.len() as f64)
}

/// Zeroes every weight attached to an inactive input dim.
pub(crate) fn apply_mask(family: &PredictiveFamilySpec, params: &mut ProbeParams) {
    let Some(mask) = &family.active_dims else {
        return;
    };
    let (weights, rows, inputs) = match params.shape {
        ParamShape::Affine { inputs, classes } => (&mut params.values[..classes * inputs], classes, inputs),
        ParamShape::Hidden { inputs, hidden, .. } => (&mut params.values[..hidden * inputs], hidden, inputs),
    };
    for r in 0..rows {
        for (d, active) in mask.iter().enumerate() {
            if !active {
                weights[r * inputs + d] = 0.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    #[test]
    fn assemble_all_known() {
        let known = KnownSetSpec::new(&[2, 2], &[0, 1]).unwrap();
        let out = assemble_input(&[Some(&[1.0, 2.0]), Some(&[3.0, 4.0])], &known).unwrap();
        assert_eq!(out, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn assemble_baseline_with_zero_placeholder() {
        let known = KnownSetSpec::new(&[2, 2], &[0]).unwrap();
        let out = assemble_input(&[Some(&[1.0, 2.0]), None], &known).unwrap();
        assert_eq!(out, vec![1.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn assemble_nothing_known() {
        let known = KnownSetSpec::new(&[2, 2], &[]).unwrap();
        let out = assemble_input(&[None, None], &known).unwrap();
        assert_eq!(out, vec![0.0; 4]);
    }

    #[test]
    fn assemble_errors() {
        let known = KnownSetSpec::new(&[2, 2], &[0, 1]).unwrap();
        assert!(matches!(
            assemble_input(&[Some(&[1.0]), Some(&[3.0, 4.0])], &known),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            assemble_input(&[Some(&[1.0, 2.0]), None], &known),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn forward_zero_params_is_uniform() {
        let params = ProbeParams::zeros(ParamShape::Affine {
            inputs: 3,
            classes: 4,
        });
        let dist = forward(&params, &[5.0, -1.0, 2.0]).unwrap();
        for p in dist.probs {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn forward_bias_ln2() {
        let params = ProbeParams::affine(&[vec![0.0], vec![0.0]], &[2f64.ln(), 0.0]).unwrap();
        let dist = forward(&params, &[3.0]).unwrap();
        assert_abs_diff_eq!(dist.probs[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.probs[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn forward_large_logits_do_not_overflow() {
        let params = ProbeParams::affine(&[vec![0.0], vec![0.0]], &[1000.0, 0.0]).unwrap();
        let dist = forward(&params, &[0.0]).unwrap();
        assert_eq!(dist.probs[0], 1.0);
        assert!(dist.probs[1] >= 0.0 && dist.probs[1] < 1e-300);
    }

    #[test]
    fn forward_rejects_non_finite() {
        let params = ProbeParams::zeros(ParamShape::Affine {
            inputs: 2,
            classes: 2,
        });
        assert!(matches!(
            forward(&params, &[f64::NAN, 0.0]),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn uniform_loss_is_ln_classes() {
        let family = PredictiveFamilySpec::affine(vec![2], 4).unwrap();
        let params = ProbeParams::zeros(family.shape());
        let x = [0.3, -0.7];
        let batch: Vec<Example> = (0..4).map(|k| (&x[..], k)).collect();
        let (loss, _) = loss_and_gradient(&family, &params, &batch).unwrap();
        assert_abs_diff_eq!(loss, 4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(loss / 2f64.ln(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_batch_is_rejected() {
        let family = PredictiveFamilySpec::affine(vec![2], 2).unwrap();
        let params = ProbeParams::zeros(family.shape());
        assert!(matches!(
            loss_and_gradient(&family, &params, &[]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn family_invariants() {
        assert!(PredictiveFamilySpec::affine(vec![0], 2).is_err());
        assert!(PredictiveFamilySpec::affine(vec![2], 1).is_err());
        assert!(PredictiveFamilySpec::one_hidden_layer(vec![2], 0, 2).is_err());
    }

    #[test]
    fn masking_all_dims_is_identity() {
        let family = PredictiveFamilySpec::affine(vec![2, 3], 3).unwrap();
        let masked = zero_masked_family(&family, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(masked, family);
    }

    #[test]
    fn masked_gradients_are_zero_on_inactive_dims() {
        let family = PredictiveFamilySpec::affine(vec![2, 2], 3).unwrap();
        let masked = zero_masked_family(&family, &[0, 1]).unwrap();
        let params = ProbeParams::zeros(masked.shape());
        let x = [1.0, 2.0, 3.0, 4.0];
        let (_, g) = loss_and_gradient(&masked, &params, &[(&x[..], 1)]).unwrap();
        for k in 0..3 {
            assert_eq!(g.values()[k * 4 + 2], 0.0);
            assert_eq!(g.values()[k * 4 + 3], 0.0);
            assert_ne!(g.values()[k * 4], 0.0);
        }
    }

    #[test]
    fn hidden_init_is_seeded_and_bounded() {
        let family = PredictiveFamilySpec::one_hidden_layer(vec![4], 3, 2).unwrap();
        let a = family.init_params(&mut seeded(1));
        let b = family.init_params(&mut seeded(1));
        assert_eq!(a, b);
        let ParamShape::Hidden { .. } = a.shape() else {
            panic!()
        };
        let (w1, _, w2, _) = a.hidden_parts();
        assert!(w1.iter().all(|w| w.abs() <= 0.5));
        assert!(w2.iter().all(|w| w.abs() <= 1.0 / 3f64.sqrt()));
    }

    #[test]
    fn argmax_ties_go_low() {
        let d = DistributionOverLabels {
            probs: vec![0.25, 0.25, 0.25, 0.25],
        };
        assert_eq!(d.argmax(), 0);
        let d = DistributionOverLabels {
            probs: vec![0.2, 0.4, 0.4],
        };
        assert_eq!(d.argmax(), 1);
    }
}
