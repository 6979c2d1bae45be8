//! Planted synthetic scenarios with known information structure.
//!
//! Every scenario is a word-level tagging task. Words are drawn uniformly
//! from a vocabulary; word `w` has dominant tag `w mod classes`. The
//! generator is [`crate::rng::seeded`] on the scenario seed, and each token
//! consumes its draws in a fixed order, so outputs are bit-reproducible.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::counting::{DiscreteJoint, MAX_CARDINALITY};
use crate::corpus_io::{Granularity, LabeledDataset, RepresentationBundle, Sentence, Split, SplitPart};
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// One layer: one-hot word. Tags follow a designed conditional table.
    Tabular,
    /// Layer 0: one-hot word (tabular tags). Layer 1: one-hot symbol drawn
    /// independently of word and tag.
    Independence,
    /// Layer 0: one-hot word (tabular tags). Layer 1: an exact copy.
    SelfCondition,
    /// Layer 0: one-hot word. Layer 1: word plus a disambiguation feature.
    /// Layer 2: the disambiguation feature alone.
    PlantedAmbiguity,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tabular" => Ok(Scenario::Tabular),
            "independence" => Ok(Scenario::Independence),
            "self-condition" | "self_condition" => Ok(Scenario::SelfCondition),
            "planted-ambiguity" | "planted_ambiguity" => Ok(Scenario::PlantedAmbiguity),
            other => Err(Error::Argument(format!(
                "unknown scenario `{other}` (tabular, independence, self-condition, planted-ambiguity)"
            ))),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::Tabular => "tabular",
            Scenario::Independence => "independence",
            Scenario::SelfCondition => "self-condition",
            Scenario::PlantedAmbiguity => "planted-ambiguity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub vocab: usize,
    pub classes: usize,
    /// Token counts per split.
    pub n_train: usize,
    pub n_dev: usize,
    pub n_test: usize,
    pub sentence_len: usize,
    /// PlantedAmbiguity: probability that a token's tag comes from the
    /// disambiguation feature instead of the word.
    pub ambiguity_rate: f64,
    /// Tabular-tag scenarios: the off-dominant mass for word `w` is
    /// `label_noise * (w + 1) / vocab`, spread uniformly over all classes.
    pub label_noise: f64,
    /// Standard deviation of Gaussian noise added to every vector entry.
    pub feature_noise: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            vocab: 8,
            classes: 4,
            n_train: 4096,
            n_dev: 4096,
            n_test: 0,
            sentence_len: 8,
            ambiguity_rate: 0.2,
            label_noise: 0.4,
            feature_noise: 0.0,
            seed,
        }
    }

    pub fn with_sizes(mut self, n_train: usize, n_dev: usize, n_test: usize) -> Self {
        self.n_train = n_train;
        self.n_dev = n_dev;
        self.n_test = n_test;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let arg = |m: String| Err(Error::Argument(m));
        if self.vocab == 0 || self.classes < 2 || self.sentence_len == 0 {
            return arg("vocab and sentence_len must be >= 1 and classes >= 2".into());
        }
        if self.n_train == 0 || self.n_dev == 0 {
            return arg("train and dev sizes must be >= 1".into());
        }
        if self.scenario == Scenario::Tabular && self.classes > self.vocab {
            return arg(format!(
                "tabular scenario needs classes ({}) <= vocab ({}) so every class dominates some word",
                self.classes, self.vocab
            ));
        }
        if self.vocab as u32 > MAX_CARDINALITY || self.classes as u32 >= MAX_CARDINALITY {
            return arg(format!("vocab and classes must stay below {MAX_CARDINALITY}"));
        }
        for (name, r) in [
            ("ambiguity_rate", self.ambiguity_rate),
            ("label_noise", self.label_noise),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return arg(format!("{name} must lie in [0, 1], got {r}"));
            }
        }
        if !(self.feature_noise >= 0.0 && self.feature_noise.is_finite()) {
            return arg("feature_noise must be finite and non-negative".into());
        }
        Ok(())
    }

    /// The designed P(tag | word) row for tabular-tag scenarios.
    pub fn tag_distribution(&self, word: usize) -> Vec<f64> {
        let noise = self.label_noise * (word + 1) as f64 / self.vocab as f64;
        let mut row = vec![noise / self.classes as f64; self.classes];
        row[word % self.classes] += 1.0 - noise;
        row
    }

    /// H(tag | word) in bits of the designed table under uniform words.
    pub fn designed_conditional_entropy(&self) -> f64 {
        (0..self.vocab)
            .map(|w| {
                -self
                    .tag_distribution(w)
                    .iter()
                    .filter(|&&p| p > 0.0)
                    .map(|p| p * p.log2())
                    .sum::<f64>()
            })
            .sum::<f64>()
            / self.vocab as f64
    }

    fn n_layers(&self) -> usize {
        match self.scenario {
            Scenario::Tabular => 1,
            Scenario::Independence | Scenario::SelfCondition => 2,
            Scenario::PlantedAmbiguity => 3,
        }
    }

    fn dim(&self) -> usize {
        match self.scenario {
            Scenario::Tabular | Scenario::SelfCondition => self.vocab,
            Scenario::Independence => self.vocab.max(self.classes),
            Scenario::PlantedAmbiguity => self.vocab + self.classes,
        }
    }
}

/// A generated corpus plus the discrete latent variables behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub spec: ScenarioSpec,
    /// Word-level dataset with an explicit train/dev/test split attached.
    pub dataset: LabeledDataset,
    pub bundle: RepresentationBundle,
    /// Names of the latent variables (e.g. `word`, `feature`).
    pub variable_names: Vec<String>,
    /// `variables[v][t]`: variable `v` at token `t` (corpus order).
    pub variables: Vec<Vec<u32>>,
    /// The latent variables each layer is a function of.
    pub layer_variables: Vec<Vec<usize>>,
    /// Tag at token `t` (corpus order).
    pub tags: Vec<u32>,
}

impl SyntheticCorpus {
    /// Corpus-order token indices of one split part.
    pub fn token_indices(&self, part: SplitPart) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.dataset.sentences.len());
        let mut acc = 0;
        for s in &self.dataset.sentences {
            starts.push(acc);
            acc += s.tokens.len();
        }
        let split = self.dataset.split.as_ref().expect("synthetic corpora carry a split");
        split
            .part(part)
            .iter()
            .flat_map(|&s| starts[s]..starts[s] + self.dataset.sentences[s].tokens.len())
            .collect()
    }

    /// Count table over all latent variables and the tag, for one split part.
    pub fn joint(&self, part: SplitPart) -> DiscreteJoint {
        let idx = self.token_indices(part);
        let cols: Vec<Vec<u32>> = self
            .variables
            .iter()
            .map(|v| idx.iter().map(|&t| v[t]).collect())
            .collect();
        let views: Vec<&[u32]> = cols.iter().map(Vec::as_slice).collect();
        let tags: Vec<u32> = idx.iter().map(|&t| self.tags[t]).collect();
        DiscreteJoint::from_columns(&views, &tags).expect("latents respect the cardinality limit")
    }

    /// Union of the latent variables behind the given layers.
    pub fn variables_of(&self, layers: &[usize]) -> Vec<usize> {
        let mut vars: Vec<usize> = layers
            .iter()
            .flat_map(|&l| self.layer_variables[l].iter().copied())
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

struct Token {
    word: usize,
    tag: usize,
    /// Independence: the independent symbol. PlantedAmbiguity: the
    /// disambiguation value, `classes` meaning "no feature".
    aux: usize,
}

fn draw_categorical(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}

fn draw_token(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Token {
    let word = rng.random_range(0..spec.vocab);
    match spec.scenario {
        Scenario::Tabular | Scenario::SelfCondition => Token {
            word,
            tag: draw_categorical(rng, &spec.tag_distribution(word)),
            aux: 0,
        },
        Scenario::Independence => {
            let tag = draw_categorical(rng, &spec.tag_distribution(word));
            Token {
                word,
                tag,
                aux: rng.random_range(0..spec.classes),
            }
        }
        Scenario::PlantedAmbiguity => {
            let ambiguous = rng.random::<f64>() < spec.ambiguity_rate;
            if ambiguous {
                let tag = rng.random_range(0..spec.classes);
                Token { word, tag, aux: tag }
            } else {
                Token {
                    word,
                    tag: word % spec.classes,
                    aux: spec.classes,
                }
            }
        }
    }
}

fn layer_vectors(spec: &ScenarioSpec, tok: &Token) -> Vec<Vec<f32>> {
    let dim = spec.dim();
    let one_hot = |i: usize| {
        let mut v = vec![0.0f32; dim];
        v[i] = 1.0;
        v
    };
    match spec.scenario {
        Scenario::Tabular => vec![one_hot(tok.word)],
        Scenario::SelfCondition => vec![one_hot(tok.word), one_hot(tok.word)],
        Scenario::Independence => vec![one_hot(tok.word), one_hot(tok.aux)],
        Scenario::PlantedAmbiguity => {
            let mut feature = vec![0.0f32; dim];
            if tok.aux < spec.classes {
                feature[spec.vocab + tok.aux] = 1.0;
            }
            let mut both = one_hot(tok.word);
            for (b, f) in both.iter_mut().zip(&feature) {
                *b += f;
            }
            vec![one_hot(tok.word), both, feature]
        }
    }
}

/// Generates a scenario. Sentences hold `sentence_len` tokens (the last
/// sentence of each split may be shorter); train sentences come first, then
/// dev, then test.
pub fn synth_generate(spec: &ScenarioSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = seeded(spec.seed);
    let n_layers = spec.n_layers();
    let mut bundle = RepresentationBundle::new(n_layers, spec.dim())?;
    let mut sentences = Vec::new();
    let mut split = Split {
        train: Vec::new(),
        dev: Vec::new(),
        test: Vec::new(),
    };
    let mut words = Vec::new();
    let mut aux = Vec::new();
    let mut tags = Vec::new();

    for (part, n_tokens) in [
        (SplitPart::Train, spec.n_train),
        (SplitPart::Dev, spec.n_dev),
        (SplitPart::Test, spec.n_test),
    ] {
        let mut remaining = n_tokens;
        while remaining > 0 {
            let len = remaining.min(spec.sentence_len);
            remaining -= len;
            let mut layers: Vec<Vec<Vec<f32>>> = vec![Vec::with_capacity(len); n_layers];
            let mut sentence = Sentence {
                tokens: Vec::with_capacity(len),
                labels: Vec::with_capacity(len),
            };
            for _ in 0..len {
                let tok = draw_token(spec, &mut rng);
                for (layer, mut v) in layers.iter_mut().zip(layer_vectors(spec, &tok)) {
                    if spec.feature_noise > 0.0 {
                        for x in v.iter_mut() {
                            let n: f64 = rng.sample(StandardNormal);
                            *x += (spec.feature_noise * n) as f32;
                        }
                    }
                    layer.push(v);
                }
                sentence.tokens.push(format!("w{}", tok.word));
                sentence.labels.push(tok.tag);
                words.push(tok.word as u32);
                aux.push(tok.aux as u32);
                tags.push(tok.tag as u32);
            }
            bundle.push_sentence(&layers)?;
            let idx = sentences.len();
            match part {
                SplitPart::Train => split.train.push(idx),
                SplitPart::Dev => split.dev.push(idx),
                SplitPart::Test => split.test.push(idx),
            }
            sentences.push(sentence);
        }
    }

    let (variable_names, variables, layer_variables) = match spec.scenario {
        Scenario::Tabular => (vec!["word"], vec![words], vec![vec![0]]),
        Scenario::SelfCondition => (vec!["word"], vec![words], vec![vec![0], vec![0]]),
        Scenario::Independence => (vec!["word", "symbol"], vec![words, aux], vec![vec![0], vec![1]]),
        Scenario::PlantedAmbiguity => (
            vec!["word", "feature"],
            vec![words, aux],
            vec![vec![0], vec![0, 1], vec![1]],
        ),
    };
    let dataset = LabeledDataset {
        granularity: Granularity::Word,
        sentences,
        label_vocab: (0..spec.classes).map(|k| format!("T{k}")).collect(),
        split: Some(split),
    };
    Ok(SyntheticCorpus {
        spec: spec.clone(),
        dataset,
        bundle,
        variable_names: variable_names.into_iter().map(str::to_owned).collect(),
        variables,
        layer_variables,
        tags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{empirical_conditional_entropy, shannon_mi};

    #[test]
    fn tabular_sample_matches_designed_table() {
        let spec = ScenarioSpec::new(Scenario::Tabular, 11);
        let c = synth_generate(&spec).unwrap();
        let h = empirical_conditional_entropy(&c.joint(SplitPart::Train), &[0]).unwrap();
        let designed = spec.designed_conditional_entropy();
        // Plug-in bias is O(vocab * classes / N) and the spread O(1/sqrt(N)).
        assert!((h - designed).abs() < 0.05, "{h} vs {designed}");
    }

    #[test]
    fn independence_symbol_carries_no_information() {
        let c = synth_generate(&ScenarioSpec::new(Scenario::Independence, 5)).unwrap();
        let mi = shannon_mi(&c.joint(SplitPart::Train), 1, &[]).unwrap();
        assert!(mi < 0.01, "{mi}");
    }

    #[test]
    fn planted_ambiguity_information_pattern() {
        let spec = ScenarioSpec::new(Scenario::PlantedAmbiguity, 3).with_sizes(4096, 1024, 1024);
        let c = synth_generate(&spec).unwrap();
        let j = c.joint(SplitPart::Train);
        let i_feature = shannon_mi(&j, 1, &[]).unwrap();
        let i_word = shannon_mi(&j, 0, &[]).unwrap();
        let i_feature_given_word = shannon_mi(&j, 1, &[0]).unwrap();
        assert!(i_feature < i_word, "{i_feature} vs {i_word}");
        assert!(i_feature_given_word > 0.5, "{i_feature_given_word}");
    }

    #[test]
    fn generation_is_reproducible() {
        let spec = ScenarioSpec::new(Scenario::PlantedAmbiguity, 99).with_sizes(300, 100, 50);
        let a = synth_generate(&spec).unwrap();
        let b = synth_generate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            crate::corpus_io::repr_codec::encode(&a.bundle),
            crate::corpus_io::repr_codec::encode(&b.bundle)
        );
        let c = synth_generate(&ScenarioSpec { seed: 100, ..spec }).unwrap();
        assert_ne!(a.tags, c.tags);
    }

    #[test]
    fn sizes_and_split() {
        let spec = ScenarioSpec::new(Scenario::SelfCondition, 1).with_sizes(20, 10, 3);
        let c = synth_generate(&spec).unwrap();
        assert_eq!(c.token_indices(SplitPart::Train).len(), 20);
        assert_eq!(c.token_indices(SplitPart::Dev).len(), 10);
        assert_eq!(c.token_indices(SplitPart::Test).len(), 3);
        c.dataset.check_against(&c.bundle).unwrap();
        assert_eq!(c.bundle.n_layers(), 2);
        assert_eq!(c.bundle.word_vector(0, 0, 0), c.bundle.word_vector(0, 1, 0));
    }

    #[test]
    fn impossible_tabular_spec() {
        let mut spec = ScenarioSpec::new(Scenario::Tabular, 0);
        spec.classes = 9;
        assert!(matches!(synth_generate(&spec), Err(Error::Argument(_))));
    }
}
