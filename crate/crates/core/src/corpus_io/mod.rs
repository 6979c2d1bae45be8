//! File formats and dataset assembly.
//!
//! * `.vrep` binary representation bundles ([`repr_codec`])
//! * tab-separated label files ([`labels`])
//! * flat `key = value` experiment configs ([`config`])
//! * JSON-lines and CSV probing reports ([`report`])
//! * sentence-level train/dev/test splits ([`split`])

pub mod config;
pub mod labels;
pub mod repr_codec;
pub mod report;
pub mod split;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{read_config, ExperimentConfig};
pub use labels::{parse_labels, read_labels, write_labels};
pub use repr_codec::{read_bundle, write_bundle};
pub use report::{read_report, write_report, write_report_csv, write_report_jsonl};
pub use split::{attach_split, read_index_file, SplitSpec};

/// Per-sentence vectors for every layer, stored as on disk (float32,
/// layer-major then word-major).
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVectors {
    n_words: usize,
    data: Vec<f32>,
}

impl SentenceVectors {
    pub fn n_words(&self) -> usize {
        self.n_words
    }

    pub fn raw(&self) -> &[f32] {
        &self.data
    }
}

/// Layer-indexed word vectors for a corpus. Layer 0 is the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationBundle {
    n_layers: usize,
    dim: usize,
    sentences: Vec<SentenceVectors>,
}

impl RepresentationBundle {
    pub fn new(n_layers: usize, dim: usize) -> Result<Self> {
        if n_layers == 0 || dim == 0 {
            return Err(Error::Argument(
                "bundle needs at least one layer and a positive dim".into(),
            ));
        }
        Ok(Self {
            n_layers,
            dim,
            sentences: Vec::new(),
        })
    }

    /// Appends a sentence given as `layers[layer][word]` vectors.
    pub fn push_sentence(&mut self, layers: &[Vec<Vec<f32>>]) -> Result<()> {
        if layers.len() != self.n_layers {
            return Err(Error::Shape(format!(
                "sentence has {} layers, bundle has {}",
                layers.len(),
                self.n_layers
            )));
        }
        let n_words = layers[0].len();
        let mut data = Vec::with_capacity(self.n_layers * n_words * self.dim);
        for (l, words) in layers.iter().enumerate() {
            if words.len() != n_words {
                return Err(Error::Shape(format!(
                    "layer {l} has {} words, layer 0 has {n_words}",
                    words.len()
                )));
            }
            for v in words {
                if v.len() != self.dim {
                    return Err(Error::Shape(format!(
                        "vector of dim {} in a bundle of dim {}",
                        v.len(),
                        self.dim
                    )));
                }
                data.extend_from_slice(v);
            }
        }
        self.sentences.push(SentenceVectors { n_words, data });
        Ok(())
    }

    pub(crate) fn push_raw(&mut self, n_words: usize, data: Vec<f32>) {
        debug_assert_eq!(data.len(), self.n_layers * n_words * self.dim);
        self.sentences.push(SentenceVectors { n_words, data });
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn sentences(&self) -> &[SentenceVectors] {
        &self.sentences
    }

    pub fn word_vector(&self, sentence: usize, layer: usize, word: usize) -> &[f32] {
        let s = &self.sentences[sentence];
        let start = (layer * s.n_words + word) * self.dim;
        &s.data[start..start + self.dim]
    }

    /// Mean of the sentence's word vectors at `layer`.
    pub fn sentence_mean(&self, sentence: usize, layer: usize) -> Vec<f64> {
        let n = self.sentences[sentence].n_words;
        let mut out = vec![0.0; self.dim];
        for w in 0..n {
            for (o, &v) in out.iter_mut().zip(self.word_vector(sentence, layer, w)) {
                *o += f64::from(v);
            }
        }
        if n > 0 {
            out.iter_mut().for_each(|o| *o /= n as f64);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Word,
    Sentence,
}

impl std::str::FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word" => Ok(Granularity::Word),
            "sentence" => Ok(Granularity::Sentence),
            other => Err(Error::Config(format!(
                "granularity must be `word` or `sentence`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitPart {
    Train,
    Dev,
    Test,
}

impl std::fmt::Display for SplitPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SplitPart::Train => "train",
            SplitPart::Dev => "dev",
            SplitPart::Test => "test",
        })
    }
}

impl std::str::FromStr for SplitPart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitPart::Train),
            "dev" => Ok(SplitPart::Dev),
            "test" => Ok(SplitPart::Test),
            other => Err(Error::Config(format!(
                "split must be one of train, dev, test; got `{other}`"
            ))),
        }
    }
}

/// Disjoint sentence-index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub dev: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn part(&self, part: SplitPart) -> &[usize] {
        match part {
            SplitPart::Train => &self.train,
            SplitPart::Dev => &self.dev,
            SplitPart::Test => &self.test,
        }
    }
}

/// One sentence of a task. Word tasks carry one label per token; sentence
/// tasks carry exactly one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<String>,
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    pub granularity: Granularity,
    pub sentences: Vec<Sentence>,
    /// Label strings indexed by label id, in first-appearance order.
    pub label_vocab: Vec<String>,
    pub split: Option<Split>,
}

impl LabeledDataset {
    pub fn num_classes(&self) -> usize {
        self.label_vocab.len()
    }

    pub fn split(&self) -> Result<&Split> {
        self.split
            .as_ref()
            .ok_or_else(|| Error::Data("dataset has no train/dev/test split attached".into()))
    }

    /// Rejects mismatched sentence or token counts between labels and vectors.
    pub fn check_against(&self, bundle: &RepresentationBundle) -> Result<()> {
        if self.sentences.len() != bundle.n_sentences() {
            return Err(Error::Data(format!(
                "label file has {} sentences, representation file has {}",
                self.sentences.len(),
                bundle.n_sentences()
            )));
        }
        for (i, (s, v)) in self.sentences.iter().zip(bundle.sentences()).enumerate() {
            if s.tokens.len() != v.n_words() {
                return Err(Error::Data(format!(
                    "sentence {i}: label file has {} tokens, representation file has {} words",
                    s.tokens.len(),
                    v.n_words()
                )));
            }
            if self.granularity == Granularity::Sentence && v.n_words() == 0 {
                return Err(Error::Data(format!("sentence {i} has no words to average")));
            }
        }
        Ok(())
    }
}
