//! Sentence-level train/dev/test splits.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;

use super::{LabeledDataset, Split, SplitPart};
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq)]
pub enum SplitSpec {
    /// Fractions of sentences for train, dev and test; must sum to 1.
    Ratios(f64, f64, f64),
    /// Explicit sentence indices.
    Explicit {
        train: Vec<usize>,
        dev: Vec<usize>,
        test: Vec<usize>,
    },
}

/// Attaches a split. Ratio splits shuffle sentence indices with the seed and
/// assign contiguous runs; each part is then sorted.
///
/// Labels that never occur in the train portion are rejected.
pub fn attach_split(
    mut dataset: LabeledDataset,
    spec: &SplitSpec,
    seed: u64,
) -> Result<LabeledDataset> {
    let n = dataset.sentences.len();
    let mut split = match spec {
        SplitSpec::Ratios(tr, dv, te) => {
            if [tr, dv, te].iter().any(|r| !(0.0..=1.0).contains(*r)) {
                return Err(Error::Data("split ratios must lie in [0, 1]".into()));
            }
            if (tr + dv + te - 1.0).abs() > 1e-9 {
                return Err(Error::Data(format!(
                    "split ratios sum to {}, expected 1",
                    tr + dv + te
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut seeded(seed));
            let n_train = ((n as f64) * tr).round() as usize;
            let n_dev = (((n as f64) * dv).round() as usize).min(n - n_train.min(n));
            let n_train = n_train.min(n);
            let test = order.split_off(n_train + n_dev);
            let dev = order.split_off(n_train);
            Split {
                train: order,
                dev,
                test,
            }
        }
        SplitSpec::Explicit { train, dev, test } => {
            let mut owner: HashMap<usize, SplitPart> = HashMap::new();
            for (part, idxs) in [
                (SplitPart::Train, train),
                (SplitPart::Dev, dev),
                (SplitPart::Test, test),
            ] {
                for &i in idxs {
                    if i >= n {
                        return Err(Error::Data(format!(
                            "{part} split names sentence {i}, dataset has {n}"
                        )));
                    }
                    if let Some(prev) = owner.insert(i, part) {
                        return Err(Error::Data(format!(
                            "sentence index {i} appears in both the {prev} and {part} splits"
                        )));
                    }
                }
            }
            Split {
                train: train.clone(),
                dev: dev.clone(),
                test: test.clone(),
            }
        }
    };
    for part in [&mut split.train, &mut split.dev, &mut split.test] {
        part.sort_unstable();
    }
    if split.train.is_empty() || split.dev.is_empty() {
        return Err(Error::Data("train and dev splits must be non-empty".into()));
    }

    let mut in_train = vec![false; dataset.label_vocab.len()];
    for &i in &split.train {
        for &l in &dataset.sentences[i].labels {
            in_train[l] = true;
        }
    }
    for part in [SplitPart::Dev, SplitPart::Test] {
        for &i in split.part(part) {
            if let Some(&l) = dataset.sentences[i].labels.iter().find(|&&l| !in_train[l]) {
                return Err(Error::Data(format!(
                    "label `{}` in {part} sentence {i} never occurs in train",
                    dataset.label_vocab[l]
                )));
            }
        }
    }
    dataset.split = Some(split);
    Ok(dataset)
}

/// Reads one sentence index per line; blank lines and `#` comments are skipped.
pub fn read_index_file(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            message: format!("`{line}` is not a sentence index"),
        })?);
    }
    Ok(out)
}

pub fn write_index_file(path: impl AsRef<Path>, indices: &[usize]) -> Result<()> {
    let path = path.as_ref();
    let text: String = indices.iter().map(|i| format!("{i}\n")).collect();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{Granularity, Sentence};

    fn dataset(n: usize) -> LabeledDataset {
        LabeledDataset {
            granularity: Granularity::Sentence,
            sentences: (0..n)
                .map(|_| Sentence {
                    tokens: vec!["w".into()],
                    labels: vec![0],
                })
                .collect(),
            label_vocab: vec!["a".into()],
            split: None,
        }
    }

    #[test]
    fn ratio_counts() {
        let ds = attach_split(dataset(100), &SplitSpec::Ratios(0.8, 0.1, 0.1), 3).unwrap();
        let s = ds.split().unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (80, 10, 10));
        let mut all: Vec<usize> = s.train.iter().chain(&s.dev).chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_same_split() {
        let a = attach_split(dataset(50), &SplitSpec::Ratios(0.6, 0.2, 0.2), 9).unwrap();
        let b = attach_split(dataset(50), &SplitSpec::Ratios(0.6, 0.2, 0.2), 9).unwrap();
        let c = attach_split(dataset(50), &SplitSpec::Ratios(0.6, 0.2, 0.2), 10).unwrap();
        assert_eq!(a.split, b.split);
        assert_ne!(a.split, c.split);
    }

    #[test]
    fn overlapping_explicit_split_names_index() {
        let spec = SplitSpec::Explicit {
            train: vec![0, 1, 2],
            dev: vec![3, 2],
            test: vec![],
        };
        let err = attach_split(dataset(5), &spec, 0).unwrap_err();
        assert!(err.to_string().contains("sentence index 2"), "{err}");
    }

    #[test]
    fn ratios_must_sum_to_one() {
        assert!(attach_split(dataset(10), &SplitSpec::Ratios(0.5, 0.1, 0.1), 0).is_err());
    }

    #[test]
    fn unseen_dev_label_rejected() {
        let mut ds = dataset(4);
        ds.label_vocab.push("b".into());
        ds.sentences[3].labels = vec![1];
        let spec = SplitSpec::Explicit {
            train: vec![0, 1],
            dev: vec![2, 3],
            test: vec![],
        };
        let err = attach_split(ds, &spec, 0).unwrap_err();
        assert!(err.to_string().contains("`b`"), "{err}");
    }
}
