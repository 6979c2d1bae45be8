//! Tab-separated label files.
//!
//! Word tasks: one `token<TAB>label` line per token, a blank line between
//! sentences. Sentence tasks: one `label<TAB>text` line per sentence, where
//! the text's whitespace-separated words align with the representation file.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Granularity, LabeledDataset, Sentence};
use crate::error::{Error, Result};

pub fn read_labels(path: impl AsRef<Path>, granularity: Granularity) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, &path.display().to_string(), granularity)
}

struct Vocab {
    ids: HashMap<String, usize>,
    names: Vec<String>,
}

impl Vocab {
    fn intern(&mut self, label: &str) -> usize {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(label.to_owned(), id);
        self.names.push(label.to_owned());
        id
    }
}

/// Parses label-file text; `source` names the file in error messages.
pub fn parse_labels(text: &str, source: &str, granularity: Granularity) -> Result<LabeledDataset> {
    let mut vocab = Vocab {
        ids: HashMap::new(),
        names: Vec::new(),
    };
    let mut sentences = Vec::new();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_owned(),
        line,
        message,
    };

    match granularity {
        Granularity::Word => {
            let mut current = Sentence {
                tokens: Vec::new(),
                labels: Vec::new(),
            };
            for (idx, line) in text.lines().enumerate() {
                let line_no = idx + 1;
                if line.trim().is_empty() {
                    if !current.tokens.is_empty() {
                        sentences.push(std::mem::replace(
                            &mut current,
                            Sentence {
                                tokens: Vec::new(),
                                labels: Vec::new(),
                            },
                        ));
                    }
                    continue;
                }
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 2 {
                    return Err(parse_err(
                        line_no,
                        format!("expected `token<TAB>label`, found {} fields", fields.len()),
                    ));
                }
                if fields[0].is_empty() || fields[1].is_empty() {
                    return Err(parse_err(line_no, "empty token or label".into()));
                }
                current.tokens.push(fields[0].to_owned());
                current.labels.push(vocab.intern(fields[1]));
            }
            if !current.tokens.is_empty() {
                sentences.push(current);
            }
        }
        Granularity::Sentence => {
            for (idx, line) in text.lines().enumerate() {
                let line_no = idx + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 2 {
                    return Err(parse_err(
                        line_no,
                        format!("expected `label<TAB>text`, found {} fields", fields.len()),
                    ));
                }
                if fields[0].is_empty() {
                    return Err(parse_err(line_no, "empty label".into()));
                }
                let tokens: Vec<String> = fields[1].split_whitespace().map(str::to_owned).collect();
                if tokens.is_empty() {
                    return Err(parse_err(line_no, "sentence has no words".into()));
                }
                sentences.push(Sentence {
                    tokens,
                    labels: vec![vocab.intern(fields[0])],
                });
            }
        }
    }

    if sentences.is_empty() {
        return Err(Error::Data(format!("{source}: no sentences")));
    }
    Ok(LabeledDataset {
        granularity,
        sentences,
        label_vocab: vocab.names,
        split: None,
    })
}

/// Renders a dataset back into its label-file text.
pub fn format_labels(dataset: &LabeledDataset) -> String {
    let mut out = String::new();
    for s in &dataset.sentences {
        match dataset.granularity {
            Granularity::Word => {
                for (tok, &label) in s.tokens.iter().zip(&s.labels) {
                    let _ = writeln!(out, "{tok}\t{}", dataset.label_vocab[label]);
                }
                out.push('\n');
            }
            Granularity::Sentence => {
                let _ = writeln!(
                    out,
                    "{}\t{}",
                    dataset.label_vocab[s.labels[0]],
                    s.tokens.join(" ")
                );
            }
        }
    }
    out
}

pub fn write_labels(path: impl AsRef<Path>, dataset: &LabeledDataset) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_labels(dataset)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_file() {
        let ds = parse_labels("the\tDET\ncat\tNOUN\n\n", "t", Granularity::Word).unwrap();
        assert_eq!(ds.sentences.len(), 1);
        assert_eq!(ds.sentences[0].tokens, vec!["the", "cat"]);
        assert_eq!(ds.label_vocab, vec!["DET", "NOUN"]);
        assert_eq!(ds.sentences[0].labels, vec![0, 1]);
    }

    #[test]
    fn vocab_in_first_appearance_order() {
        let ds = parse_labels("a\tX\nb\tY\n\nc\tY\nd\tZ\ne\tX\n", "t", Granularity::Word).unwrap();
        assert_eq!(ds.sentences.len(), 2);
        assert_eq!(ds.label_vocab, vec!["X", "Y", "Z"]);
        assert_eq!(ds.sentences[1].labels, vec![1, 2, 0]);
    }

    #[test]
    fn sentence_file() {
        let ds = parse_labels("1\tgreat movie\n", "t", Granularity::Sentence).unwrap();
        assert_eq!(ds.sentences.len(), 1);
        assert_eq!(ds.label_vocab, vec!["1"]);
        assert_eq!(ds.sentences[0].tokens, vec!["great", "movie"]);
    }

    #[test]
    fn ragged_line_cites_line_number() {
        let err = parse_labels("the\tDET\na\tb\tc\td\n", "f.tsv", Granularity::Word).unwrap_err();
        match &err {
            Error::Parse { line, path, .. } => {
                assert_eq!(*line, 2);
                assert_eq!(path, "f.tsv");
            }
            other => panic!("{other}"),
        }
        assert!(err.to_string().starts_with("f.tsv:2:"));
    }

    #[test]
    fn empty_file_is_data_error() {
        assert!(matches!(
            parse_labels("\n\n", "t", Granularity::Word),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn format_round_trips() {
        let text = "the\tDET\ncat\tNOUN\n\nsat\tVERB\n\n";
        let ds = parse_labels(text, "t", Granularity::Word).unwrap();
        assert_eq!(format_labels(&ds), text);
        let text = "pos\ta fine film\nneg\tdull\n";
        let ds = parse_labels(text, "t", Granularity::Sentence).unwrap();
        assert_eq!(format_labels(&ds), text);
    }
}
