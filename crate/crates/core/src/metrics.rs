//! Task metrics reported next to V-entropies: accuracy, and exact-match
//! span F1 over BIO-tagged entities.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskMetric {
    Accuracy,
    SpanF1,
}

impl std::str::FromStr for TaskMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy" => Ok(TaskMetric::Accuracy),
            "span_f1" => Ok(TaskMetric::SpanF1),
            other => Err(Error::Config(format!(
                "metric must be `accuracy` or `span_f1`, got `{other}`"
            ))),
        }
    }
}

pub fn accuracy<T: PartialEq>(pred: &[T], gold: &[T]) -> Result<f64> {
    if pred.len() != gold.len() {
        return Err(Error::Argument(format!(
            "{} predictions for {} gold labels",
            pred.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Argument("accuracy of an empty sequence".into()));
    }
    let hits = pred.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(hits as f64 / gold.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub kind: String,
}

/// Typed spans of one sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanSet {
    pub spans: BTreeSet<Span>,
}

impl SpanSet {
    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

impl FromIterator<(usize, usize, &'static str)> for SpanSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize, &'static str)>>(iter: I) -> Self {
        SpanSet {
            spans: iter
                .into_iter()
                .map(|(start, end, kind)| Span {
                    start,
                    end,
                    kind: kind.to_owned(),
                })
                .collect(),
        }
    }
}

enum Tag<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

fn parse_tag(tag: &str) -> Result<Tag<'_>> {
    if tag == "O" {
        return Ok(Tag::Outside);
    }
    match tag.split_once('-') {
        Some(("B", kind)) if !kind.is_empty() => Ok(Tag::Begin(kind)),
        Some(("I", kind)) if !kind.is_empty() => Ok(Tag::Inside(kind)),
        _ => Err(Error::Argument(format!("malformed BIO tag `{tag}`"))),
    }
}

/// Decodes BIO tags into maximal spans. An `I-T` that does not continue a
/// span of type `T` opens a new one.
pub fn bio_decode<S: AsRef<str>>(tags: &[S]) -> Result<SpanSet> {
    let mut out = SpanSet::default();
    let mut open: Option<(usize, &str)> = None;
    let close = |open: &mut Option<(usize, &str)>, end: usize, out: &mut SpanSet| {
        if let Some((start, kind)) = open.take() {
            out.spans.insert(Span {
                start,
                end,
                kind: kind.to_owned(),
            });
        }
    };
    for (i, tag) in tags.iter().enumerate() {
        match parse_tag(tag.as_ref())? {
            Tag::Outside => close(&mut open, i.wrapping_sub(1), &mut out),
            Tag::Begin(kind) => {
                close(&mut open, i.wrapping_sub(1), &mut out);
                open = Some((i, kind));
            }
            Tag::Inside(kind) => match open {
                Some((_, k)) if k == kind => {}
                _ => {
                    close(&mut open, i.wrapping_sub(1), &mut out);
                    open = Some((i, kind));
                }
            },
        }
    }
    close(&mut open, tags.len().wrapping_sub(1), &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Micro-averaged exact-match span scores over aligned sentences.
///
/// With no predicted spans precision is 1; with no gold spans recall is 1.
/// F1 is 0 when precision and recall are both 0.
pub fn span_f1(pred: &[SpanSet], gold: &[SpanSet]) -> Result<PrecisionRecall> {
    if pred.len() != gold.len() {
        return Err(Error::Argument(format!(
            "{} predicted sentences for {} gold sentences",
            pred.len(),
            gold.len()
        )));
    }
    let (mut tp, mut n_pred, mut n_gold) = (0usize, 0usize, 0usize);
    for (p, g) in pred.iter().zip(gold) {
        tp += p.spans.intersection(&g.spans).count();
        n_pred += p.len();
        n_gold += g.len();
    }
    let precision = if n_pred == 0 { 1.0 } else { tp as f64 / n_pred as f64 };
    let recall = if n_gold == 0 { 1.0 } else { tp as f64 / n_gold as f64 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(PrecisionRecall {
        precision,
        recall,
        f1,
    })
}

/// Span F1 for label-id sequences grouped by sentence, decoding each id
/// through `vocab`.
pub fn span_f1_from_ids(
    pred: &[usize],
    gold: &[usize],
    sentence_lengths: &[usize],
    vocab: &[String],
) -> Result<PrecisionRecall> {
    if pred.len() != gold.len() || sentence_lengths.iter().sum::<usize>() != gold.len() {
        return Err(Error::Argument("prediction and sentence lengths disagree".into()));
    }
    let mut p_sets = Vec::with_capacity(sentence_lengths.len());
    let mut g_sets = Vec::with_capacity(sentence_lengths.len());
    let mut start = 0;
    for &len in sentence_lengths {
        let names = |ids: &[usize]| -> Vec<&str> { ids.iter().map(|&i| vocab[i].as_str()).collect() };
        p_sets.push(bio_decode(&names(&pred[start..start + len]))?);
        g_sets.push(bio_decode(&names(&gold[start..start + len]))?);
        start += len;
    }
    span_f1(&p_sets, &g_sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 2], &[3, 4]).unwrap(), 0.0);
        assert_eq!(accuracy(&[1, 2, 3, 4], &[1, 2, 3, 0]).unwrap(), 0.75);
        assert!(accuracy(&[1], &[1, 2]).is_err());
        assert!(accuracy::<u8>(&[], &[]).is_err());
    }

    #[test]
    fn decode_simple_span() {
        let s = bio_decode(&["B-PER", "I-PER", "O"]).unwrap();
        assert_eq!(s, [(0, 1, "PER")].into_iter().collect());
    }

    #[test]
    fn decode_lenient_inside() {
        let s = bio_decode(&["O", "I-LOC"]).unwrap();
        assert_eq!(s, [(1, 1, "LOC")].into_iter().collect());
    }

    #[test]
    fn decode_adjacent_begins() {
        let s = bio_decode(&["B-PER", "B-PER"]).unwrap();
        assert_eq!(s, [(0, 0, "PER"), (1, 1, "PER")].into_iter().collect());
    }

    #[test]
    fn decode_type_switch_inside() {
        let s = bio_decode(&["B-PER", "I-LOC", "I-LOC"]).unwrap();
        assert_eq!(s, [(0, 0, "PER"), (1, 2, "LOC")].into_iter().collect());
    }

    #[test]
    fn decode_rejects_malformed() {
        for bad in ["X-PER", "B-", "B", "PER", ""] {
            assert!(bio_decode(&[bad]).is_err(), "{bad}");
        }
    }

    #[test]
    fn f1_perfect() {
        let g: SpanSet = [(0, 1, "PER")].into_iter().collect();
        let r = span_f1(&[g.clone()], &[g]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn f1_one_spurious() {
        // TP = 1, FP = 1, FN = 0.
        let g: SpanSet = [(0, 1, "PER")].into_iter().collect();
        let p: SpanSet = [(0, 1, "PER"), (3, 3, "LOC")].into_iter().collect();
        let r = span_f1(&[p], &[g]).unwrap();
        assert_abs_diff_eq!(r.precision, 0.5);
        assert_abs_diff_eq!(r.recall, 1.0);
        assert_abs_diff_eq!(r.f1, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn f1_empty_prediction() {
        let g: SpanSet = [(0, 1, "PER")].into_iter().collect();
        let r = span_f1(&[SpanSet::default()], &[g]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 0.0, 0.0));
    }

    #[test]
    fn f1_empty_vs_empty() {
        let r = span_f1(&[SpanSet::default()], &[SpanSet::default()]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn f1_from_label_ids() {
        let vocab: Vec<String> = ["O", "B-PER", "I-PER"].iter().map(|s| s.to_string()).collect();
        let gold = [1, 2, 0, 1];
        let pred = [1, 2, 0, 0];
        let r = span_f1_from_ids(&pred, &gold, &[3, 1], &vocab).unwrap();
        assert_abs_diff_eq!(r.recall, 0.5);
        assert_abs_diff_eq!(r.precision, 1.0);
    }

    fn tags() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(
            prop::sample::select(vec!["O", "B-PER", "I-PER", "B-LOC", "I-LOC"]),
            0..12,
        )
        .prop_map(|v| v.into_iter().map(str::to_owned).collect())
    }

    proptest! {
        #[test]
        fn metric_bounds_and_harmonic_mean(
            pairs in prop::collection::vec((tags(), tags()), 1..6)
        ) {
            let pred: Vec<SpanSet> = pairs.iter().map(|(p, _)| bio_decode(p).unwrap()).collect();
            let gold: Vec<SpanSet> = pairs.iter().map(|(_, g)| bio_decode(g).unwrap()).collect();
            let r = span_f1(&pred, &gold).unwrap();
            for v in [r.precision, r.recall, r.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if r.precision + r.recall > 0.0 {
                let hm = 2.0 * r.precision * r.recall / (r.precision + r.recall);
                prop_assert!((r.f1 - hm).abs() < 1e-12);
            }
            let mut rp = pred.clone();
            let mut rg = gold.clone();
            rp.reverse();
            rg.reverse();
            prop_assert_eq!(span_f1(&rp, &rg).unwrap(), r);
        }

        #[test]
        fn self_accuracy_is_one(x in prop::collection::vec(0u8..5, 1..30)) {
            prop_assert_eq!(accuracy(&x, &x).unwrap(), 1.0);
        }

        #[test]
        fn spans_are_in_bounds(t in tags()) {
            let s = bio_decode(&t).unwrap();
            for span in &s.spans {
                prop_assert!(span.start <= span.end && span.end < t.len());
            }
        }
    }
}
