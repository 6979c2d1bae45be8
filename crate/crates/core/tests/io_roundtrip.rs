use std::fs;

use vinfo_core::corpus_io::{read_bundle, read_config, read_labels, read_report, write_bundle};
use vinfo_core::oracle::synth_generate;
use vinfo_core::pipeline::{run_config, write_synthetic};
use vinfo_core::trainer::ProbeDataset;
use vinfo_core::{
    Error, Granularity, KnownSetSpec, LabeledDataset, RepresentationBundle, Scenario, ScenarioSpec,
    Sentence, Split, SplitPart,
};

#[test]
fn synthetic_fixture_round_trips_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth_generate(&ScenarioSpec::new(Scenario::Independence, 4).with_sizes(128, 64, 32)).unwrap();
    let conf = write_synthetic(&corpus, tmp.path(), "indep", 4).unwrap();

    let bundle = read_bundle(tmp.path().join("repr.vrep")).unwrap();
    assert_eq!(bundle, corpus.bundle);
    let labels = read_labels(tmp.path().join("labels.tsv"), Granularity::Word).unwrap();
    assert_eq!(labels.sentences.len(), corpus.dataset.sentences.len());

    let cfg = read_config(&conf).unwrap();
    let (loaded, loaded_bundle) = cfg.load().unwrap();
    assert_eq!(loaded.split, corpus.dataset.split);
    assert_eq!(loaded_bundle, corpus.bundle);

    let out = run_config(&cfg).unwrap();
    let back = read_report(&out.jsonl_path).unwrap();
    assert_eq!(back, out.report);
    assert!(fs::read_to_string(&out.csv_path).unwrap().starts_with("layer,"));
    assert!(out.report.records.iter().all(|r| r.is_consistent()));
}

#[test]
fn mismatched_word_counts_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth_generate(&ScenarioSpec::new(Scenario::Tabular, 1).with_sizes(16, 8, 0)).unwrap();
    let conf = write_synthetic(&corpus, tmp.path(), "tab", 1).unwrap();
    let mut short = RepresentationBundle::new(1, corpus.bundle.dim()).unwrap();
    for s in 0..corpus.bundle.n_sentences() {
        let n = corpus.bundle.sentences()[s].n_words() - usize::from(s == 1);
        let layer: Vec<Vec<f32>> = (0..n).map(|w| corpus.bundle.word_vector(s, 0, w).to_vec()).collect();
        short.push_sentence(&[layer]).unwrap();
    }
    write_bundle(tmp.path().join("repr.vrep"), &short).unwrap();
    let err = read_config(&conf).unwrap().load().unwrap_err();
    assert!(matches!(err, Error::Data(_)), "{err}");
    assert!(err.to_string().contains("sentence 1"), "{err}");
}

#[test]
fn sentence_tasks_average_word_vectors() {
    let mut bundle = RepresentationBundle::new(1, 2).unwrap();
    bundle.push_sentence(&[vec![vec![1.0, 0.0], vec![3.0, 2.0]]]).unwrap();
    bundle.push_sentence(&[vec![vec![5.0, 5.0]]]).unwrap();
    bundle.push_sentence(&[vec![vec![0.0, 1.0], vec![0.0, 3.0], vec![0.0, 5.0]]]).unwrap();
    let sentence = |n: usize, label| Sentence {
        tokens: (0..n).map(|i| format!("t{i}")).collect(),
        labels: vec![label],
    };
    let labels = LabeledDataset {
        granularity: Granularity::Sentence,
        sentences: vec![sentence(2, 0), sentence(1, 1), sentence(3, 0)],
        label_vocab: vec!["neg".into(), "pos".into()],
        split: Some(Split { train: vec![0, 1], dev: vec![2], test: vec![] }),
    };
    let layers = [0];
    let data = ProbeDataset::new(&labels, &bundle, &layers).unwrap();
    let known = KnownSetSpec::new(&data.slot_dims(), &[0]).unwrap();
    let train = data.examples(SplitPart::Train, &known).unwrap();
    assert_eq!(train.len(), 2);
    assert_eq!(train.get(0), (&[2.0, 1.0][..], 0));
    assert_eq!(train.get(1), (&[5.0, 5.0][..], 1));
    let dev = data.examples(SplitPart::Dev, &known).unwrap();
    assert_eq!(dev.get(0), (&[0.0, 3.0][..], 0));
}
