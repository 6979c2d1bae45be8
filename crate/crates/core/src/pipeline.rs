//! Config-driven runs and synthetic fixture export.

use std::fs;
use std::path::{Path, PathBuf};

use crate::corpus_io::config::{ExperimentConfig, SplitSource};
use crate::corpus_io::report::format_table;
use crate::corpus_io::split::write_index_file;
use crate::corpus_io::{write_bundle, write_labels, write_report, SplitPart};
use crate::error::{Error, Result};
use crate::estimator::{run_experiment, ExperimentSettings, ProbingReport};
use crate::oracle::SyntheticCorpus;
use crate::trainer::TrainConfig;

#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub report: ProbingReport,
    pub jsonl_path: PathBuf,
    pub csv_path: PathBuf,
    pub table: String,
}

/// Loads the config's inputs, runs every layer and writes both report files
/// into `config.output_dir`.
pub fn run_config(config: &ExperimentConfig) -> Result<RunOutputs> {
    let (labels, bundle) = config.load()?;
    let report = run_experiment(&labels, &bundle, &config.layers, &config.settings)?;
    let (jsonl_path, csv_path) = write_report(&config.output_dir, &report)?;
    let table = format_table(&report);
    Ok(RunOutputs {
        report,
        jsonl_path,
        csv_path,
        table,
    })
}

/// Writes a synthetic corpus as `repr.vrep`, `labels.tsv`, split index files
/// and a ready-to-run `experiment.conf` (relative paths) into `dir`.
pub fn write_synthetic(corpus: &SyntheticCorpus, dir: &Path, task: &str, seed: u64) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_bundle(dir.join("repr.vrep"), &corpus.bundle)?;
    write_labels(dir.join("labels.tsv"), &corpus.dataset)?;
    let split = corpus.dataset.split()?;
    for part in [SplitPart::Train, SplitPart::Dev, SplitPart::Test] {
        write_index_file(dir.join(format!("{part}.idx")), split.part(part))?;
    }
    let n_layers = corpus.bundle.n_layers();
    let layers: Vec<usize> = if n_layers == 1 { vec![0] } else { (1..n_layers).collect() };
    let config = ExperimentConfig {
        repr_path: "repr.vrep".into(),
        labels_path: "labels.tsv".into(),
        granularity: corpus.dataset.granularity,
        layers,
        split: SplitSource::Files {
            train: "train.idx".into(),
            dev: "dev.idx".into(),
            test: Some("test.idx".into()),
        },
        split_seed: 0,
        settings: ExperimentSettings::new(task, TrainConfig::with_seed(seed)),
        output_dir: "out".into(),
    };
    let path = dir.join("experiment.conf");
    fs::write(&path, config.to_text()).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
