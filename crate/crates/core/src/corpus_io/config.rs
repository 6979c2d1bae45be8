//! Flat `key = value` experiment configs.
//!
//! Blank lines and lines starting with `#` are ignored. Relative paths are
//! resolved against the config file's directory. Keys:
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `repr` | required | `.vrep` representation file |
//! | `labels` | required | label file |
//! | `layers` | required | comma-separated layers to probe |
//! | `task` | `task` | name used in reports |
//! | `granularity` | `word` | `word` or `sentence` |
//! | `baseline_layer` | `0` | layer used as the baseline B |
//! | `architecture` | `affine_softmax` | or `one_hidden_layer` |
//! | `hidden_dim` | `0` | width for `one_hidden_layer` |
//! | `placeholder` | `0` | constant filling unknown slots |
//! | `metric` | `accuracy` | or `span_f1` (BIO labels) |
//! | `lr0`, `lr_decay`, `batch_size`, `max_epochs`, `min_lr`, `adam_beta1`, `adam_beta2`, `adam_eps` | see [`TrainConfig`] | optimizer |
//! | `seed` | `0` | training seed |
//! | `eval_split` | `dev` | split whose V-entropies are reported |
//! | `split` | `0.8,0.1,0.1` | train/dev/test sentence ratios |
//! | `split_seed` | `0` | shuffle seed for ratio splits |
//! | `split_train`, `split_dev`, `split_test` | none | explicit index files (replace `split`) |
//! | `output_dir` | `out` | where reports are written |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::split::{attach_split, read_index_file, SplitSpec};
use super::{read_bundle, read_labels, Granularity, LabeledDataset, RepresentationBundle, SplitPart};
use crate::error::{Error, Result};
use crate::estimator::ExperimentSettings;
use crate::metrics::TaskMetric;
use crate::probes::Architecture;
use crate::trainer::TrainConfig;

pub const VALID_KEYS: &[&str] = &[
    "repr",
    "labels",
    "layers",
    "task",
    "granularity",
    "baseline_layer",
    "architecture",
    "hidden_dim",
    "placeholder",
    "metric",
    "lr0",
    "lr_decay",
    "batch_size",
    "max_epochs",
    "min_lr",
    "adam_beta1",
    "adam_beta2",
    "adam_eps",
    "seed",
    "eval_split",
    "split",
    "split_seed",
    "split_train",
    "split_dev",
    "split_test",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub enum SplitSource {
    Ratios(f64, f64, f64),
    Files {
        train: PathBuf,
        dev: PathBuf,
        test: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub repr_path: PathBuf,
    pub labels_path: PathBuf,
    pub granularity: Granularity,
    pub layers: Vec<usize>,
    pub split: SplitSource,
    pub split_seed: u64,
    pub settings: ExperimentSettings,
    pub output_dir: PathBuf,
}

pub fn read_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

/// Parses config text; relative paths are joined onto `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", idx + 1))
        })?;
        let key = key.trim();
        if !VALID_KEYS.contains(&key) {
            return Err(Error::Config(format!(
                "line {}: unknown key `{key}`; valid keys: {}",
                idx + 1,
                VALID_KEYS.join(", ")
            )));
        }
        if entries.insert(key, (idx + 1, value.trim())).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", idx + 1)));
        }
    }
    let get = |k: &str| entries.get(k).map(|&(_, v)| v);
    let require = |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing required key `{k}`")));
    let path = |v: &str| {
        let p = PathBuf::from(v);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };

    let mut train = TrainConfig::default();
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = get(stringify!($field)) {
                train.$field = parse_num(stringify!($field), v)?;
            }
        };
    }
    set!(lr0);
    set!(lr_decay);
    set!(batch_size);
    set!(max_epochs);
    set!(min_lr);
    set!(adam_beta1);
    set!(adam_beta2);
    set!(adam_eps);
    set!(seed);
    train.validate()?;

    let layers = require("layers")?
        .split(',')
        .map(|s| parse_num::<usize>("layers", s.trim()))
        .collect::<Result<Vec<_>>>()?;
    if layers.is_empty() {
        return Err(Error::Config("`layers` is empty".into()));
    }

    let mut settings = ExperimentSettings::new(get("task").unwrap_or("task"), train);
    if let Some(v) = get("architecture") {
        settings.architecture = match v {
            "affine_softmax" => Architecture::AffineSoftmax,
            "one_hidden_layer" => Architecture::OneHiddenLayer,
            other => {
                return Err(Error::Config(format!(
                    "`architecture` must be affine_softmax or one_hidden_layer, got `{other}`"
                )))
            }
        };
    }
    if let Some(v) = get("hidden_dim") {
        settings.hidden_dim = parse_num("hidden_dim", v)?;
    }
    if settings.architecture == Architecture::OneHiddenLayer && settings.hidden_dim == 0 {
        return Err(Error::Config("`one_hidden_layer` needs `hidden_dim` >= 1".into()));
    }
    if let Some(v) = get("placeholder") {
        settings.placeholder = parse_num("placeholder", v)?;
        if !settings.placeholder.is_finite() {
            return Err(Error::Config("`placeholder` must be finite".into()));
        }
    }
    if let Some(v) = get("metric") {
        settings.metric = v.parse::<TaskMetric>()?;
    }
    if let Some(v) = get("eval_split") {
        settings.eval_split = v.parse::<SplitPart>()?;
        if settings.eval_split == SplitPart::Train {
            return Err(Error::Config("`eval_split` must be dev or test".into()));
        }
    }
    if let Some(v) = get("baseline_layer") {
        settings.baseline_layer = parse_num("baseline_layer", v)?;
    }

    let files = ["split_train", "split_dev", "split_test"].map(get);
    let split = match (get("split"), files) {
        (Some(_), [Some(_), ..] | [_, Some(_), _] | [.., Some(_)]) => {
            return Err(Error::Config(
                "`split` cannot be combined with split_train/split_dev/split_test".into(),
            ))
        }
        (None, [Some(tr), Some(dv), te]) => SplitSource::Files {
            train: path(tr),
            dev: path(dv),
            test: te.map(path),
        },
        (None, [Some(_), None, _] | [None, Some(_), _] | [None, None, Some(_)]) => {
            return Err(Error::Config("explicit splits need both split_train and split_dev".into()))
        }
        (ratios, _) => {
            let parts = ratios
                .unwrap_or("0.8,0.1,0.1")
                .split(',')
                .map(|s| parse_num::<f64>("split", s.trim()))
                .collect::<Result<Vec<_>>>()?;
            let [a, b, c] = parts[..] else {
                return Err(Error::Config("`split` needs three comma-separated ratios".into()));
            };
            SplitSource::Ratios(a, b, c)
        }
    };

    Ok(ExperimentConfig {
        repr_path: path(require("repr")?),
        labels_path: path(require("labels")?),
        granularity: get("granularity").unwrap_or("word").parse()?,
        layers,
        split,
        split_seed: get("split_seed").map_or(Ok(0), |v| parse_num("split_seed", v))?,
        settings,
        output_dir: path(get("output_dir").unwrap_or("out")),
    })
}

impl ExperimentConfig {
    /// Renders the config as text that [`parse_config`] reads back (paths
    /// are written as stored).
    pub fn to_text(&self) -> String {
        let s = &self.settings;
        let t = &s.train;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("repr", self.repr_path.display().to_string());
        kv("labels", self.labels_path.display().to_string());
        kv("task", s.task.clone());
        kv(
            "granularity",
            match self.granularity {
                Granularity::Word => "word",
                Granularity::Sentence => "sentence",
            }
            .into(),
        );
        kv(
            "layers",
            self.layers.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","),
        );
        kv("baseline_layer", s.baseline_layer.to_string());
        kv(
            "architecture",
            match s.architecture {
                Architecture::AffineSoftmax => "affine_softmax",
                Architecture::OneHiddenLayer => "one_hidden_layer",
            }
            .into(),
        );
        if s.architecture == Architecture::OneHiddenLayer {
            kv("hidden_dim", s.hidden_dim.to_string());
        }
        kv("placeholder", s.placeholder.to_string());
        kv(
            "metric",
            match s.metric {
                TaskMetric::Accuracy => "accuracy",
                TaskMetric::SpanF1 => "span_f1",
            }
            .into(),
        );
        kv("lr0", t.lr0.to_string());
        kv("lr_decay", t.lr_decay.to_string());
        kv("batch_size", t.batch_size.to_string());
        kv("max_epochs", t.max_epochs.to_string());
        kv("min_lr", t.min_lr.to_string());
        kv("adam_beta1", t.adam_beta1.to_string());
        kv("adam_beta2", t.adam_beta2.to_string());
        kv("adam_eps", t.adam_eps.to_string());
        kv("seed", t.seed.to_string());
        kv("eval_split", s.eval_split.to_string());
        match &self.split {
            SplitSource::Ratios(a, b, c) => kv("split", format!("{a},{b},{c}")),
            SplitSource::Files { train, dev, test } => {
                kv("split_train", train.display().to_string());
                kv("split_dev", dev.display().to_string());
                if let Some(te) = test {
                    kv("split_test", te.display().to_string());
                }
            }
        }
        kv("split_seed", self.split_seed.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        out
    }

    /// Reads the representation and label files, attaches the split and
    /// checks that they agree before any training starts.
    pub fn load(&self) -> Result<(LabeledDataset, RepresentationBundle)> {
        let bundle = read_bundle(&self.repr_path)?;
        let labels = read_labels(&self.labels_path, self.granularity)?;
        labels.check_against(&bundle)?;
        let spec = match &self.split {
            SplitSource::Ratios(a, b, c) => SplitSpec::Ratios(*a, *b, *c),
            SplitSource::Files { train, dev, test } => SplitSpec::Explicit {
                train: read_index_file(train)?,
                dev: read_index_file(dev)?,
                test: test.as_ref().map(read_index_file).transpose()?.unwrap_or_default(),
            },
        };
        let labels = attach_split(labels, &spec, self.split_seed)?;
        if let Some(&l) = self
            .layers
            .iter()
            .chain([&self.settings.baseline_layer])
            .find(|&&l| l >= bundle.n_layers())
        {
            return Err(Error::Data(format!(
                "layer {l} requested, {} has {} layers",
                self.repr_path.display(),
                bundle.n_layers()
            )));
        }
        Ok((labels, bundle))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "repr = r.vrep\nlabels = l.tsv\nlayers = 1,2\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse_config(MINIMAL, Path::new("/data")).unwrap();
        let t = &c.settings.train;
        assert_eq!(t.lr0, 0.001);
        assert_eq!(t.lr_decay, 0.5);
        assert_eq!(t.batch_size, 16);
        assert_eq!(t.max_epochs, 40);
        assert_eq!(t.min_lr, 1e-6);
        assert_eq!((t.adam_beta1, t.adam_beta2, t.adam_eps), (0.9, 0.999, 1e-8));
        assert_eq!(c.settings.eval_split, SplitPart::Dev);
        assert_eq!(c.settings.placeholder, 0.0);
        assert_eq!(c.layers, vec![1, 2]);
        assert_eq!(c.repr_path, PathBuf::from("/data/r.vrep"));
        assert_eq!(c.split, SplitSource::Ratios(0.8, 0.1, 0.1));
    }

    #[test]
    fn unknown_key_lists_valid_keys() {
        let err = parse_config(&format!("{MINIMAL}learning_rate = 3\n"), Path::new(".")).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("learning_rate") && msg.contains("lr0") && msg.contains("split_seed"));
    }

    #[test]
    fn config_errors() {
        assert!(parse_config("repr = a\nlabels = b\n", Path::new(".")).is_err());
        assert!(parse_config(&format!("{MINIMAL}seed = x\n"), Path::new(".")).is_err());
        assert!(parse_config(&format!("{MINIMAL}seed = 1\nseed = 2\n"), Path::new(".")).is_err());
        assert!(parse_config(&format!("{MINIMAL}lr_decay = 1.5\n"), Path::new(".")).is_err());
        assert!(parse_config(&format!("{MINIMAL}eval_split = train\n"), Path::new(".")).is_err());
        assert!(parse_config(&format!("{MINIMAL}split = 0.5,0.5\n"), Path::new(".")).is_err());
        assert!(parse_config(&format!("{MINIMAL}split_train = a\n"), Path::new(".")).is_err());
        assert!(parse_config(&format!("{MINIMAL}architecture = one_hidden_layer\n"), Path::new("."))
            .is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = format!(
            "{MINIMAL}task = ner\nmetric = span_f1\narchitecture = one_hidden_layer\nhidden_dim = 16\n\
             split_train = tr.idx\nsplit_dev = dv.idx\nseed = 9\neval_split = test\nplaceholder = 1\n"
        );
        let c = parse_config(&text, Path::new("/x")).unwrap();
        let again = parse_config(&c.to_text(), Path::new("/elsewhere")).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.settings.metric, TaskMetric::SpanF1);
        assert_eq!(again.settings.train.seed, 9);
    }
}
