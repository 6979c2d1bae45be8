//! Probing report outputs.
//!
//! The structured form is JSON lines: a header record carrying the task,
//! seed and settings, then one record per layer. The CSV form has one row
//! per layer.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{ExperimentSettings, LayerRecord, ProbingReport};

pub const CSV_HEADER: &str = "layer,h_given_b,h_given_b_phi,h_given_phi,h_marginal,baselined_bits,conditional_bits,v_info_bits,task_metric";

#[derive(Serialize, Deserialize)]
struct Header {
    task: String,
    seed: u64,
    settings: ExperimentSettings,
    layers: usize,
}

pub fn report_to_jsonl(report: &ProbingReport) -> String {
    let header = Header {
        task: report.task.clone(),
        seed: report.seed,
        settings: report.settings.clone(),
        layers: report.records.len(),
    };
    let mut out = serde_json::to_string(&header).expect("report header serializes");
    out.push('\n');
    for r in &report.records {
        out.push_str(&serde_json::to_string(r).expect("layer record serializes"));
        out.push('\n');
    }
    out
}

pub fn report_from_jsonl(text: &str, source: &str) -> Result<ProbingReport> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_owned(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Data(format!("{source}: empty report")))?;
    let header: Header = serde_json::from_str(first).map_err(|e| parse_err(1, e.to_string()))?;
    let records = lines
        .map(|(i, l)| serde_json::from_str::<LayerRecord>(l).map_err(|e| parse_err(i + 1, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if records.len() != header.layers {
        return Err(Error::Data(format!(
            "{source}: header announces {} layers, found {}",
            header.layers,
            records.len()
        )));
    }
    Ok(ProbingReport {
        task: header.task,
        seed: header.seed,
        settings: header.settings,
        records,
    })
}

pub fn report_to_csv(report: &ProbingReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.layer,
            r.h_given_b,
            r.h_given_b_and_layer,
            r.h_given_layer,
            r.h_marginal,
            r.baselined_bits,
            r.conditional_bits,
            r.v_info_bits,
            r.task_metric
        );
    }
    out
}

pub fn write_report_jsonl(path: impl AsRef<Path>, report: &ProbingReport) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, report_to_jsonl(report)).map_err(|e| Error::io(path, e))
}

pub fn write_report_csv(path: impl AsRef<Path>, report: &ProbingReport) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, report_to_csv(report)).map_err(|e| Error::io(path, e))
}

/// Writes `<dir>/<task>.report.jsonl` and `<dir>/<task>.report.csv`.
pub fn write_report(dir: impl AsRef<Path>, report: &ProbingReport) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let jsonl = dir.join(format!("{}.report.jsonl", report.task));
    let csv = dir.join(format!("{}.report.csv", report.task));
    write_report_jsonl(&jsonl, report)?;
    write_report_csv(&csv, report)?;
    Ok((jsonl, csv))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ProbingReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    report_from_jsonl(&text, &path.display().to_string())
}

/// Plain-text table with Baselined and Conditional columns.
pub fn format_table(report: &ProbingReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Results on {}, reported in bits of V-information (eval split: {})",
        report.task, report.settings.eval_split
    );
    let _ = writeln!(
        out,
        "{:>6} {:>9} {:>9} {:>9} {:>9} {:>10} {:>11} {:>8}",
        "layer", "H|B", "H|B,phi", "H|phi", "H", "Baselined", "Conditional", "metric"
    );
    for r in &report.records {
        let _ = writeln!(
            out,
            "{:>6} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>10.3} {:>11.3} {:>8.3}",
            r.layer,
            r.h_given_b,
            r.h_given_b_and_layer,
            r.h_given_layer,
            r.h_marginal,
            r.baselined_bits,
            r.conditional_bits,
            r.task_metric
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::TrainConfig;

    fn report() -> ProbingReport {
        ProbingReport {
            task: "upos".into(),
            seed: 4,
            settings: ExperimentSettings::new("upos", TrainConfig::with_seed(4)),
            records: vec![
                LayerRecord::from_entropies(1, 0.335, 0.141, 0.145, 2.7, 0.969),
                LayerRecord::from_entropies(2, 0.335, 0.115, 0.119, 2.7, 0.975),
            ],
        }
    }

    #[test]
    fn csv_shape() {
        let csv = report_to_csv(&report());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        let header: Vec<&str> = lines[0].split(',').collect();
        for col in ["layer", "h_given_b", "h_given_b_phi", "baselined_bits", "conditional_bits", "task_metric"] {
            assert!(header.contains(&col), "{col}");
        }
        assert!(lines[1].starts_with("1,0.335,0.141,"));
    }

    #[test]
    fn jsonl_round_trip() {
        let r = report();
        let text = report_to_jsonl(&r);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(report_from_jsonl(&text, "t").unwrap(), r);
    }

    #[test]
    fn jsonl_errors_carry_line() {
        let mut text = report_to_jsonl(&report());
        text.push_str("{not json}\n");
        match report_from_jsonl(&text, "r.jsonl").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn table_lists_every_layer() {
        let t = format_table(&report());
        assert!(t.contains("Baselined") && t.contains("Conditional"));
        assert_eq!(t.lines().count(), 4);
    }
}
