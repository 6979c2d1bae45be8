//! Per-layer curve data (baselined and conditional bits) in long format.
//!
//! Curves come either from probing reports, whose stored values pass
//! through unchanged, or from V-entropy tables typed into CSV. Table values
//! are handled as fixed-point decimals so a difference such as
//! `0.335 - 0.141` prints as `0.194`, exact to the printed precision.
//!
//! Table CSV layout: a `layer` column followed by one column per task.
//! Single-layer tables key rows by layer (`0`, `1`, ...); two-layer tables
//! by `baseline-layer` (`0-0`, `0-1`, ...).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::ProbingReport;

/// A signed fixed-point decimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decimal {
    units: i64,
    scale: u32,
}

impl Decimal {
    fn rescale(self, scale: u32) -> i64 {
        self.units * 10i64.pow(scale - self.scale)
    }

    pub fn to_f64(self) -> f64 {
        self.units as f64 / 10f64.powi(self.scale as i32)
    }
}

impl std::ops::Sub for Decimal {
    type Output = Decimal;

    fn sub(self, rhs: Decimal) -> Decimal {
        let scale = self.scale.max(rhs.scale);
        Decimal {
            units: self.rescale(scale) - rhs.rescale(scale),
            scale,
        }
    }
}

impl FromStr for Decimal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Data(format!("`{s}` is not a decimal number"));
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.len() > 12
        {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let units: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        Ok(Decimal {
            units: if neg { -units } else { units },
            scale: frac.len() as u32,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.units < 0 { "-" } else { "" };
        let abs = self.units.unsigned_abs();
        if self.scale == 0 {
            return write!(f, "{sign}{abs}");
        }
        let p = 10u64.pow(self.scale);
        write!(f, "{sign}{}.{:0width$}", abs / p, abs % p, width = self.scale as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Series {
    Baselined,
    Conditional,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::Baselined => "baselined",
            Series::Conditional => "conditional",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveValue {
    Exact(Decimal),
    Float(f64),
}

impl CurveValue {
    pub fn to_f64(&self) -> f64 {
        match *self {
            CurveValue::Exact(d) => d.to_f64(),
            CurveValue::Float(v) => v,
        }
    }
}

impl fmt::Display for CurveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveValue::Exact(d) => d.fmt(f),
            CurveValue::Float(v) => v.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub source: String,
    pub layer: usize,
    pub series: Series,
    pub value: CurveValue,
}

/// A V-entropy table: row keys and one decimal per (row, column).
#[derive(Debug, Clone, PartialEq)]
pub struct VEntropyTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Decimal>)>,
}

impl VEntropyTable {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Data(format!("{source}: empty table")))?;
        let header: Vec<String> = header.split(',').map(|s| s.trim().to_owned()).collect();
        if header.first().map(String::as_str) != Some("layer") || header.len() < 2 {
            return Err(Error::Parse {
                path: source.to_owned(),
                line: 1,
                message: "header must be `layer,<column>,...`".into(),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != header.len() {
                return Err(Error::Parse {
                    path: source.to_owned(),
                    line: i + 1,
                    message: format!("expected {} fields, found {}", header.len(), fields.len()),
                });
            }
            let values = fields[1..]
                .iter()
                .map(|v| {
                    v.parse::<Decimal>().map_err(|e| Error::Parse {
                        path: source.to_owned(),
                        line: i + 1,
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((fields[0].to_owned(), values));
        }
        Ok(Self {
            columns: header[1..].to_vec(),
            rows,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| {
            Error::Data(format!(
                "no column `{name}`; available: {}",
                self.columns.join(", ")
            ))
        })
    }
}

fn parse_layer(key: &str) -> Result<usize> {
    key.parse()
        .map_err(|_| Error::Data(format!("`{key}` is not a layer index")))
}

/// Baselined and conditional curves for one column of a single-layer and a
/// two-layer V-entropy table.
pub fn curves_from_tables(
    single: &VEntropyTable,
    two: &VEntropyTable,
    column: &str,
    source: &str,
) -> Result<Vec<CurvePoint>> {
    let sc = single.column(column)?;
    let tc = two.column(column)?;
    let single_rows: Vec<(usize, Decimal)> = single
        .rows
        .iter()
        .map(|(k, v)| Ok((parse_layer(k)?, v[sc])))
        .collect::<Result<_>>()?;
    let mut baseline = None;
    let mut two_rows = Vec::new();
    for (k, v) in &two.rows {
        let (b, l) = k
            .split_once('-')
            .ok_or_else(|| Error::Data(format!("two-layer row `{k}` is not `baseline-layer`")))?;
        let b = parse_layer(b)?;
        if *baseline.get_or_insert(b) != b {
            return Err(Error::Data("two-layer table mixes baselines".into()));
        }
        two_rows.push((parse_layer(l)?, v[tc]));
    }
    let baseline = baseline.ok_or_else(|| Error::Data("two-layer table is empty".into()))?;
    let single_layers: BTreeSet<usize> = single_rows.iter().map(|r| r.0).collect();
    let two_layers: BTreeSet<usize> = two_rows.iter().map(|r| r.0).collect();
    if single_layers != two_layers {
        return Err(Error::Data(
            "single-layer and two-layer tables cover different layers".into(),
        ));
    }
    let lookup = |rows: &[(usize, Decimal)], l: usize| rows.iter().find(|r| r.0 == l).map(|r| r.1);
    let h_b = lookup(&single_rows, baseline)
        .ok_or_else(|| Error::Data(format!("single-layer table lacks baseline layer {baseline}")))?;
    let h_bb = lookup(&two_rows, baseline)
        .ok_or_else(|| Error::Data(format!("two-layer table lacks row {baseline}-{baseline}")))?;

    let mut out = Vec::new();
    for &(layer, h_phi) in &single_rows {
        out.push(CurvePoint {
            source: source.to_owned(),
            layer,
            series: Series::Baselined,
            value: CurveValue::Exact(h_b - h_phi),
        });
    }
    for &(layer, h_b_phi) in &two_rows {
        out.push(CurvePoint {
            source: source.to_owned(),
            layer,
            series: Series::Conditional,
            value: CurveValue::Exact(h_bb - h_b_phi),
        });
    }
    Ok(out)
}

/// Curves from a report; values are the stored fields, unchanged.
pub fn curves_from_report(report: &ProbingReport, source: &str) -> Vec<CurvePoint> {
    let mut out = Vec::new();
    for series in [Series::Baselined, Series::Conditional] {
        for r in &report.records {
            out.push(CurvePoint {
                source: source.to_owned(),
                layer: r.layer,
                series,
                value: CurveValue::Float(match series {
                    Series::Baselined => r.baselined_bits,
                    Series::Conditional => r.conditional_bits,
                }),
            });
        }
    }
    out
}

/// Concatenates per-source curves after checking that every source covers
/// the same layers.
pub fn merge_curves(sources: Vec<Vec<CurvePoint>>) -> Result<Vec<CurvePoint>> {
    let mut expected: Option<BTreeSet<usize>> = None;
    for points in &sources {
        let layers: BTreeSet<usize> = points.iter().map(|p| p.layer).collect();
        let name = points.first().map_or("", |p| p.source.as_str());
        match &expected {
            None => expected = Some(layers),
            Some(e) if *e != layers => {
                return Err(Error::Data(format!(
                    "inconsistent layer sets: `{name}` has {layers:?}, expected {e:?}"
                )))
            }
            Some(_) => {}
        }
    }
    let mut all: Vec<CurvePoint> = sources.into_iter().flatten().collect();
    all.sort_by(|a, b| match a.source.cmp(&b.source) {
        Ordering::Equal => (a.series, a.layer).cmp(&(b.series, b.layer)),
        o => o,
    });
    Ok(all)
}

pub fn curves_to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("source,layer,series,bits\n");
    for p in points {
        out.push_str(&format!("{},{},{},{}\n", p.source, p.layer, p.series, p.value));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_arithmetic_is_exact() {
        let a: Decimal = "0.335".parse().unwrap();
        let b: Decimal = "0.141".parse().unwrap();
        assert_eq!((a - b).to_string(), "0.194");
        let c: Decimal = "0.1".parse().unwrap();
        assert_eq!((b - c).to_string(), "0.041");
        assert_eq!((c - a).to_string(), "-0.235");
        assert_eq!(("1.468".parse::<Decimal>().unwrap() - "1.468".parse().unwrap()).to_string(), "0.000");
        assert!("abc".parse::<Decimal>().is_err());
        assert!("1.2.3".parse::<Decimal>().is_err());
        assert_eq!("-0.5".parse::<Decimal>().unwrap().to_f64(), -0.5);
    }

    #[test]
    fn merge_rejects_inconsistent_layers() {
        let p = |src: &str, layer| CurvePoint {
            source: src.into(),
            layer,
            series: Series::Baselined,
            value: CurveValue::Float(0.0),
        };
        assert!(merge_curves(vec![vec![p("a", 1), p("a", 2)], vec![p("b", 1)]]).is_err());
        let merged = merge_curves(vec![vec![p("b", 1)], vec![p("a", 1)]]).unwrap();
        assert_eq!(merged[0].source, "a");
    }

    #[test]
    fn table_parse_errors_cite_lines() {
        let err = VEntropyTable::parse("layer,upos\n0,0.3\n1,x\n", "t.csv").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(VEntropyTable::parse("upos\n0.3\n", "t.csv").is_err());
    }
}
