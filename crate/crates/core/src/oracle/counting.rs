use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest number of distinct values per variable.
pub const MAX_CARDINALITY: u32 = 64;

/// Counts over `(x_1, ..., x_k, y)` tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiscreteJoint {
    n_vars: usize,
    counts: BTreeMap<(Vec<u32>, u32), u64>,
}

impl DiscreteJoint {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            counts: BTreeMap::new(),
        }
    }

    /// One observation per row: `columns[v][i]` is variable `v` at row `i`.
    pub fn from_columns(columns: &[&[u32]], target: &[u32]) -> Result<Self> {
        let mut joint = Self::new(columns.len());
        if let Some(c) = columns.iter().find(|c| c.len() != target.len()) {
            return Err(Error::Shape(format!(
                "column of length {} next to a target of length {}",
                c.len(),
                target.len()
            )));
        }
        let mut xs = vec![0; columns.len()];
        for (i, &y) in target.iter().enumerate() {
            for (x, c) in xs.iter_mut().zip(columns) {
                *x = c[i];
            }
            joint.add(&xs, y, 1)?;
        }
        Ok(joint)
    }

    pub fn add(&mut self, xs: &[u32], y: u32, count: u64) -> Result<()> {
        if xs.len() != self.n_vars {
            return Err(Error::Shape(format!(
                "{} values for a {}-variable table",
                xs.len(),
                self.n_vars
            )));
        }
        if let Some(v) = xs.iter().chain([&y]).find(|&&v| v >= MAX_CARDINALITY) {
            return Err(Error::Argument(format!(
                "value {v} exceeds the cardinality limit {MAX_CARDINALITY}"
            )));
        }
        if count > 0 {
            *self.counts.entry((xs.to_vec(), y)).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// The same table with variable `var` and the target exchanged.
    pub fn with_target(&self, var: usize) -> Result<Self> {
        self.check_vars(&[var])?;
        let mut out = Self::new(self.n_vars);
        for ((xs, y), &c) in &self.counts {
            let mut xs2 = xs.clone();
            let new_y = xs2[var];
            xs2[var] = *y;
            out.add(&xs2, new_y, c)?;
        }
        Ok(out)
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        match vars.iter().find(|&&v| v >= self.n_vars) {
            Some(v) => Err(Error::Argument(format!(
                "variable {v} outside a {}-variable table",
                self.n_vars
            ))),
            None => Ok(()),
        }
    }
}

fn entropy_of_counts(counts: impl Iterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Plug-in H(Y | conditioning) in bits, with 0 log 0 = 0.
pub fn empirical_conditional_entropy(joint: &DiscreteJoint, conditioning: &[usize]) -> Result<f64> {
    joint.check_vars(conditioning)?;
    let total = joint.total();
    if total == 0 {
        return Err(Error::Argument("empty count table".into()));
    }
    let mut groups: BTreeMap<Vec<u32>, BTreeMap<u32, u64>> = BTreeMap::new();
    for ((xs, y), &c) in &joint.counts {
        let key: Vec<u32> = conditioning.iter().map(|&v| xs[v]).collect();
        *groups.entry(key).or_default().entry(*y).or_insert(0) += c;
    }
    let h = groups
        .values()
        .map(|g| {
            let n: u64 = g.values().sum();
            n as f64 / total as f64 * entropy_of_counts(g.values().copied())
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Plug-in I(source; Y | conditioning) in bits.
pub fn shannon_mi(joint: &DiscreteJoint, source: usize, conditioning: &[usize]) -> Result<f64> {
    if conditioning.contains(&source) {
        return Err(Error::Argument(format!(
            "source variable {source} is already conditioned on"
        )));
    }
    joint.check_vars(&[source])?;
    let without = empirical_conditional_entropy(joint, conditioning)?;
    let mut with: Vec<usize> = conditioning.to_vec();
    with.push(source);
    let with = empirical_conditional_entropy(joint, &with)?;
    Ok((without - with).max(0.0))
}

/// Plug-in entropy of a label sequence, in bits.
pub fn empirical_entropy(labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Argument("entropy of an empty sample".into()));
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    Ok(entropy_of_counts(counts.into_values()))
}
