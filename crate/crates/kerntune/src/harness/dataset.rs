//! Measured samples and the tabular dataset they collect into.

use super::HarnessError;
use crate::space::{split_indices, Config};
use std::collections::HashSet;

/// One measured row: a config, the device capability it ran on (when the
/// dataset carries a device column), and the aggregated timing.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub config: Config,
    pub device_gflops: Option<f64>,
    /// Median runtime over the repeats, in seconds.
    pub runtime_s: f64,
    pub repeats: usize,
    /// Max minus min across the repeats, in seconds.
    pub dispersion_s: f64,
}

/// Column name of the optional device column.
pub const DEVICE_COLUMN: &str = "device_gflops";
/// Column name of the runtime column that terminates the schema.
pub const RUNTIME_COLUMN: &str = "runtime_s";

/// Rows plus their schema: parameter names, the optional device column, and
/// the runtime column. `(config, device)` pairs are unique.
#[derive(Debug, Clone)]
pub struct Dataset {
    param_names: Vec<String>,
    with_device: bool,
    rows: Vec<Sample>,
    seen: HashSet<(Config, u64)>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.param_names == other.param_names
            && self.with_device == other.with_device
            && self.rows == other.rows
    }
}

fn device_key(gflops: Option<f64>) -> u64 {
    match gflops {
        Some(g) => g.to_bits(),
        None => u64::MAX,
    }
}

impl Dataset {
    pub fn new(param_names: Vec<String>, with_device: bool) -> Self {
        Self {
            param_names,
            with_device,
            rows: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn has_device_column(&self) -> bool {
        self.with_device
    }

    /// Full schema: parameter columns, optional device column, runtime
    /// column.
    pub fn schema(&self) -> Vec<String> {
        let mut s = self.param_names.clone();
        if self.with_device {
            s.push(DEVICE_COLUMN.to_string());
        }
        s.push(RUNTIME_COLUMN.to_string());
        s
    }

    pub fn rows(&self) -> &[Sample] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains_config(&self, config: &Config, device_gflops: Option<f64>) -> bool {
        self.seen
            .contains(&(config.clone(), device_key(device_gflops)))
    }

    /// Append one row, enforcing the schema and the no-duplicate invariant.
    pub fn push(&mut self, sample: Sample) -> Result<(), HarnessError> {
        if sample.config.values().len() != self.param_names.len() {
            return Err(HarnessError::SchemaMismatch {
                expected: format!("{} parameter values", self.param_names.len()),
                found: format!("{}", sample.config.values().len()),
            });
        }
        if sample.device_gflops.is_some() != self.with_device {
            return Err(HarnessError::SchemaMismatch {
                expected: format!("device column present = {}", self.with_device),
                found: format!("sample device = {:?}", sample.device_gflops),
            });
        }
        if sample.runtime_s <= 0.0 || sample.runtime_s.is_nan() || sample.repeats < 1 {
            return Err(HarnessError::MalformedRow {
                row: self.rows.len() + 1,
                message: "runtime must be positive and repeats >= 1".into(),
            });
        }
        let key = (sample.config.clone(), device_key(sample.device_gflops));
        if !self.seen.insert(key) {
            return Err(HarnessError::DuplicateSample {
                row: self.rows.len() + 1,
            });
        }
        self.rows.push(sample);
        Ok(())
    }

    /// Seeded shuffle-then-cut split; the first part gets
    /// `round(fraction * len)` rows.
    pub fn split(&self, fraction: f64, seed: u64) -> Result<(Dataset, Dataset), HarnessError> {
        let (a, b) = split_indices(self.len(), fraction, seed)?;
        Ok((self.take(&a), self.take(&b)))
    }

    fn take(&self, indices: &[usize]) -> Dataset {
        let mut out = Dataset::new(self.param_names.clone(), self.with_device);
        for &i in indices {
            out.push(self.rows[i].clone()).expect("subset of valid rows");
        }
        out
    }

    /// Group rows by their device value, preserving first-seen device order.
    pub fn split_by_device(&self) -> Vec<(f64, Dataset)> {
        let mut order: Vec<f64> = Vec::new();
        for row in &self.rows {
            let g = row.device_gflops.unwrap_or(f64::NAN);
            if !order.iter().any(|x| x.to_bits() == g.to_bits()) {
                order.push(g);
            }
        }
        order
            .into_iter()
            .map(|g| {
                let mut ds = Dataset::new(self.param_names.clone(), self.with_device);
                for row in &self.rows {
                    if row.device_gflops.unwrap_or(f64::NAN).to_bits() == g.to_bits() {
                        ds.push(row.clone()).expect("rows were valid");
                    }
                }
                (g, ds)
            })
            .collect()
    }

    pub fn runtimes(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.runtime_s).collect()
    }
}
