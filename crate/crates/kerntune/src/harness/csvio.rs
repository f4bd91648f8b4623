//! Dataset CSV persistence.
//!
//! Layout: `param1,...,paramK[,device_gflops],runtime_s,repeats,dispersion_s`.
//! Runtimes and dispersions are printed with 17 significant digits so every
//! `f64` survives the round trip exactly.

use super::dataset::{Dataset, Sample, DEVICE_COLUMN, RUNTIME_COLUMN};
use super::HarnessError;
use crate::space::Config;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn header_line(dataset: &Dataset) -> String {
    let mut cols = dataset.schema();
    cols.push("repeats".into());
    cols.push("dispersion_s".into());
    cols.join(",")
}

fn row_line(sample: &Sample) -> String {
    let mut fields: Vec<String> = sample
        .config
        .values()
        .iter()
        .map(|v| v.to_string())
        .collect();
    if let Some(g) = sample.device_gflops {
        fields.push(fmt_f64(g));
    }
    fields.push(fmt_f64(sample.runtime_s));
    fields.push(sample.repeats.to_string());
    fields.push(fmt_f64(sample.dispersion_s));
    fields.join(",")
}

/// Incremental writer used by resumable collection; rows are flushed as they
/// are appended so an interrupted run leaves a loadable prefix behind.
pub struct DatasetWriter {
    out: BufWriter<fs::File>,
}

impl DatasetWriter {
    /// Create the file and write the header for `dataset`'s schema.
    pub fn create(path: &Path, dataset: &Dataset) -> Result<Self, HarnessError> {
        let file = fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{}", header_line(dataset))?;
        out.flush()?;
        Ok(Self { out })
    }

    /// Open an existing file for appending rows.
    pub fn append(path: &Path) -> Result<Self, HarnessError> {
        let file = fs::OpenOptions::new().append(true).open(path)?;
        Ok(Self {
            out: BufWriter::new(file),
        })
    }

    pub fn write_row(&mut self, sample: &Sample) -> Result<(), HarnessError> {
        writeln!(self.out, "{}", row_line(sample))?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<(), HarnessError> {
    let mut w = DatasetWriter::create(path, dataset)?;
    for row in dataset.rows() {
        w.write_row(row)?;
    }
    Ok(())
}

/// Parse a dataset CSV, reconstructing the schema from the header. Errors
/// carry the 1-based data-row number.
pub fn load_dataset(path: &Path) -> Result<Dataset, HarnessError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| HarnessError::SchemaMismatch {
        expected: "a header line".into(),
        found: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let runtime_pos =
        cols.iter()
            .position(|c| *c == RUNTIME_COLUMN)
            .ok_or_else(|| HarnessError::SchemaMismatch {
                expected: format!("a `{RUNTIME_COLUMN}` column"),
                found: header.to_string(),
            })?;
    if cols.len() != runtime_pos + 3
        || cols[runtime_pos + 1] != "repeats"
        || cols[runtime_pos + 2] != "dispersion_s"
    {
        return Err(HarnessError::SchemaMismatch {
            expected: format!("`{RUNTIME_COLUMN},repeats,dispersion_s` as the trailing columns"),
            found: header.to_string(),
        });
    }
    let with_device = runtime_pos > 0 && cols[runtime_pos - 1] == DEVICE_COLUMN;
    let n_params = if with_device { runtime_pos - 1 } else { runtime_pos };
    if n_params == 0 {
        return Err(HarnessError::SchemaMismatch {
            expected: "at least one parameter column".into(),
            found: header.to_string(),
        });
    }
    let param_names: Vec<String> = cols[..n_params].iter().map(|s| s.to_string()).collect();

    let mut dataset = Dataset::new(param_names, with_device);
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(HarnessError::MalformedRow {
                row,
                message: format!("expected {} fields, found {}", cols.len(), fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, HarnessError> {
            s.parse::<f64>().map_err(|e| HarnessError::MalformedRow {
                row,
                message: format!("bad {what} `{s}`: {e}"),
            })
        };
        let mut values = Vec::with_capacity(n_params);
        for f in &fields[..n_params] {
            values.push(f.parse::<u64>().map_err(|e| HarnessError::MalformedRow {
                row,
                message: format!("bad parameter value `{f}`: {e}"),
            })?);
        }
        let device_gflops = if with_device {
            Some(parse_f(fields[n_params], DEVICE_COLUMN)?)
        } else {
            None
        };
        let runtime_s = parse_f(fields[runtime_pos], RUNTIME_COLUMN)?;
        let repeats = fields[runtime_pos + 1]
            .parse::<usize>()
            .map_err(|e| HarnessError::MalformedRow {
                row,
                message: format!("bad repeats: {e}"),
            })?;
        let dispersion_s = parse_f(fields[runtime_pos + 2], "dispersion_s")?;
        dataset
            .push(Sample {
                config: Config::new(values),
                device_gflops,
                runtime_s,
                repeats,
                dispersion_s,
            })
            .map_err(|e| match e {
                HarnessError::DuplicateSample { .. } => HarnessError::DuplicateSample { row },
                other => other,
            })?;
    }
    Ok(dataset)
}
