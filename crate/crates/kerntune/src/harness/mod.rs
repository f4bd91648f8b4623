//! Measurement: pluggable backends, repeat-and-aggregate timing, dataset
//! collection with resume, and CSV persistence.
//!
//! Measurements are strictly serialized - one backend invocation at a time -
//! to protect timing fidelity.

mod command;
mod csvio;
mod dataset;
mod synthetic;
mod workload_backend;

pub use command::{CommandBackend, RuntimeSource};
pub use csvio::{load_dataset, save_dataset, DatasetWriter};
pub use dataset::{Dataset, Sample, DEVICE_COLUMN, RUNTIME_COLUMN};
pub use synthetic::{
    synthetic_cost, CostModel, StageCost, SyntheticBackend, MIN_RUNTIME_S, REFERENCE_GFLOPS,
};
pub use workload_backend::{tile_from_pair, tiles_from_config, WorkloadBackend};

use crate::space::{Config, ParamSpace, SpaceError};
use crate::workload::WorkloadError;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("backend `{backend}` failed for config {config:?}: {source}")]
    BackendFailed {
        backend: &'static str,
        config: Vec<u64>,
        #[source]
        source: Box<HarnessError>,
    },
    #[error("command exited with status {status}: `{command}`\n{stderr}")]
    CommandFailed {
        status: i32,
        command: String,
        stderr: String,
    },
    #[error("command timed out after {seconds} s: `{command}`")]
    CommandTimeout { seconds: f64, command: String },
    #[error("could not find a TIME_S=<float> line in the output of `{command}`: {output}")]
    UnparsableOutput { command: String, output: String },
    #[error("command template has no placeholder for parameter `{0}`")]
    TemplateMissingParam(String),
    #[error("duplicate (config, device) pair at row {row}")]
    DuplicateSample { row: usize },
    #[error("dataset schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("malformed dataset row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error(
        "resume file holds a config at row {row} that the current (space, n, seed) never samples"
    )]
    ResumeForeignConfig { row: usize },
    #[error("config has {params} values but the cost model expects {stages} stages (2 values each)")]
    StageCountMismatch { params: usize, stages: usize },
    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),
    #[error("invalid device `{name}`: {message}")]
    InvalidDevice { name: String, message: String },
    #[error("repeats must be at least 1")]
    ZeroRepeats,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A measurement target: name, double-precision throughput, and the
/// synthetic backend's time scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub name: String,
    /// Double-precision GFLOPS; also the value of the device feature column.
    pub gflops: f64,
    /// Seconds of base time the synthetic surface assigns to the reference
    /// device.
    pub base_scale: f64,
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.gflops > 0.0 && self.base_scale > 0.0 {
            Ok(())
        } else {
            Err(HarnessError::InvalidDevice {
                name: self.name.clone(),
                message: "gflops and base_scale must be positive".into(),
            })
        }
    }
}

/// One way of turning a config into seconds.
pub trait Backend {
    fn kind(&self) -> &'static str;
    fn run(&self, config: &Config, device: &DeviceSpec) -> Result<f64, HarnessError>;
}

/// Run `backend` `repeats` times (strictly sequentially) and aggregate:
/// median as the runtime, max minus min as the dispersion.
pub fn measure(
    backend: &dyn Backend,
    config: &Config,
    device: &DeviceSpec,
    repeats: usize,
) -> Result<Sample, HarnessError> {
    if repeats < 1 {
        return Err(HarnessError::ZeroRepeats);
    }
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = backend
            .run(config, device)
            .map_err(|e| HarnessError::BackendFailed {
                backend: backend.kind(),
                config: config.values().to_vec(),
                source: Box::new(e),
            })?;
        times.push(t);
    }
    let mut sorted = times.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    let runtime_s = if repeats % 2 == 1 {
        sorted[repeats / 2]
    } else {
        0.5 * (sorted[repeats / 2 - 1] + sorted[repeats / 2])
    };
    Ok(Sample {
        config: config.clone(),
        device_gflops: Some(device.gflops),
        runtime_s,
        repeats,
        dispersion_s: sorted[repeats - 1] - sorted[0],
    })
}

/// Progress event emitted once per measured (or skipped) config.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub done: usize,
    pub total: usize,
    pub elapsed_s: f64,
    pub eta_s: f64,
}

/// What to collect: how many samples of which space, how many repeats per
/// sample, and whether rows carry the device column.
#[derive(Debug, Clone, Copy)]
pub struct CollectPlan<'a> {
    pub space: &'a ParamSpace,
    pub n: usize,
    pub repeats: usize,
    pub seed: u64,
    pub include_device: bool,
}

fn normalized(sample: Sample, include_device: bool) -> Sample {
    Sample {
        device_gflops: if include_device {
            sample.device_gflops
        } else {
            None
        },
        ..sample
    }
}

/// Draw the configs and measure them all, in sample order.
pub fn collect(
    plan: &CollectPlan,
    backend: &dyn Backend,
    device: &DeviceSpec,
    mut on_progress: Option<&mut dyn FnMut(Progress)>,
) -> Result<Dataset, HarnessError> {
    let configs = plan.space.sample(plan.n, plan.seed)?;
    let names: Vec<String> = plan
        .space
        .param_names()
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut dataset = Dataset::new(names, plan.include_device);
    let start = Instant::now();
    for (i, config) in configs.iter().enumerate() {
        let sample = measure(backend, config, device, plan.repeats)?;
        dataset.push(normalized(sample, plan.include_device))?;
        emit_progress(&mut on_progress, i + 1, plan.n, start);
    }
    Ok(dataset)
}

/// Resumable collection: rows land in `path` as they are measured, and a
/// rerun pointed at the same file skips configs it already holds. The config
/// list is fully determined by `(space, n, seed)`, so a resumed run finishes
/// with exactly `n` rows.
pub fn collect_to_csv(
    path: &Path,
    plan: &CollectPlan,
    backend: &dyn Backend,
    device: &DeviceSpec,
    mut on_progress: Option<&mut dyn FnMut(Progress)>,
) -> Result<Dataset, HarnessError> {
    let configs = plan.space.sample(plan.n, plan.seed)?;
    let names: Vec<String> = plan
        .space
        .param_names()
        .iter()
        .map(|s| s.to_string())
        .collect();

    let existing = if path.exists() {
        let loaded = load_dataset(path)?;
        if loaded.param_names() != names.as_slice()
            || loaded.has_device_column() != plan.include_device
        {
            return Err(HarnessError::SchemaMismatch {
                expected: names.join(","),
                found: loaded.param_names().join(","),
            });
        }
        for (row, r) in loaded.rows().iter().enumerate() {
            if !configs.contains(&r.config) {
                return Err(HarnessError::ResumeForeignConfig { row: row + 1 });
            }
        }
        Some(loaded)
    } else {
        None
    };

    let mut dataset = Dataset::new(names, plan.include_device);
    let mut writer = match &existing {
        Some(_) => DatasetWriter::append(path)?,
        None => DatasetWriter::create(path, &dataset)?,
    };

    let start = Instant::now();
    for (i, config) in configs.iter().enumerate() {
        let device_key = plan.include_device.then_some(device.gflops);
        let reused = existing.as_ref().and_then(|ds| {
            ds.rows()
                .iter()
                .find(|r| r.config == *config && r.device_gflops == device_key)
                .cloned()
        });
        match reused {
            Some(row) => dataset.push(row)?,
            None => {
                let sample = normalized(
                    measure(backend, config, device, plan.repeats)?,
                    plan.include_device,
                );
                writer.write_row(&sample)?;
                dataset.push(sample)?;
            }
        }
        emit_progress(&mut on_progress, i + 1, plan.n, start);
    }
    Ok(dataset)
}

fn emit_progress(
    on_progress: &mut Option<&mut dyn FnMut(Progress)>,
    done: usize,
    total: usize,
    start: Instant,
) {
    if let Some(cb) = on_progress {
        let elapsed_s = start.elapsed().as_secs_f64();
        let eta_s = if done > 0 {
            elapsed_s / done as f64 * (total - done) as f64
        } else {
            0.0
        };
        cb(Progress {
            done,
            total,
            elapsed_s,
            eta_s,
        });
    }
}
