//! TOML run configuration: the parameter space, backend selection, device
//! table, cost-model calibration, training hyperparameters and search
//! settings, with scalar fields overridable from the command line.

use crate::harness::{CostModel, DeviceSpec, StageCost};
use crate::space::{Config, ParamSpace, ParamSpec};
use crate::surrogate::TrainConfig;
use crate::tuner::SearchSettings;
use crate::workload::WorkloadSpec;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error in `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RangeEntry {
    start: u64,
    stop: u64,
    step: u64,
}

#[derive(Debug, Clone, Deserialize)]
struct ParamEntry {
    name: String,
    #[serde(default)]
    values: Option<Vec<u64>>,
    #[serde(default)]
    range: Option<RangeEntry>,
}

/// `[space]` table: the parameter list plus the device-feature flag.
#[derive(Debug, Clone, Deserialize)]
pub struct SpaceSection {
    #[serde(default)]
    pub device_feature: bool,
    #[serde(rename = "param")]
    params: Vec<ParamEntry>,
}

impl SpaceSection {
    pub fn build(&self) -> Result<ParamSpace, ConfigError> {
        let mut specs = Vec::with_capacity(self.params.len());
        for p in &self.params {
            let field = format!("space.param `{}`", p.name);
            let spec = match (&p.values, &p.range) {
                (Some(values), None) => ParamSpec::new(p.name.clone(), values.clone()),
                (None, Some(r)) => ParamSpec::from_range(p.name.clone(), r.start, r.stop, r.step),
                (Some(_), Some(_)) => {
                    return Err(invalid(&field, "give either `values` or `range`, not both"))
                }
                (None, None) => return Err(invalid(&field, "needs `values` or `range`")),
            }
            .map_err(|e| invalid(&field, e.to_string()))?;
            specs.push(spec);
        }
        ParamSpace::new(specs, self.device_feature)
            .map_err(|e| invalid("space.param", e.to_string()))
    }
}

/// Load a standalone space-definition file (the same schema as the
/// `[space]` table of a run config).
pub fn load_space(path: &Path) -> Result<ParamSpace, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let section: SpaceSection = toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    section.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Synthetic,
    Workload,
    Command,
}

#[derive(Debug, Clone, Deserialize)]
struct BackendSection {
    kind: BackendKind,
}

#[derive(Debug, Clone, Deserialize)]
struct CostModelSection {
    #[serde(default, rename = "stage")]
    stages: Vec<StageCost>,
    #[serde(default = "default_interaction")]
    interaction: f64,
    #[serde(default)]
    noise_sigma: f64,
    #[serde(default)]
    seed: u64,
}

fn default_interaction() -> f64 {
    0.002
}

#[derive(Debug, Clone, Deserialize)]
struct WorkloadSection {
    #[serde(default = "default_grid")]
    nx: usize,
    #[serde(default = "default_grid")]
    ny: usize,
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    #[serde(default)]
    kappa: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_source_amplitude")]
    source_amplitude: f64,
}

fn default_grid() -> usize {
    96
}
fn default_steps() -> usize {
    2
}
fn default_epsilon() -> f64 {
    1.0
}
fn default_source_amplitude() -> f64 {
    crate::workload::DEFAULT_SOURCE_AMPLITUDE
}

impl Default for WorkloadSection {
    fn default() -> Self {
        Self {
            nx: default_grid(),
            ny: default_grid(),
            steps: default_steps(),
            epsilon: default_epsilon(),
            kappa: 0.0,
            seed: 0,
            source_amplitude: default_source_amplitude(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseMode {
    WallClock,
    TimeLine,
}

/// `[command]` table of the external-command backend.
#[derive(Debug, Clone, Deserialize)]
pub struct CommandSection {
    pub template: String,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default = "default_parse")]
    pub parse: ParseMode,
    #[serde(default = "default_iters")]
    pub iters: u64,
}

fn default_timeout() -> f64 {
    300.0
}
fn default_parse() -> ParseMode {
    ParseMode::WallClock
}
fn default_iters() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
struct SearchSection {
    #[serde(default = "default_candidates")]
    n_candidates: usize,
    /// TOML integers are at most 64-bit; widened to u128 internally.
    #[serde(default = "default_enum_cap")]
    enum_cap: u64,
    #[serde(default = "default_topk")]
    topk: usize,
    #[serde(default)]
    baseline: Option<Vec<u64>>,
}

fn default_candidates() -> usize {
    crate::tuner::DEFAULT_CANDIDATES
}
fn default_enum_cap() -> u64 {
    crate::tuner::DEFAULT_ENUM_CAP as u64
}
fn default_topk() -> usize {
    10
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            n_candidates: default_candidates(),
            enum_cap: default_enum_cap(),
            topk: default_topk(),
            baseline: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct CollectSection {
    #[serde(default = "default_repeats")]
    repeats: usize,
    #[serde(default = "default_include_device")]
    include_device: bool,
}

fn default_repeats() -> usize {
    3
}
fn default_include_device() -> bool {
    true
}

impl Default for CollectSection {
    fn default() -> Self {
        Self {
            repeats: default_repeats(),
            include_device: default_include_device(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RunConfigFile {
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_out_dir")]
    out_dir: PathBuf,
    space: SpaceSection,
    backend: BackendSection,
    #[serde(rename = "device")]
    devices: Vec<DeviceSpec>,
    #[serde(default)]
    cost_model: Option<CostModelSection>,
    #[serde(default)]
    train: Option<TrainConfig>,
    #[serde(default)]
    search: Option<SearchSection>,
    #[serde(default)]
    collect: Option<CollectSection>,
    #[serde(default)]
    workload: Option<WorkloadSection>,
    #[serde(default)]
    command: Option<CommandSection>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub space: ParamSpace,
    pub backend: BackendKind,
    pub devices: Vec<DeviceSpec>,
    pub cost_model: CostModel,
    pub train: TrainConfig,
    pub search: SearchSettings,
    pub baseline: Option<Config>,
    pub repeats: usize,
    pub include_device: bool,
    pub workload: WorkloadSpec,
    pub command: Option<CommandSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: RunConfigFile = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_file(file)
    }

    fn from_file(file: RunConfigFile) -> Result<Self, ConfigError> {
        let space = file.space.build()?;

        if file.devices.is_empty() {
            return Err(invalid("device", "at least one device is required"));
        }
        let mut names = std::collections::HashSet::new();
        for d in &file.devices {
            d.validate()
                .map_err(|e| invalid("device", e.to_string()))?;
            if !names.insert(d.name.clone()) {
                return Err(invalid("device", format!("duplicate device name `{}`", d.name)));
            }
        }

        let n_params = space.num_params();
        let cost_model = match file.cost_model {
            Some(section) => {
                let stages = if section.stages.is_empty() {
                    if n_params % 2 != 0 {
                        return Err(invalid(
                            "cost_model.stage",
                            format!("space has {n_params} parameters; pairs of (gang, vector) are required"),
                        ));
                    }
                    CostModel::default_for_stages(n_params / 2).stages
                } else {
                    section.stages
                };
                CostModel {
                    stages,
                    interaction: section.interaction,
                    noise_sigma: section.noise_sigma,
                    seed: section.seed,
                }
            }
            None => {
                if n_params % 2 != 0 {
                    return Err(invalid(
                        "cost_model",
                        format!("space has {n_params} parameters; pairs of (gang, vector) are required"),
                    ));
                }
                CostModel::default_for_stages(n_params / 2)
            }
        };
        if file.backend.kind == BackendKind::Synthetic {
            cost_model
                .validate()
                .map_err(|e| invalid("cost_model", e.to_string()))?;
            if 2 * cost_model.stages.len() != n_params {
                return Err(invalid(
                    "cost_model.stage",
                    format!(
                        "{} stages cover {} parameters but the space has {}",
                        cost_model.stages.len(),
                        2 * cost_model.stages.len(),
                        n_params
                    ),
                ));
            }
        }

        let train = file.train.unwrap_or_default();
        train
            .validate()
            .map_err(|e| invalid("train", e.to_string()))?;

        let search_section = file.search.unwrap_or_default();
        let baseline = match &search_section.baseline {
            Some(values) => {
                let config = Config::new(values.clone());
                space
                    .validate_config(&config)
                    .map_err(|e| invalid("search.baseline", e.to_string()))?;
                Some(config)
            }
            None => None,
        };
        let search = SearchSettings {
            n_candidates: search_section.n_candidates,
            k: search_section.topk,
            seed: file.seed,
            enum_cap: u128::from(search_section.enum_cap),
        };

        let collect = file.collect.unwrap_or_default();
        if collect.repeats < 1 {
            return Err(invalid("collect.repeats", "must be at least 1"));
        }

        let w = file.workload.unwrap_or_default();
        let workload = WorkloadSpec {
            nx: w.nx,
            ny: w.ny,
            steps: w.steps,
            epsilon: w.epsilon,
            kappa: w.kappa,
            seed: w.seed,
            source_amplitude: w.source_amplitude,
            ..WorkloadSpec::default()
        };
        if file.backend.kind == BackendKind::Workload {
            workload
                .validate()
                .map_err(|e| invalid("workload", e.to_string()))?;
            if n_params != 2 * crate::workload::NUM_STAGES {
                return Err(invalid(
                    "space.param",
                    format!(
                        "the workload backend needs {} parameters (gang, vector per stage), got {n_params}",
                        2 * crate::workload::NUM_STAGES
                    ),
                ));
            }
        }
        if file.backend.kind == BackendKind::Command && file.command.is_none() {
            return Err(invalid("command", "the command backend needs a [command] table"));
        }
        if let Some(c) = &file.command {
            if c.timeout_s <= 0.0 {
                return Err(invalid("command.timeout_s", "must be positive"));
            }
        }

        Ok(Self {
            seed: file.seed,
            out_dir: file.out_dir,
            space,
            backend: file.backend.kind,
            devices: file.devices,
            cost_model,
            train,
            search,
            baseline,
            repeats: collect.repeats,
            include_device: collect.include_device,
            workload,
            command: file.command,
        })
    }

    /// Pick a device by name, or the first one.
    pub fn device(&self, name: Option<&str>) -> Result<&DeviceSpec, ConfigError> {
        match name {
            None => Ok(&self.devices[0]),
            Some(n) => self
                .devices
                .iter()
                .find(|d| d.name == n)
                .ok_or_else(|| invalid("device", format!("unknown device `{n}`"))),
        }
    }

    pub fn device_by_gflops(&self, gflops: f64) -> Option<&DeviceSpec> {
        self.devices
            .iter()
            .find(|d| d.gflops.to_bits() == gflops.to_bits())
    }
}
