//! Discrete scheduling-parameter spaces: definition, cardinality, random
//! sampling, exhaustive enumeration and numeric feature encoding.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("parameter `{0}` has an empty value list")]
    EmptyValues(String),
    #[error("parameter `{0}` values must be strictly increasing and positive")]
    BadValues(String),
    #[error("duplicate parameter name `{0}`")]
    DuplicateName(String),
    #[error("a parameter space needs at least one parameter")]
    NoParams,
    #[error("config has {got} values but the space has {expected} parameters")]
    ConfigLength { got: usize, expected: usize },
    #[error("value {value} is not in the value list of parameter `{param}`")]
    ValueNotInList { param: String, value: u64 },
    #[error("space holds {size} configs, fewer than the {requested} requested")]
    NotEnoughConfigs { size: u128, requested: usize },
    #[error("draw budget of {budget} exhausted after collecting {collected} of {requested} distinct configs")]
    DrawBudgetExhausted {
        budget: usize,
        collected: usize,
        requested: usize,
    },
    #[error("space size {size} exceeds enumeration cap {cap}")]
    SizeExceedsCap { size: u128, cap: u128 },
    #[error("device feature enabled={enabled} does not match the presence of device_gflops")]
    DeviceFeatureMismatch { enabled: bool },
    #[error("cannot split {0} rows; need at least 2")]
    SplitTooSmall(usize),
    #[error("split fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
}

/// One named tuning parameter and its admissible values.
///
/// Values are kept strictly increasing so that positions are unambiguous and
/// enumeration order is well defined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    name: String,
    values: Vec<u64>,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, values: Vec<u64>) -> Result<Self, SpaceError> {
        let name = name.into();
        if values.is_empty() {
            return Err(SpaceError::EmptyValues(name));
        }
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        if !increasing || values[0] == 0 {
            return Err(SpaceError::BadValues(name));
        }
        Ok(Self { name, values })
    }

    /// Arithmetic sequence `start, start+step, ..., <=stop` (stop inclusive
    /// when it lies on the grid).
    pub fn from_range(
        name: impl Into<String>,
        start: u64,
        stop: u64,
        step: u64,
    ) -> Result<Self, SpaceError> {
        let name = name.into();
        if step == 0 || start == 0 || stop < start {
            return Err(SpaceError::BadValues(name));
        }
        let values: Vec<u64> = (start..=stop).step_by(step as usize).collect();
        Self::new(name, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Middle entry of the value list (lower middle for even lengths is not
    /// used; this is the `len/2` entry), serving as the "compiler default"
    /// stand-in for baselines.
    pub fn midpoint(&self) -> u64 {
        self.values[self.values.len() / 2]
    }
}

/// An ordered product of [`ParamSpec`]s, optionally extended by a trailing
/// device-capability feature at encoding time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpace {
    specs: Vec<ParamSpec>,
    device_feature: bool,
}

/// One point of a [`ParamSpace`]: a value chosen from every parameter, in
/// spec order. Ordering is lexicographic over the values, which the search
/// uses as a deterministic tie-break.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Config {
    values: Vec<u64>,
}

impl Config {
    pub fn new(values: Vec<u64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

impl ParamSpace {
    pub fn new(specs: Vec<ParamSpec>, device_feature: bool) -> Result<Self, SpaceError> {
        if specs.is_empty() {
            return Err(SpaceError::NoParams);
        }
        let mut seen = HashSet::new();
        for s in &specs {
            if !seen.insert(s.name.clone()) {
                return Err(SpaceError::DuplicateName(s.name.clone()));
            }
        }
        Ok(Self {
            specs,
            device_feature,
        })
    }

    pub fn specs(&self) -> &[ParamSpec] {
        &self.specs
    }

    pub fn num_params(&self) -> usize {
        self.specs.len()
    }

    pub fn device_feature(&self) -> bool {
        self.device_feature
    }

    pub fn with_device_feature(mut self, enabled: bool) -> Self {
        self.device_feature = enabled;
        self
    }

    /// Number of features produced by [`ParamSpace::encode`].
    pub fn encoded_len(&self) -> usize {
        self.specs.len() + usize::from(self.device_feature)
    }

    pub fn param_names(&self) -> Vec<&str> {
        self.specs.iter().map(|s| s.name()).collect()
    }

    /// Exact number of distinct configs, as the product of the value-list
    /// lengths. Exact in `u128` (far past 10^18); saturates at `u128::MAX`
    /// beyond that.
    pub fn size(&self) -> u128 {
        self.specs.iter().fold(1u128, |acc, s| {
            acc.saturating_mul(s.values.len() as u128)
        })
    }

    /// Per-parameter midpoint config used as the baseline stand-in for an
    /// untuned default.
    pub fn midpoint_config(&self) -> Config {
        Config::new(self.specs.iter().map(|s| s.midpoint()).collect())
    }

    pub fn validate_config(&self, config: &Config) -> Result<(), SpaceError> {
        if config.values.len() != self.specs.len() {
            return Err(SpaceError::ConfigLength {
                got: config.values.len(),
                expected: self.specs.len(),
            });
        }
        for (spec, &v) in self.specs.iter().zip(&config.values) {
            if !spec.values.contains(&v) {
                return Err(SpaceError::ValueNotInList {
                    param: spec.name.clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Draw `n` distinct configs, each parameter i.i.d. uniform over its
    /// value list. Duplicates are redrawn; gives up after `100 * n` draws.
    ///
    /// The generator is ChaCha8 seeded from `seed`; identical seeds give
    /// identical draws within one build of this crate.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Config>, SpaceError> {
        if self.size() < n as u128 {
            return Err(SpaceError::NotEnoughConfigs {
                size: self.size(),
                requested: n,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen: HashSet<Config> = HashSet::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        let budget = n.saturating_mul(100);
        let mut draws = 0usize;
        while out.len() < n {
            if draws >= budget {
                return Err(SpaceError::DrawBudgetExhausted {
                    budget,
                    collected: out.len(),
                    requested: n,
                });
            }
            draws += 1;
            let values = self
                .specs
                .iter()
                .map(|s| s.values[rng.gen_range(0..s.values.len())])
                .collect();
            let config = Config::new(values);
            if seen.insert(config.clone()) {
                out.push(config);
            }
        }
        Ok(out)
    }

    /// Iterate every config in lexicographic order of value indices.
    /// Refused when the space size exceeds `cap`.
    pub fn enumerate(&self, cap: u128) -> Result<ConfigIter<'_>, SpaceError> {
        let size = self.size();
        if size > cap {
            return Err(SpaceError::SizeExceedsCap { size, cap });
        }
        Ok(ConfigIter {
            space: self,
            indices: vec![0; self.specs.len()],
            done: false,
        })
    }

    /// Encode a config as a real feature vector: values cast to `f64` in
    /// spec order, with `device_gflops` appended last when the space carries
    /// the device feature.
    pub fn encode(
        &self,
        config: &Config,
        device_gflops: Option<f64>,
    ) -> Result<Vec<f64>, SpaceError> {
        self.validate_config(config)?;
        if self.device_feature != device_gflops.is_some() {
            return Err(SpaceError::DeviceFeatureMismatch {
                enabled: self.device_feature,
            });
        }
        let mut v: Vec<f64> = config.values.iter().map(|&x| x as f64).collect();
        if let Some(g) = device_gflops {
            v.push(g);
        }
        Ok(v)
    }
}

/// Lexicographic odometer over a [`ParamSpace`].
pub struct ConfigIter<'a> {
    space: &'a ParamSpace,
    indices: Vec<usize>,
    done: bool,
}

impl Iterator for ConfigIter<'_> {
    type Item = Config;

    fn next(&mut self) -> Option<Config> {
        if self.done {
            return None;
        }
        let values = self
            .space
            .specs
            .iter()
            .zip(&self.indices)
            .map(|(s, &i)| s.values[i])
            .collect();
        // Advance the rightmost index, carrying left.
        for pos in (0..self.indices.len()).rev() {
            self.indices[pos] += 1;
            if self.indices[pos] < self.space.specs[pos].values.len() {
                break;
            }
            self.indices[pos] = 0;
            if pos == 0 {
                self.done = true;
            }
        }
        Some(Config::new(values))
    }
}

/// Seeded shuffle-then-cut partition of `0..n`.
///
/// The first part gets `round(fraction * n)` indices, clamped to `[1, n-1]`
/// so neither side of the partition is empty.
pub fn split_indices(
    n: usize,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), SpaceError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(SpaceError::BadFraction(fraction));
    }
    if n < 2 {
        return Err(SpaceError::SplitTooSmall(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let cut = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
    let second = order.split_off(cut);
    Ok((order, second))
}
