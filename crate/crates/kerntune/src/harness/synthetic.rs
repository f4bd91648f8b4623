//! Deterministic synthetic cost surface standing in for real device timing.

use super::{Backend, DeviceSpec, HarnessError};
use crate::space::Config;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// GFLOPS of the mid-tier reference device the base time is anchored to.
pub const REFERENCE_GFLOPS: f64 = 4700.0;

/// Runtimes are floored here so noise can never produce a non-positive time.
pub const MIN_RUNTIME_S: f64 = 1e-6;

/// Log-quadratic bowl of one stage's (gang, vector) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCost {
    /// Gang count with the lowest cost.
    pub gang_opt: f64,
    /// Vector length with the lowest cost.
    pub vector_opt: f64,
    /// Curvature amplitude along the gang axis, seconds.
    pub gang_amp: f64,
    /// Curvature amplitude along the vector axis, seconds.
    pub vector_amp: f64,
}

/// The full surface: per-stage bowls, a gang-vector interaction, and
/// optional reproducible noise.
///
/// Cost of a config on a device:
///
/// ```text
/// t = base_scale * (4700 / gflops)
///   + sum_k [ A_k log2(g_k/g*_k)^2 + B_k log2(v_k/v*_k)^2 ]
///   + c_int * sum_k log2(g_k/g*_k) * log2(v_k/v*_k)
///   + noise(config, device, seed)
/// ```
///
/// The default calibration keeps the reference device inside the
/// [0.8 s, 2.0 s] window over the whole 14-parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub stages: Vec<StageCost>,
    /// Pairwise gang-vector interaction coefficient, seconds.
    pub interaction: f64,
    /// Standard deviation of the additive noise, seconds; 0 disables it.
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Default per-stage curvature ladder, seconds. Stages contribute unevenly,
/// the way a few hot kernels dominate a real pipeline; the sum keeps the
/// reference device inside the [0.8 s, 2.0 s] window over the full grid.
pub const DEFAULT_STAGE_AMPS: [f64; 7] = [0.050, 0.034, 0.023, 0.016, 0.011, 0.0075, 0.005];

impl CostModel {
    /// Default calibration for `k` stages: optima at (300, 96), amplitudes
    /// from [`DEFAULT_STAGE_AMPS`] (cycled past 7), interaction 0.002 s, no
    /// noise.
    pub fn default_for_stages(k: usize) -> Self {
        Self {
            stages: (0..k)
                .map(|i| {
                    let amp = DEFAULT_STAGE_AMPS[i % DEFAULT_STAGE_AMPS.len()];
                    StageCost {
                        gang_opt: 300.0,
                        vector_opt: 96.0,
                        gang_amp: amp,
                        vector_amp: amp,
                    }
                })
                .collect(),
            interaction: 0.002,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let ok = !self.stages.is_empty()
            && self.stages.iter().all(|s| {
                s.gang_opt > 0.0 && s.vector_opt > 0.0 && s.gang_amp >= 0.0 && s.vector_amp >= 0.0
            })
            && self.noise_sigma >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(HarnessError::InvalidCostModel(
                "stage optima must be positive and amplitudes non-negative".into(),
            ))
        }
    }
}

/// FNV-1a over little-endian words; a documented, release-stable hash used
/// to attach noise deterministically to a (config, device) pair.
fn hash_words(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Evaluate the surface for one config on one device. The config must hold
/// one (gang, vector) pair per stage, in stage order.
pub fn synthetic_cost(
    config: &Config,
    device: &DeviceSpec,
    model: &CostModel,
) -> Result<f64, HarnessError> {
    model.validate()?;
    device.validate()?;
    let values = config.values();
    if values.len() != 2 * model.stages.len() {
        return Err(HarnessError::StageCountMismatch {
            params: values.len(),
            stages: model.stages.len(),
        });
    }
    let base = device.base_scale * (REFERENCE_GFLOPS / device.gflops);
    let mut t = base;
    for (k, stage) in model.stages.iter().enumerate() {
        let dg = (values[2 * k] as f64 / stage.gang_opt).log2();
        let dv = (values[2 * k + 1] as f64 / stage.vector_opt).log2();
        t += stage.gang_amp * dg * dg + stage.vector_amp * dv * dv;
        t += model.interaction * dg * dv;
    }
    if model.noise_sigma > 0.0 {
        let seed = hash_words(
            std::iter::once(model.seed)
                .chain(std::iter::once(device.gflops.to_bits()))
                .chain(values.iter().copied()),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: f64 = StandardNormal.sample(&mut rng);
        t += model.noise_sigma * z;
    }
    Ok(t.max(MIN_RUNTIME_S))
}

/// Backend that answers with [`synthetic_cost`].
#[derive(Debug, Clone)]
pub struct SyntheticBackend {
    pub model: CostModel,
}

impl Backend for SyntheticBackend {
    fn kind(&self) -> &'static str {
        "synthetic"
    }

    fn run(&self, config: &Config, device: &DeviceSpec) -> Result<f64, HarnessError> {
        synthetic_cost(config, device, &self.model)
    }
}
