//! Backend that times the built-in finite-volume workload.

use super::{Backend, DeviceSpec, HarnessError};
use crate::space::Config;
use crate::workload::{run_workload, TilePair, WorkloadSpec, NUM_STAGES};

/// Maps a 14-value config (one gang/vector pair per stage) onto per-stage
/// tile pairs and runs the stage loop. Gang counts become row-block sizes
/// via a modulo against the grid height; vector lengths become column-block
/// sizes clamped to the row length.
#[derive(Debug, Clone)]
pub struct WorkloadBackend {
    /// Everything but the tiles, which come from the measured config.
    pub base: WorkloadSpec,
}

/// Translate one (gang, vector) pair into a tile pair on an `nx x ny` grid.
pub fn tile_from_pair(gang: u64, vector: u64, nx: usize, ny: usize) -> TilePair {
    let tile_i = ((gang - 1) % nx as u64 + 1) as usize;
    let tile_j = (vector as usize).min(ny);
    (tile_i, tile_j)
}

/// Per-stage tiles for a full 2 * [`NUM_STAGES`]-value config.
pub fn tiles_from_config(
    config: &Config,
    nx: usize,
    ny: usize,
) -> Result<[TilePair; NUM_STAGES], HarnessError> {
    let values = config.values();
    if values.len() != 2 * NUM_STAGES {
        return Err(HarnessError::StageCountMismatch {
            params: values.len(),
            stages: NUM_STAGES,
        });
    }
    let mut tiles = [(1, 1); NUM_STAGES];
    for (k, tile) in tiles.iter_mut().enumerate() {
        *tile = tile_from_pair(values[2 * k], values[2 * k + 1], nx, ny);
    }
    Ok(tiles)
}

impl Backend for WorkloadBackend {
    fn kind(&self) -> &'static str {
        "workload"
    }

    fn run(&self, config: &Config, _device: &DeviceSpec) -> Result<f64, HarnessError> {
        let tiles = tiles_from_config(config, self.base.nx, self.base.ny)?;
        let spec = WorkloadSpec {
            tiles,
            ..self.base.clone()
        };
        let result = run_workload(&spec)?;
        Ok(result.elapsed_seconds)
    }
}
