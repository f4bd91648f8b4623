//! Surrogate-guided autotuning of discrete kernel-scheduling parameters.
//!
//! The pieces, bottom to top:
//!
//! - [`space`]: parameter spaces, sampling, enumeration, feature encoding.
//! - [`surrogate`]: standardization, a fully connected runtime-prediction
//!   network trained with Adam, the R^2 metric, model persistence.
//! - [`workload`]: a real tiled finite-volume compute kernel whose runtime
//!   depends on its loop tiling while its numerics do not.
//! - [`harness`]: measurement backends (synthetic cost surface, built-in
//!   workload, external command), repeat/median timing, dataset CSV I/O.
//! - [`tuner`]: per-device and combined training, surrogate-guided search,
//!   validation of predicted-best configs, report artifacts.
//! - [`config`]: the TOML run-configuration and space-definition formats.
//!
//! The `parallel` feature (on by default) maps pure batch work - prediction
//! and candidate scoring - over a rayon pool; disabling it leaves every code
//! path sequential with identical results.

pub mod cli;
pub mod config;
pub mod harness;
pub mod space;
pub mod surrogate;
pub mod tuner;
pub mod workload;
