//! Runtime-prediction surrogate: feature standardization, a fully connected
//! regression network trained with Adam, the R^2 metric and model
//! persistence.
//!
//! All arithmetic is 64-bit. Training is single-threaded and bit-reproducible
//! for a fixed seed; prediction is pure per row and may run in parallel.

mod metrics;
mod mlp;
mod persist;
mod scaler;
mod train;

pub use metrics::{r2, R2Score};
pub use mlp::{adam_step, AdamState, Gradients, Mlp};
pub use persist::{load_model, save_model, write_loss_csv, MODEL_FORMAT_VERSION};
pub use scaler::Scaler;
pub use train::{
    train, AdaptiveLr, LrDecision, RegressionData, StopReason, TrainConfig, TrainReport,
};

use ndarray::{Array1, ArrayView2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("input matrix has no rows")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid layer sizes: {0}")]
    BadLayerSizes(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite loss at epoch {epoch}, batch {batch}; training aborted")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is corrupt: {0}")]
    Corrupt(String),
    #[error("model format version {found} unsupported (this build reads {expected})")]
    FormatVersion { found: u32, expected: u32 },
}

/// Minimum batch size before [`TrainedSurrogate::predict`] switches to the
/// parallel row map.
#[cfg(feature = "parallel")]
const PAR_MIN_ROWS: usize = 1024;

/// A trained model bundled with the feature and target scalers it was fitted
/// with, which is the unit that gets persisted and queried.
#[derive(Debug, Clone)]
pub struct TrainedSurrogate {
    pub model: Mlp,
    pub x_scaler: Scaler,
    pub y_scaler: Scaler,
    pub train_config: TrainConfig,
    pub r2_train: f64,
    pub r2_test: f64,
}

impl TrainedSurrogate {
    pub fn input_size(&self) -> usize {
        self.model.input_size()
    }

    /// Predict runtimes in seconds for a feature matrix (one config per row):
    /// standardize, forward pass, un-standardize.
    ///
    /// Rows are independent; with the `parallel` feature large batches are
    /// mapped in parallel and the result is bitwise identical to the
    /// sequential path.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array1<f64>, SurrogateError> {
        #[cfg(feature = "parallel")]
        if x.nrows() >= PAR_MIN_ROWS {
            return self.predict_par(x);
        }
        self.predict_seq(x)
    }

    /// Sequential prediction path.
    pub fn predict_seq(&self, x: ArrayView2<f64>) -> Result<Array1<f64>, SurrogateError> {
        let xs = self.x_scaler.transform(x)?;
        let mut out = Array1::zeros(xs.nrows());
        for (i, row) in xs.rows().into_iter().enumerate() {
            out[i] = self.model.forward(row)?;
        }
        self.y_scaler.inverse_1d_mut(&mut out);
        Ok(out)
    }

    /// Parallel prediction path; same per-row arithmetic as
    /// [`Self::predict_seq`], so results do not depend on partitioning.
    #[cfg(feature = "parallel")]
    pub fn predict_par(&self, x: ArrayView2<f64>) -> Result<Array1<f64>, SurrogateError> {
        use rayon::prelude::*;
        let xs = self.x_scaler.transform(x)?;
        let preds: Result<Vec<f64>, SurrogateError> = (0..xs.nrows())
            .into_par_iter()
            .map(|i| self.model.forward(xs.row(i)))
            .collect();
        let mut out = Array1::from_vec(preds?);
        self.y_scaler.inverse_1d_mut(&mut out);
        Ok(out)
    }
}
