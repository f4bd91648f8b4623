//! Versioned JSON persistence for trained models and the loss-history CSV.

use super::mlp::Mlp;
use super::scaler::Scaler;
use super::train::TrainConfig;
use super::{SurrogateError, TrainedSurrogate};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ScalerFile {
    means: Vec<f64>,
    stds: Vec<f64>,
}

/// On-disk model layout. Weights are flattened row-major per layer.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    x_scaler: ScalerFile,
    y_scaler: ScalerFile,
    train_config: TrainConfig,
    r2_train: f64,
    r2_test: f64,
}

fn scaler_to_file(s: &Scaler) -> ScalerFile {
    ScalerFile {
        means: s.means().to_vec(),
        stds: s.stds().to_vec(),
    }
}

fn scaler_from_file(f: ScalerFile) -> Scaler {
    Scaler::from_parts(f.means, f.stds)
}

pub fn save_model(surrogate: &TrainedSurrogate, path: &Path) -> Result<(), SurrogateError> {
    let sizes = surrogate.model.layer_sizes().to_vec();
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        layer_sizes: sizes,
        weights: surrogate
            .model
            .weights()
            .iter()
            .map(|w| w.iter().copied().collect())
            .collect(),
        biases: surrogate
            .model
            .biases()
            .iter()
            .map(|b| b.to_vec())
            .collect(),
        x_scaler: scaler_to_file(&surrogate.x_scaler),
        y_scaler: scaler_to_file(&surrogate.y_scaler),
        train_config: surrogate.train_config.clone(),
        r2_train: surrogate.r2_train,
        r2_test: surrogate.r2_test,
    };
    let json = serde_json::to_string_pretty(&file).expect("model serializes");
    fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedSurrogate, SurrogateError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| SurrogateError::Corrupt(format!("{e}")))?;
    let found = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| SurrogateError::Corrupt("missing format_version".into()))?
        as u32;
    if found != MODEL_FORMAT_VERSION {
        return Err(SurrogateError::FormatVersion {
            found,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| SurrogateError::Corrupt(format!("{e}")))?;

    if file.layer_sizes.len() < 2 || file.weights.len() != file.layer_sizes.len() - 1 {
        return Err(SurrogateError::Corrupt("layer bookkeeping mismatch".into()));
    }
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for (l, w) in file.layer_sizes.windows(2).enumerate() {
        let (rows, cols) = (w[0], w[1]);
        let flat = &file.weights[l];
        if flat.len() != rows * cols || file.biases[l].len() != cols {
            return Err(SurrogateError::Corrupt(format!(
                "layer {l} has wrong parameter counts"
            )));
        }
        weights.push(
            Array2::from_shape_vec((rows, cols), flat.clone())
                .map_err(|e| SurrogateError::Corrupt(format!("{e}")))?,
        );
        biases.push(Array1::from_vec(file.biases[l].clone()));
    }
    let model = Mlp::from_parts(weights, biases)
        .map_err(|e| SurrogateError::Corrupt(format!("{e}")))?;
    Ok(TrainedSurrogate {
        model,
        x_scaler: scaler_from_file(file.x_scaler),
        y_scaler: scaler_from_file(file.y_scaler),
        train_config: file.train_config,
        r2_train: file.r2_train,
        r2_test: file.r2_test,
    })
}

/// Two-column `epoch,loss` CSV ready for plotting.
pub fn write_loss_csv(path: &Path, losses: &[f64]) -> Result<(), SurrogateError> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "epoch,loss")?;
    for (i, loss) in losses.iter().enumerate() {
        writeln!(f, "{},{:.16e}", i + 1, loss)?;
    }
    Ok(())
}
