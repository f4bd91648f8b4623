//! Mean-removal and variance scaling of features and targets.

use super::SurrogateError;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

/// Per-column standardization state: column means and population standard
/// deviations. Columns with zero deviation are flagged constant and map to 0
/// under [`Scaler::transform`]; the inverse maps them back to their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: ArrayView2<f64>) -> Result<Self, SurrogateError> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(SurrogateError::EmptyInput);
        }
        let n = x.nrows() as f64;
        let mut means = Vec::with_capacity(x.ncols());
        let mut stds = Vec::with_capacity(x.ncols());
        for col in x.columns() {
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                // exact detection; summation rounding must not turn a
                // constant column into a near-zero deviation
                means.push(first);
                stds.push(0.0);
                continue;
            }
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            means.push(mean);
            stds.push(var.sqrt());
        }
        Ok(Self { means, stds })
    }

    /// Fit on a single column given as a vector (used for targets).
    pub fn fit_1d(y: ArrayView1<f64>) -> Result<Self, SurrogateError> {
        Self::fit(y.insert_axis(ndarray::Axis(1)))
    }

    /// Rebuild from stored statistics.
    pub fn from_parts(means: Vec<f64>, stds: Vec<f64>) -> Self {
        debug_assert_eq!(means.len(), stds.len());
        Self { means, stds }
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn is_constant(&self, col: usize) -> bool {
        self.stds[col] == 0.0
    }

    fn check_cols(&self, ncols: usize) -> Result<(), SurrogateError> {
        if ncols != self.means.len() {
            return Err(SurrogateError::DimensionMismatch {
                expected: self.means.len(),
                got: ncols,
            });
        }
        Ok(())
    }

    /// `(x - mean) / std` per column; constant columns map to 0.
    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, SurrogateError> {
        self.check_cols(x.ncols())?;
        let mut out = x.to_owned();
        for (c, mut col) in out.columns_mut().into_iter().enumerate() {
            let (m, s) = (self.means[c], self.stds[c]);
            if s == 0.0 {
                col.fill(0.0);
            } else {
                col.mapv_inplace(|v| (v - m) / s);
            }
        }
        Ok(out)
    }

    /// Inverse of [`Self::transform`]; constant columns return their mean.
    pub fn inverse(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, SurrogateError> {
        self.check_cols(x.ncols())?;
        let mut out = x.to_owned();
        for (c, mut col) in out.columns_mut().into_iter().enumerate() {
            let (m, s) = (self.means[c], self.stds[c]);
            if s == 0.0 {
                col.fill(m);
            } else {
                col.mapv_inplace(|v| v * s + m);
            }
        }
        Ok(out)
    }

    /// Transform a vector through a single-column scaler in place.
    pub fn transform_1d_mut(&self, y: &mut Array1<f64>) {
        let (m, s) = (self.means[0], self.stds[0]);
        if s == 0.0 {
            y.fill(0.0);
        } else {
            y.mapv_inplace(|v| (v - m) / s);
        }
    }

    /// Inverse-transform a vector through a single-column scaler in place.
    pub fn inverse_1d_mut(&self, y: &mut Array1<f64>) {
        let (m, s) = (self.means[0], self.stds[0]);
        if s == 0.0 {
            y.fill(m);
        } else {
            y.mapv_inplace(|v| v * s + m);
        }
    }
}
