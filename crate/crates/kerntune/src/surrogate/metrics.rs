//! Coefficient of determination.

use super::SurrogateError;

/// R^2 together with a degenerate-variance marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R2Score {
    pub value: f64,
    /// True when the actual values have zero variance, in which case the
    /// score is reported as 0 by convention.
    pub degenerate: bool,
}

/// `1 - sum((y_i - yhat_i)^2) / sum((y_i - ybar)^2)`.
///
/// A zero denominator (constant actuals) yields 0 with the degenerate flag
/// set rather than a division by zero.
pub fn r2(actual: &[f64], predicted: &[f64]) -> Result<R2Score, SurrogateError> {
    if actual.is_empty() {
        return Err(SurrogateError::EmptyInput);
    }
    if actual.len() != predicted.len() {
        return Err(SurrogateError::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    let ss_tot: f64 = actual.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Ok(R2Score {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(R2Score {
        value: 1.0 - ss_res / ss_tot,
        degenerate: false,
    })
}
