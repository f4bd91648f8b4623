//! Mini-batch Adam training with the adaptive learning-rate policy.

use super::mlp::{adam_step, AdamState, Mlp};
use super::scaler::Scaler;
use super::{metrics, SurrogateError, TrainedSurrogate};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Training hyperparameters. The defaults are the tuned values this project
/// ships with; note the unusual moment decays (beta1 > beta2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// L2 penalty coefficient on weights.
    pub alpha: f64,
    /// First-moment exponential decay factor.
    pub beta1: f64,
    /// Second-moment exponential decay factor.
    pub beta2: f64,
    /// Initial learning rate; decays adaptively, see [`AdaptiveLr`].
    pub lr0: f64,
    pub max_epochs: usize,
    pub batch_size: usize,
    /// Minimum epoch-loss improvement that counts as progress.
    pub tol: f64,
    /// Numerical stability factor in the Adam denominator.
    pub eps: f64,
    /// Hidden layer widths; input and output sizes come from the data.
    pub hidden_sizes: Vec<usize>,
    /// Seed for weight initialization, epoch shuffling and the data split.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0001,
            beta1: 0.95,
            beta2: 0.90,
            lr0: 0.0009,
            max_epochs: 200,
            batch_size: 200,
            tol: 1e-6,
            eps: 1e-9,
            // a wide single hidden layer fits the additive cost surfaces
            // far faster within the 200-epoch budget than deeper stacks
            hidden_sizes: vec![256],
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SurrogateError> {
        let ok = (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.lr0 > 0.0
            && self.batch_size >= 1
            && self.tol > 0.0
            && self.eps > 0.0
            && self.max_epochs >= 1;
        if ok {
            Ok(())
        } else {
            Err(SurrogateError::BadLayerSizes(
                "invalid training hyperparameters".into(),
            ))
        }
    }

    /// Full layer-size list for a given feature count.
    pub fn layer_sizes(&self, input: usize) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.hidden_sizes.len() + 2);
        sizes.push(input);
        sizes.extend_from_slice(&self.hidden_sizes);
        sizes.push(1);
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEpochs,
    TolConverged,
}

/// Per-epoch record of a training run. Losses are on scaled targets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub loss_history: Vec<f64>,
    pub r2_train: f64,
    pub r2_test: f64,
    pub epochs_run: usize,
    pub final_lr: f64,
    pub stop_reason: StopReason,
}

/// Learning-rate schedule: divide by 5 once the epoch loss has failed to
/// improve by at least `tol` for 2 consecutive epochs; give up entirely once
/// the rate falls below 1e-8.
#[derive(Debug, Clone)]
pub struct AdaptiveLr {
    lr: f64,
    tol: f64,
    best: f64,
    stagnant: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LrDecision {
    Continue,
    /// Rate was just divided; the new value is attached.
    Reduced(f64),
    /// Rate fell below the floor with no progress; stop training.
    Stop,
}

const LR_FLOOR: f64 = 1e-8;
const LR_DIVISOR: f64 = 5.0;
const STAGNANT_EPOCHS: u32 = 2;

impl AdaptiveLr {
    pub fn new(lr0: f64, tol: f64) -> Self {
        Self {
            lr: lr0,
            tol,
            best: f64::INFINITY,
            stagnant: 0,
        }
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    /// Feed one epoch-mean loss and get the scheduling decision.
    pub fn observe(&mut self, epoch_loss: f64) -> LrDecision {
        let improved = epoch_loss <= self.best - self.tol;
        if epoch_loss < self.best {
            self.best = epoch_loss;
        }
        if improved {
            self.stagnant = 0;
            return LrDecision::Continue;
        }
        self.stagnant += 1;
        if self.stagnant < STAGNANT_EPOCHS {
            return LrDecision::Continue;
        }
        self.stagnant = 0;
        self.lr /= LR_DIVISOR;
        if self.lr < LR_FLOOR {
            LrDecision::Stop
        } else {
            LrDecision::Reduced(self.lr)
        }
    }
}

/// A feature matrix with its target vector.
#[derive(Debug, Clone)]
pub struct RegressionData {
    x: Array2<f64>,
    y: Array1<f64>,
}

impl RegressionData {
    pub fn new(x: Array2<f64>, y: Array1<f64>) -> Result<Self, SurrogateError> {
        if x.nrows() == 0 {
            return Err(SurrogateError::EmptyInput);
        }
        if x.nrows() != y.len() {
            return Err(SurrogateError::LengthMismatch {
                left: x.nrows(),
                right: y.len(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fit scalers on the training split, run mini-batch Adam with the adaptive
/// learning-rate rule, and score R^2 on both splits in original target
/// units.
///
/// Epoch order is a seeded shuffle; batches of `cfg.batch_size` (the last
/// one may be short); the recorded epoch loss is the row-weighted mean of
/// the batch losses seen during that epoch.
pub fn train(
    model: Mlp,
    train_set: &RegressionData,
    test_set: &RegressionData,
    cfg: &TrainConfig,
) -> Result<(TrainedSurrogate, TrainReport), SurrogateError> {
    cfg.validate()?;
    let mut model = model;
    if model.input_size() != train_set.x.ncols() || test_set.x.ncols() != train_set.x.ncols() {
        return Err(SurrogateError::DimensionMismatch {
            expected: model.input_size(),
            got: train_set.x.ncols().max(test_set.x.ncols()),
        });
    }

    let x_scaler = Scaler::fit(train_set.x())?;
    let y_scaler = Scaler::fit_1d(train_set.y())?;
    let xs = x_scaler.transform(train_set.x())?;
    let mut ys = train_set.y.clone();
    y_scaler.transform_1d_mut(&mut ys);

    let n = xs.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = AdamState::new(&model);
    let mut schedule = AdaptiveLr::new(cfg.lr0, cfg.tol);
    let mut loss_history = Vec::new();
    let mut stop_reason = StopReason::MaxEpochs;

    for epoch in 1..=cfg.max_epochs {
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut loss_sum = 0.0;
        for (batch_idx, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let bx = xs.select(Axis(0), chunk);
            let by = ys.select(Axis(0), chunk);
            let (batch_loss, grads) =
                model.loss_and_gradients(bx.view(), by.view(), cfg.alpha)?;
            if !batch_loss.is_finite() {
                return Err(SurrogateError::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                });
            }
            adam_step(&mut model, &grads, &mut adam, schedule.lr(), cfg);
            loss_sum += batch_loss * chunk.len() as f64;
        }
        let epoch_loss = loss_sum / n as f64;
        loss_history.push(epoch_loss);
        if let LrDecision::Stop = schedule.observe(epoch_loss) {
            stop_reason = StopReason::TolConverged;
            break;
        }
    }

    let mut surrogate = TrainedSurrogate {
        model,
        x_scaler,
        y_scaler,
        train_config: cfg.clone(),
        r2_train: 0.0,
        r2_test: 0.0,
    };
    let pred_train = surrogate.predict(train_set.x())?;
    let pred_test = surrogate.predict(test_set.x())?;
    surrogate.r2_train = metrics::r2(
        train_set.y.as_slice().unwrap(),
        pred_train.as_slice().unwrap(),
    )?
    .value;
    surrogate.r2_test = metrics::r2(
        test_set.y.as_slice().unwrap(),
        pred_test.as_slice().unwrap(),
    )?
    .value;

    let epochs_run = loss_history.len();
    let report = TrainReport {
        loss_history,
        r2_train: surrogate.r2_train,
        r2_test: surrogate.r2_test,
        epochs_run,
        final_lr: schedule.lr(),
        stop_reason,
    };
    Ok((surrogate, report))
}
