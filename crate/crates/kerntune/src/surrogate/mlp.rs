//! Fully connected regression network: ReLU hidden layers, identity output,
//! mean-squared-error loss with an L2 weight penalty, analytic
//! backpropagation and the Adam update.

use super::train::TrainConfig;
use super::SurrogateError;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Subgradient with the derivative at exactly 0 defined as 0.
fn relu_prime(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// (activations including the input, pre-activations per layer).
type LayerCache = (Vec<Array2<f64>>, Vec<Array2<f64>>);

/// The network. Weight matrices are `(fan_in, fan_out)`; the single output
/// neuron has no activation.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layer_sizes: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

/// Per-parameter gradients with the same shapes as the model.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Mlp {
    /// He-style initialization: weights drawn from N(0, 2/fan_in), biases
    /// zero. ChaCha8 seeded from `seed`, so identical seeds give identical
    /// models.
    pub fn init(layer_sizes: &[usize], seed: u64) -> Result<Self, SurrogateError> {
        Self::check_sizes(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let dist = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("finite std");
            weights.push(Array2::from_shape_fn((fan_in, fan_out), |_| {
                dist.sample(&mut rng)
            }));
            biases.push(Array1::zeros(fan_out));
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    /// Build from explicit parameters (hand-constructed nets, tests).
    pub fn from_parts(
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
    ) -> Result<Self, SurrogateError> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(SurrogateError::BadLayerSizes(
                "need one weight matrix and one bias vector per layer".into(),
            ));
        }
        let mut layer_sizes = vec![weights[0].nrows()];
        for (w, b) in weights.iter().zip(&biases) {
            if w.nrows() != *layer_sizes.last().unwrap() || w.ncols() != b.len() {
                return Err(SurrogateError::BadLayerSizes(
                    "adjacent layer dimensions are inconsistent".into(),
                ));
            }
            layer_sizes.push(w.ncols());
        }
        Self::check_sizes(&layer_sizes)?;
        Ok(Self {
            layer_sizes,
            weights,
            biases,
        })
    }

    fn check_sizes(sizes: &[usize]) -> Result<(), SurrogateError> {
        if sizes.len() < 2 {
            return Err(SurrogateError::BadLayerSizes(
                "need at least input and output layers".into(),
            ));
        }
        if sizes.contains(&0) {
            return Err(SurrogateError::BadLayerSizes("layer of size 0".into()));
        }
        if *sizes.last().unwrap() != 1 {
            return Err(SurrogateError::BadLayerSizes(
                "output layer must have size 1".into(),
            ));
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    /// Mutable parameter access. Shapes must be preserved.
    pub fn params_mut(&mut self) -> (&mut [Array2<f64>], &mut [Array1<f64>]) {
        (&mut self.weights, &mut self.biases)
    }

    /// Single-sample forward pass: affine maps with ReLU between them,
    /// identity on the output.
    pub fn forward(&self, x: ArrayView1<f64>) -> Result<f64, SurrogateError> {
        if x.len() != self.input_size() {
            return Err(SurrogateError::DimensionMismatch {
                expected: self.input_size(),
                got: x.len(),
            });
        }
        let last = self.weights.len() - 1;
        let mut h = x.to_owned();
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut z = h.dot(w) + b;
            if l != last {
                z.mapv_inplace(relu);
            }
            h = z;
        }
        Ok(h[0])
    }

    /// Batched forward pass returning one prediction per row.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<Array1<f64>, SurrogateError> {
        let (acts, _) = self.forward_cached(x)?;
        Ok(acts.last().unwrap().index_axis(Axis(1), 0).to_owned())
    }

    /// Forward pass keeping activations and pre-activations for backprop.
    /// Returns (activations including input, pre-activations per layer).
    fn forward_cached(&self, x: ArrayView2<f64>) -> Result<LayerCache, SurrogateError> {
        if x.ncols() != self.input_size() {
            return Err(SurrogateError::DimensionMismatch {
                expected: self.input_size(),
                got: x.ncols(),
            });
        }
        let last = self.weights.len() - 1;
        let mut acts = vec![x.to_owned()];
        let mut pre = Vec::with_capacity(self.weights.len());
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = acts.last().unwrap().dot(w) + b;
            pre.push(z.clone());
            let a = if l != last { z.mapv(relu) } else { z };
            acts.push(a);
        }
        Ok((acts, pre))
    }

    fn check_batch(
        &self,
        x: ArrayView2<f64>,
        y: ArrayView1<f64>,
    ) -> Result<(), SurrogateError> {
        if x.nrows() == 0 {
            return Err(SurrogateError::EmptyInput);
        }
        if x.nrows() != y.len() {
            return Err(SurrogateError::LengthMismatch {
                left: x.nrows(),
                right: y.len(),
            });
        }
        Ok(())
    }

    /// Batch loss: mean squared error plus
    /// `alpha * sum(||W||_F^2) / (2 * rows)`; biases carry no penalty.
    pub fn loss(
        &self,
        x: ArrayView2<f64>,
        y: ArrayView1<f64>,
        alpha: f64,
    ) -> Result<f64, SurrogateError> {
        self.check_batch(x, y)?;
        let preds = self.forward_batch(x)?;
        Ok(self.loss_given_preds(&preds, y, alpha))
    }

    fn loss_given_preds(&self, preds: &Array1<f64>, y: ArrayView1<f64>, alpha: f64) -> f64 {
        let n = y.len() as f64;
        let mse = preds
            .iter()
            .zip(y)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>()
            / n;
        let penalty = if alpha == 0.0 {
            0.0
        } else {
            alpha * self.weights.iter().map(|w| w.iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
                / (2.0 * n)
        };
        mse + penalty
    }

    /// Analytic gradient of [`Self::loss`] via backpropagation.
    pub fn gradients(
        &self,
        x: ArrayView2<f64>,
        y: ArrayView1<f64>,
        alpha: f64,
    ) -> Result<Gradients, SurrogateError> {
        Ok(self.loss_and_gradients(x, y, alpha)?.1)
    }

    /// Loss and its gradient from one shared forward/backward pass.
    pub fn loss_and_gradients(
        &self,
        x: ArrayView2<f64>,
        y: ArrayView1<f64>,
        alpha: f64,
    ) -> Result<(f64, Gradients), SurrogateError> {
        self.check_batch(x, y)?;
        let (acts, pre) = self.forward_cached(x)?;
        let n = y.len() as f64;
        let preds = acts.last().unwrap().index_axis(Axis(1), 0).to_owned();
        let loss = self.loss_given_preds(&preds, y, alpha);

        let layers = self.weights.len();
        let mut grad_w = vec![Array2::zeros((0, 0)); layers];
        let mut grad_b = vec![Array1::zeros(0); layers];

        // d(mse)/d(pred) = 2 (pred - y) / n
        let mut delta = (&preds - &y).insert_axis(Axis(1)) * (2.0 / n);
        for l in (0..layers).rev() {
            grad_w[l] = acts[l].t().dot(&delta);
            if alpha != 0.0 {
                grad_w[l].scaled_add(alpha / n, &self.weights[l]);
            }
            grad_b[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&self.weights[l].t());
                back.zip_mut_with(&pre[l - 1], |d, z| *d *= relu_prime(*z));
                delta = back;
            }
        }
        Ok((
            loss,
            Gradients {
                weights: grad_w,
                biases: grad_b,
            },
        ))
    }
}

/// First and second moment estimates plus the step counter for Adam.
#[derive(Debug, Clone)]
pub struct AdamState {
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
    t: u64,
}

impl AdamState {
    pub fn new(model: &Mlp) -> Self {
        Self {
            m_w: model.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            v_w: model.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            m_b: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            v_b: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam step at learning rate `lr`:
/// `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`,
/// `theta <- theta - lr * (m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)`.
///
/// The step index `t` is tracked inside `state` and starts at 1.
pub fn adam_step(model: &mut Mlp, grads: &Gradients, state: &mut AdamState, lr: f64, cfg: &TrainConfig) {
    state.t += 1;
    let t = state.t as i32;
    let (b1, b2, eps) = (cfg.beta1, cfg.beta2, cfg.eps);
    let bc1 = 1.0 - b1.powi(t);
    let bc2 = 1.0 - b2.powi(t);

    fn update(theta: &mut f64, g: f64, m: &mut f64, v: &mut f64, b1: f64, b2: f64, bc1: f64, bc2: f64, lr: f64, eps: f64) {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *theta -= lr * m_hat / (v_hat.sqrt() + eps);
    }

    for l in 0..model.weights.len() {
        ndarray::Zip::from(&mut model.weights[l])
            .and(&grads.weights[l])
            .and(&mut state.m_w[l])
            .and(&mut state.v_w[l])
            .for_each(|th, &g, m, v| update(th, g, m, v, b1, b2, bc1, bc2, lr, eps));
        ndarray::Zip::from(&mut model.biases[l])
            .and(&grads.biases[l])
            .and(&mut state.m_b[l])
            .and(&mut state.v_b[l])
            .for_each(|th, &g, m, v| update(th, g, m, v, b1, b2, bc1, bc2, lr, eps));
    }
}
