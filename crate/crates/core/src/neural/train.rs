//! Deterministic training loop: seeded Glorot init, epoch shuffling, batch
//! partitioning and Adam updates.

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::adam::AdamState;
use crate::neural::params::ParamLayout;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchSize {
    Fixed(usize),
    /// One full-sample batch per epoch (batch gradient descent); epoch
    /// shuffling is skipped since the update is order-invariant.
    Max,
}

impl BatchSize {
    pub fn resolve(&self, rows: usize) -> usize {
        match *self {
            BatchSize::Fixed(b) => b.min(rows),
            BatchSize::Max => rows,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch: BatchSize,
    pub seed: u64,
    pub learning_rate: f64,
}

impl TrainConfig {
    pub fn new(epochs: usize, batch: BatchSize, seed: u64) -> Self {
        TrainConfig {
            epochs,
            batch,
            seed,
            learning_rate: 1e-3,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Training("epochs must be at least 1".to_string()));
        }
        if let BatchSize::Fixed(0) = self.batch {
            return Err(Error::Training("batch size must be at least 1".to_string()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Training(format!(
                "bad learning rate {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// A differentiable forecaster over flat-row inputs.
///
/// `prepare` turns a batch of flat rows into whatever per-step or per-block
/// form the architecture consumes, so full-batch training pays the wiring
/// cost once rather than per epoch.
pub trait Model {
    type Prepared;
    type Cache;

    fn layout(&self) -> &ParamLayout;

    fn prepare(&self, inputs: ArrayView2<f64>) -> Result<Self::Prepared>;

    /// Predictions for a prepared batch; a cache is returned only when
    /// requested for a following backward pass.
    fn forward(
        &self,
        params: &[f64],
        prepared: &Self::Prepared,
        with_cache: bool,
    ) -> Result<(Array1<f64>, Option<Self::Cache>)>;

    /// Gradient of the scalar loss whose per-prediction derivative is
    /// `output_grad`, with respect to every parameter.
    fn backward(
        &self,
        params: &[f64],
        prepared: &Self::Prepared,
        cache: &Self::Cache,
        output_grad: ArrayView1<f64>,
    ) -> Result<Vec<f64>>;
}

/// Convenience: predictions for unprepared rows, no cache.
pub fn predict_batch<M: Model>(model: &M, params: &[f64], inputs: ArrayView2<f64>) -> Result<Array1<f64>> {
    let prepared = model.prepare(inputs)?;
    Ok(model.forward(params, &prepared, false)?.0)
}

/// Mean-squared-error gradient of a minibatch: loss and `dL/d prediction`.
fn mse_and_grad(predictions: &Array1<f64>, targets: ArrayView1<f64>) -> (f64, Array1<f64>) {
    let n = predictions.len() as f64;
    let residual = predictions - &targets;
    let loss = residual.iter().map(|r| r * r).sum::<f64>() / n;
    (loss, residual * (2.0 / n))
}

/// Gradient of the minibatch MSE at `params`.
pub fn loss_gradient<M: Model>(
    model: &M,
    params: &[f64],
    prepared: &M::Prepared,
    targets: ArrayView1<f64>,
) -> Result<(f64, Vec<f64>)> {
    let (predictions, cache) = model.forward(params, prepared, true)?;
    let cache = cache.expect("cache requested");
    let (loss, output_grad) = mse_and_grad(&predictions, targets);
    let grad = model.backward(params, prepared, &cache, output_grad.view())?;
    Ok((loss, grad))
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub params: Vec<f64>,
    /// Training MSE per epoch, averaged over the epoch's batches
    /// (evaluated before each update).
    pub loss_history: Vec<f64>,
}

/// Draws Glorot initial parameters for a model from one seed.
pub fn init_params<M: Model>(model: &M, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    model.layout().init(&mut rng)
}

/// Trains by minimizing the training MSE with Adam. The run is fully
/// determined by `(seed, config, data)`.
pub fn train<M: Model>(
    model: &M,
    inputs: ArrayView2<f64>,
    targets: ArrayView1<f64>,
    config: &TrainConfig,
) -> Result<TrainResult> {
    config.validate()?;
    let rows = inputs.nrows();
    if rows == 0 {
        return Err(Error::Training("empty training set".to_string()));
    }
    if targets.len() != rows {
        return Err(Error::shape(format!(
            "{rows} input rows vs {} targets",
            targets.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = model.layout().init(&mut rng);
    let mut adam = AdamState::new(params.len(), config.learning_rate);
    let batch_size = config.batch.resolve(rows);
    let full_batch = batch_size >= rows;
    let mut loss_history = Vec::with_capacity(config.epochs);

    let full_prepared = if full_batch { Some(model.prepare(inputs)?) } else { None };
    let mut order: Vec<usize> = (0..rows).collect();

    for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0;
        if let Some(prepared) = &full_prepared {
            let (loss, grad) = loss_gradient(model, &params, prepared, targets)?;
            check_finite(loss, epoch)?;
            adam.step(&mut params, &grad);
            epoch_loss = loss;
        } else {
            order.shuffle(&mut rng);
            let mut seen = 0usize;
            for chunk in order.chunks(batch_size) {
                let batch_inputs = inputs.select(Axis(0), chunk);
                let batch_targets: Array1<f64> =
                    Array1::from_iter(chunk.iter().map(|&i| targets[i]));
                let prepared = model.prepare(batch_inputs.view())?;
                let (loss, grad) =
                    loss_gradient(model, &params, &prepared, batch_targets.view())?;
                check_finite(loss, epoch)?;
                adam.step(&mut params, &grad);
                epoch_loss += loss * chunk.len() as f64;
                seen += chunk.len();
            }
            epoch_loss /= seen as f64;
        }
        loss_history.push(epoch_loss);
    }

    Ok(TrainResult {
        params,
        loss_history,
    })
}

fn check_finite(loss: f64, epoch: usize) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Training(format!(
            "non-finite loss at epoch {epoch}; lower the learning rate or rescale inputs"
        )))
    }
}
