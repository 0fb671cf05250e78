//! Picking one instance out of an ensemble by validation error.

use ndarray::{ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::models::AssembledModel;
use crate::neural::predict_batch;

/// One trained initialization of a model.
#[derive(Clone, Debug)]
pub struct TrainedInstance {
    pub seed: u64,
    pub params: Vec<f64>,
}

/// Returns the index of the instance with the lowest RMSE over the given
/// validation rows. Ties break toward the lowest seed.
pub fn select_by_validation(
    model: &AssembledModel,
    instances: &[TrainedInstance],
    inputs: ArrayView2<f64>,
    targets: ArrayView1<f64>,
) -> Result<usize> {
    if instances.is_empty() {
        return Err(Error::validation("no instances to select from".to_string()));
    }
    let mut best: Option<(usize, f64, u64)> = None;
    for (idx, inst) in instances.iter().enumerate() {
        let preds = predict_batch(model, &inst.params, inputs)?;
        let mse = preds
            .iter()
            .zip(targets.iter())
            .map(|(p, y)| (p - y) * (p - y))
            .sum::<f64>()
            / targets.len() as f64;
        let rmse = mse.sqrt();
        let better = match best {
            None => true,
            Some((_, b_rmse, b_seed)) => {
                rmse < b_rmse || (rmse == b_rmse && inst.seed < b_seed)
            }
        };
        if better {
            best = Some((idx, rmse, inst.seed));
        }
    }
    Ok(best.unwrap().0)
}
