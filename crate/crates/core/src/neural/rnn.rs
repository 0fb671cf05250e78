//! Plain tanh recurrence, kept for comparison with the LSTM cell. None of
//! the five forecasting models use it.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RnnCell {
    /// `input_width x state` map applied to each step.
    pub input_map: Array2<f64>,
    /// `state x state` recurrent map.
    pub recurrent_map: Array2<f64>,
    pub intercept: Array1<f64>,
}

impl RnnCell {
    /// Iterates `f_l = tanh(W' z_l + U f_{l-1} + b)` from a zero initial
    /// state and returns the final state.
    pub fn forward(&self, steps: &[Array2<f64>]) -> Result<Array2<f64>> {
        if steps.is_empty() {
            return Err(Error::shape("RNN needs at least one step".to_string()));
        }
        let p = self.input_map.ncols();
        let batch = steps[0].nrows();
        let mut state = Array2::zeros((batch, p));
        for (l, step) in steps.iter().enumerate() {
            if step.ncols() != self.input_map.nrows() || step.nrows() != batch {
                return Err(Error::shape(format!("RNN step {l} has wrong shape")));
            }
            let mut pre = step.dot(&self.input_map);
            general_mat_mul(1.0, &state, &self.recurrent_map.t(), 1.0, &mut pre);
            for mut row in pre.rows_mut() {
                row += &self.intercept;
            }
            pre.mapv_inplace(f64::tanh);
            state = pre;
        }
        Ok(state)
    }
}
