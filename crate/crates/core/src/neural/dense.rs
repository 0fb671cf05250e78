//! Dense ReLu stack with a single-valued linear output layer.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::neural::params::{InitKind, ParamLayout};

/// Shape of a stack: `layers` hidden layers of `hidden` nodes each on top of
/// an `input`-wide predictor row, ending in one linear output node.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DenseDims {
    pub input: usize,
    pub hidden: usize,
    pub layers: usize,
}

impl DenseDims {
    /// Closed-form scalar count: `(input+1)n + (Q-1)(n+1)n + (n+1)`.
    pub fn param_count(&self) -> usize {
        (self.input + 1) * self.hidden
            + (self.layers - 1) * (self.hidden + 1) * self.hidden
            + self.hidden
            + 1
    }
}

/// Layout handles for one stack: `weights[i]`/`biases[i]` map layer `i` to
/// layer `i+1`, the last pair being the output node.
#[derive(Clone, Debug)]
pub struct DenseHandles {
    pub dims: DenseDims,
    pub weights: Vec<usize>,
    pub biases: Vec<usize>,
}

/// Registers a dense stack on a layout. Weight `i` is stored `out x in`.
pub fn dense_layout(layout: &mut ParamLayout, prefix: &str, dims: DenseDims) -> DenseHandles {
    assert!(dims.layers >= 1 && dims.hidden >= 1 && dims.input >= 1);
    let mut weights = Vec::with_capacity(dims.layers + 1);
    let mut biases = Vec::with_capacity(dims.layers + 1);
    for i in 0..=dims.layers {
        let fan_in = if i == 0 { dims.input } else { dims.hidden };
        let fan_out = if i == dims.layers { 1 } else { dims.hidden };
        weights.push(layout.push(
            format!("{prefix}.w{}", i + 1),
            fan_out,
            fan_in,
            InitKind::Glorot { fan_in, fan_out },
        ));
        biases.push(layout.push(format!("{prefix}.b{}", i + 1), fan_out, 1, InitKind::Zero));
    }
    DenseHandles {
        dims,
        weights,
        biases,
    }
}

/// Hidden activations `a^1..a^Q`; the caller retains `a^0` (the input).
#[derive(Clone, Debug)]
pub struct DenseCache {
    pub hidden: Vec<Array2<f64>>,
}

fn affine(input: ArrayView2<f64>, w: ArrayView2<f64>, b: ArrayView1<f64>) -> Array2<f64> {
    let mut out = input.dot(&w.t());
    for mut row in out.rows_mut() {
        row += &b;
    }
    out
}

/// Forward pass over a batch of rows; returns per-row predictions and the
/// activation cache for backprop.
pub fn dense_forward(
    params: &[f64],
    layout: &ParamLayout,
    handles: &DenseHandles,
    input: ArrayView2<f64>,
) -> Result<(Array1<f64>, DenseCache)> {
    if input.ncols() != handles.dims.input {
        return Err(Error::shape(format!(
            "dense input width {} does not match stack input {}",
            input.ncols(),
            handles.dims.input
        )));
    }
    let q = handles.dims.layers;
    let mut hidden: Vec<Array2<f64>> = Vec::with_capacity(q);
    for i in 0..q {
        let w = layout.view(handles.weights[i], params);
        let b = layout.view1(handles.biases[i], params);
        let below = if i == 0 { input.view() } else { hidden[i - 1].view() };
        let mut a = affine(below, w, b);
        a.mapv_inplace(|v| v.max(0.0));
        hidden.push(a);
    }
    let w_out = layout.view(handles.weights[q], params);
    let b_out = layout.view1(handles.biases[q], params);
    let top = if q == 0 { input.view() } else { hidden[q - 1].view() };
    let out = affine(top, w_out, b_out);
    Ok((out.column(0).to_owned(), DenseCache { hidden }))
}

/// Backward pass. `output_grad[k]` is `dL/d(prediction_k)`. Parameter
/// gradients accumulate into `grad`; the return value is `dL/d(input)`
/// when `need_input_grad` is set (used by composite models), else `None`.
///
/// The ReLu subgradient at exactly zero is taken as zero.
#[allow(clippy::too_many_arguments)]
pub fn dense_backward(
    params: &[f64],
    layout: &ParamLayout,
    handles: &DenseHandles,
    input: ArrayView2<f64>,
    cache: &DenseCache,
    output_grad: ArrayView1<f64>,
    grad: &mut [f64],
    need_input_grad: bool,
) -> Option<Array2<f64>> {
    let q = handles.dims.layers;
    let batch = input.nrows();

    // Output layer: delta is B x 1.
    let mut delta: Array2<f64> = output_grad.to_owned().insert_axis(Axis(1));
    for i in (0..=q).rev() {
        let below = if i == 0 { input.view() } else { cache.hidden[i - 1].view() };
        {
            let mut dw = layout.view_mut(handles.weights[i], grad);
            general_mat_mul(1.0, &delta.t(), &below, 1.0, &mut dw);
        }
        {
            let db = layout.slice_mut(handles.biases[i], grad);
            for (j, col) in delta.axis_iter(Axis(1)).enumerate() {
                db[j] += col.sum();
            }
        }
        if i == 0 && !need_input_grad {
            return None;
        }
        let w = layout.view(handles.weights[i], params);
        let mut next = Array2::zeros((batch, w.ncols()));
        general_mat_mul(1.0, &delta, &w, 0.0, &mut next);
        if i > 0 {
            // Gate by the ReLu mask of the layer below.
            next.zip_mut_with(&cache.hidden[i - 1], |d, a| {
                if *a <= 0.0 {
                    *d = 0.0;
                }
            });
        }
        delta = next;
    }
    Some(delta)
}
