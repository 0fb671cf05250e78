//! LSTM cell: many-to-one forward pass and backpropagation through time.
//!
//! Gate roles follow the usual filter reading: `out` controls what part of
//! the cell state is exposed, `forget` what past cell state to retain,
//! `inp` what new information to admit, and `cand` is the tanh candidate.
//! Input maps are stored `input_width x state`, recurrent maps
//! `state x state`, so a batch step is
//! `pre = Z . W + F_prev . U^T + b` for each gate.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::neural::params::{InitKind, ParamLayout};

pub const GATE_NAMES: [&str; 4] = ["cand", "out", "forget", "inp"];

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct LstmDims {
    /// Width of one time-step input vector.
    pub input: usize,
    /// State size p.
    pub state: usize,
}

impl LstmDims {
    /// Closed-form scalar count `4(Np + p^2 + p)`.
    pub fn param_count(&self) -> usize {
        4 * (self.input * self.state + self.state * self.state + self.state)
    }
}

/// Layout handles: `w[g]`, `u[g]`, `b[g]` for gate `g` in [`GATE_NAMES`] order.
#[derive(Clone, Debug)]
pub struct LstmHandles {
    pub dims: LstmDims,
    pub w: [usize; 4],
    pub u: [usize; 4],
    pub b: [usize; 4],
}

pub fn lstm_layout(layout: &mut ParamLayout, prefix: &str, dims: LstmDims) -> LstmHandles {
    assert!(dims.input >= 1 && dims.state >= 1);
    let mut w = [0; 4];
    let mut u = [0; 4];
    let mut b = [0; 4];
    for (g, gate) in GATE_NAMES.iter().enumerate() {
        w[g] = layout.push(
            format!("{prefix}.w_{gate}"),
            dims.input,
            dims.state,
            InitKind::Glorot {
                fan_in: dims.input,
                fan_out: dims.state,
            },
        );
        u[g] = layout.push(
            format!("{prefix}.u_{gate}"),
            dims.state,
            dims.state,
            InitKind::Glorot {
                fan_in: dims.state,
                fan_out: dims.state,
            },
        );
        b[g] = layout.push(format!("{prefix}.b_{gate}"), dims.state, 1, InitKind::Zero);
    }
    LstmHandles { dims, w, u, b }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-step values kept for BPTT. `state[l]`/`cell[l]` hold `f_l`/`c_l`
/// with index 0 being the zero initial state.
#[derive(Clone, Debug)]
pub struct LstmCache {
    pub state: Vec<Array2<f64>>,
    pub cell: Vec<Array2<f64>>,
    pub out: Vec<Array2<f64>>,
    pub forget: Vec<Array2<f64>>,
    pub inp: Vec<Array2<f64>>,
    pub cand: Vec<Array2<f64>>,
    pub tanh_cell: Vec<Array2<f64>>,
}

fn gate_preactivation(
    params: &[f64],
    layout: &ParamLayout,
    handles: &LstmHandles,
    gate: usize,
    step: ArrayView2<f64>,
    state_prev: &Array2<f64>,
) -> Array2<f64> {
    let w = layout.view(handles.w[gate], params);
    let u = layout.view(handles.u[gate], params);
    let b = layout.view1(handles.b[gate], params);
    let mut pre = step.dot(&w);
    general_mat_mul(1.0, state_prev, &u.t(), 1.0, &mut pre);
    for mut row in pre.rows_mut() {
        row += &b;
    }
    pre
}

/// Runs the cell over `steps` (oldest first, exactly L entries, each
/// `batch x input`) from zero initial state; returns the final internal
/// memory `f_{t|L}` and the cache.
pub fn lstm_forward(
    params: &[f64],
    layout: &ParamLayout,
    handles: &LstmHandles,
    steps: &[Array2<f64>],
) -> Result<(Array2<f64>, LstmCache)> {
    if steps.is_empty() {
        return Err(Error::shape("LSTM needs at least one step".to_string()));
    }
    let batch = steps[0].nrows();
    let p = handles.dims.state;
    for (l, s) in steps.iter().enumerate() {
        if s.ncols() != handles.dims.input || s.nrows() != batch {
            return Err(Error::shape(format!(
                "step {l} is {}x{}, expected {}x{}",
                s.nrows(),
                s.ncols(),
                batch,
                handles.dims.input
            )));
        }
    }

    let len = steps.len();
    let mut cache = LstmCache {
        state: Vec::with_capacity(len + 1),
        cell: Vec::with_capacity(len + 1),
        out: Vec::with_capacity(len),
        forget: Vec::with_capacity(len),
        inp: Vec::with_capacity(len),
        cand: Vec::with_capacity(len),
        tanh_cell: Vec::with_capacity(len),
    };
    cache.state.push(Array2::zeros((batch, p)));
    cache.cell.push(Array2::zeros((batch, p)));

    for step in steps {
        let state_prev = cache.state.last().unwrap().clone();
        let cell_prev = cache.cell.last().unwrap().clone();

        let mut cand = gate_preactivation(params, layout, handles, 0, step.view(), &state_prev);
        cand.mapv_inplace(f64::tanh);
        let mut out = gate_preactivation(params, layout, handles, 1, step.view(), &state_prev);
        out.mapv_inplace(sigmoid);
        let mut forget = gate_preactivation(params, layout, handles, 2, step.view(), &state_prev);
        forget.mapv_inplace(sigmoid);
        let mut inp = gate_preactivation(params, layout, handles, 3, step.view(), &state_prev);
        inp.mapv_inplace(sigmoid);

        let cell = &forget * &cell_prev + &inp * &cand;
        let tanh_cell = cell.mapv(f64::tanh);
        let state = &out * &tanh_cell;

        cache.out.push(out);
        cache.forget.push(forget);
        cache.inp.push(inp);
        cache.cand.push(cand);
        cache.tanh_cell.push(tanh_cell);
        cache.cell.push(cell);
        cache.state.push(state);
    }

    Ok((cache.state.last().unwrap().clone(), cache))
}

/// Backpropagation through time across all steps. `state_grad` is
/// `dL/d f_{t|L}` (`batch x state`); parameter gradients accumulate into
/// `grad`.
pub fn lstm_backward(
    params: &[f64],
    layout: &ParamLayout,
    handles: &LstmHandles,
    steps: &[Array2<f64>],
    cache: &LstmCache,
    state_grad: Array2<f64>,
    grad: &mut [f64],
) {
    let p = handles.dims.state;
    let batch = state_grad.nrows();
    let mut d_state = state_grad;
    let mut d_cell = Array2::zeros((batch, p));

    for l in (0..steps.len()).rev() {
        let out = &cache.out[l];
        let forget = &cache.forget[l];
        let inp = &cache.inp[l];
        let cand = &cache.cand[l];
        let tanh_cell = &cache.tanh_cell[l];
        let state_prev = &cache.state[l];
        let cell_prev = &cache.cell[l];

        // f = out ⊙ tanh(c)
        let d_out = &d_state * tanh_cell;
        let mut d_cell_total = &d_state * out;
        d_cell_total.zip_mut_with(tanh_cell, |d, &t| *d *= 1.0 - t * t);
        d_cell_total += &d_cell;

        // c = forget ⊙ c_prev + inp ⊙ cand
        let d_forget = &d_cell_total * cell_prev;
        let d_inp = &d_cell_total * cand;
        let mut d_cand = &d_cell_total * inp;
        d_cell = &d_cell_total * forget;

        // Through the activations to the pre-activations.
        let d_pre = [
            {
                d_cand.zip_mut_with(cand, |d, &g| *d *= 1.0 - g * g);
                d_cand
            },
            {
                let mut d = d_out;
                d.zip_mut_with(out, |v, &g| *v *= g * (1.0 - g));
                d
            },
            {
                let mut d = d_forget;
                d.zip_mut_with(forget, |v, &g| *v *= g * (1.0 - g));
                d
            },
            {
                let mut d = d_inp;
                d.zip_mut_with(inp, |v, &g| *v *= g * (1.0 - g));
                d
            },
        ];

        let mut d_state_prev = Array2::zeros((batch, p));
        #[allow(clippy::needless_range_loop)] // g indexes four parallel handle arrays
        for g in 0..4 {
            {
                let mut dw = layout.view_mut(handles.w[g], grad);
                general_mat_mul(1.0, &steps[l].t(), &d_pre[g], 1.0, &mut dw);
            }
            {
                let mut du = layout.view_mut(handles.u[g], grad);
                general_mat_mul(1.0, &d_pre[g].t(), state_prev, 1.0, &mut du);
            }
            {
                let db = layout.slice_mut(handles.b[g], grad);
                for (j, col) in d_pre[g].axis_iter(Axis(1)).enumerate() {
                    db[j] += col.sum();
                }
            }
            let u = layout.view(handles.u[g], params);
            general_mat_mul(1.0, &d_pre[g], &u, 1.0, &mut d_state_prev);
        }
        d_state = d_state_prev;
    }
}
