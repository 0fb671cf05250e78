//! Wiring of the five architectures from the dense and LSTM primitives.

use ndarray::{concatenate, Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::models::{ModelKind, NetworkSpec};
use crate::neural::{
    dense_backward, dense_forward, dense_layout, lstm_backward, lstm_forward, lstm_layout,
    DenseCache, DenseDims, DenseHandles, LstmCache, LstmDims, LstmHandles, Model, ParamLayout,
};

/// A spec bound to a concrete parameter layout.
///
/// LSTM parameters (when present) come first in the flat vector, gate by
/// gate, followed by the dense stack layer by layer. The layout is a pure
/// function of the spec, so checkpoints transfer between identically
/// specified models.
#[derive(Clone, Debug)]
pub struct AssembledModel {
    spec: NetworkSpec,
    layout: ParamLayout,
    lstm: Option<LstmHandles>,
    dense: DenseHandles,
}

/// Batch inputs rearranged for one architecture: LSTM step sequence
/// (oldest first) and/or the dense block.
#[derive(Clone, Debug)]
pub enum PreparedInput {
    Dense(Array2<f64>),
    Sequence { steps: Vec<Array2<f64>>, rows: usize },
    Composite {
        steps: Vec<Array2<f64>>,
        w_input: Array2<f64>,
    },
}

impl PreparedInput {
    pub fn rows(&self) -> usize {
        match self {
            PreparedInput::Dense(m) => m.nrows(),
            PreparedInput::Sequence { rows, .. } => *rows,
            PreparedInput::Composite { w_input, .. } => w_input.nrows(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModelCache {
    dense: DenseCache,
    lstm: Option<LstmCache>,
    /// Owned dense input when it is not the prepared matrix itself
    /// (LSTM state, or `[w-lags | state]` for the composite model).
    dense_input: Option<Array2<f64>>,
}

impl AssembledModel {
    pub fn build(spec: NetworkSpec) -> Result<Self> {
        spec.validate()?;
        let mut layout = ParamLayout::new();
        let lstm = spec.state.map(|p| {
            let input = match spec.kind {
                ModelKind::LstmAll => spec.n_pool + spec.n_cpi,
                _ => spec.n_pool,
            };
            lstm_layout(&mut layout, "lstm", LstmDims { input, state: p })
        });
        let dense_input = match spec.kind {
            ModelKind::FfCpi => spec.n_cpi * spec.lags,
            ModelKind::FfPool => spec.n_pool * spec.lags,
            ModelKind::LstmPool | ModelKind::LstmAll => spec.state.unwrap(),
            ModelKind::FfLstm => spec.state.unwrap() + spec.n_cpi * spec.w_lags.unwrap(),
        };
        let dense = dense_layout(
            &mut layout,
            "dense",
            DenseDims {
                input: dense_input,
                hidden: spec.nodes,
                layers: spec.layers,
            },
        );
        debug_assert_eq!(layout.total(), spec.param_count());
        Ok(AssembledModel {
            spec,
            layout,
            lstm,
            dense,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn dense_handles(&self) -> &DenseHandles {
        &self.dense
    }

    pub fn lstm_handles(&self) -> Option<&LstmHandles> {
        self.lstm.as_ref()
    }

    pub fn param_count(&self) -> usize {
        self.layout.total()
    }

    fn check_width(&self, inputs: ArrayView2<f64>) -> Result<()> {
        let want = self.spec.input_width();
        if inputs.ncols() != want {
            return Err(Error::shape(format!(
                "{} expects rows of width {want}, got {}",
                self.spec.kind,
                inputs.ncols()
            )));
        }
        Ok(())
    }

    /// Cuts the z block of flat rows into per-step matrices, oldest first.
    /// Block layout within a row is most-recent-first, so step `j` of `L`
    /// reads lag `L-1-j`.
    fn sequence_steps(&self, inputs: ArrayView2<f64>) -> Vec<Array2<f64>> {
        let lags = self.spec.lags;
        let n_z = self.spec.n_pool;
        let n_w = self.spec.n_cpi;
        let mut steps = Vec::with_capacity(lags);
        for j in (0..lags).rev() {
            let z = inputs.slice(ndarray::s![.., j * n_z..(j + 1) * n_z]);
            let step = match self.spec.kind {
                ModelKind::LstmAll => {
                    let w_off = n_z * lags;
                    let w = inputs.slice(ndarray::s![.., w_off + j * n_w..w_off + (j + 1) * n_w]);
                    concatenate![Axis(1), z, w]
                }
                _ => z.to_owned(),
            };
            steps.push(step);
        }
        steps
    }

    /// Runs only the LSTM block and returns the internal memory `f_{t|L}`
    /// for each row. Errors on dense-only architectures.
    pub fn internal_memory(&self, params: &[f64], inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_width(inputs)?;
        let handles = self
            .lstm
            .as_ref()
            .ok_or_else(|| Error::validation(format!("{} has no LSTM block", self.spec.kind)))?;
        let steps = self.sequence_steps(inputs);
        let (state, _) = lstm_forward(params, &self.layout, handles, &steps)?;
        Ok(state)
    }

    /// Single-row prediction.
    pub fn predict_one(&self, params: &[f64], row: ArrayView1<f64>) -> Result<f64> {
        let input = row.insert_axis(Axis(0));
        let prepared = self.prepare(input)?;
        Ok(self.forward(params, &prepared, false)?.0[0])
    }
}

impl Model for AssembledModel {
    type Prepared = PreparedInput;
    type Cache = ModelCache;

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn prepare(&self, inputs: ArrayView2<f64>) -> Result<PreparedInput> {
        self.check_width(inputs)?;
        Ok(match self.spec.kind {
            ModelKind::FfCpi | ModelKind::FfPool => PreparedInput::Dense(inputs.to_owned()),
            ModelKind::LstmPool | ModelKind::LstmAll => PreparedInput::Sequence {
                steps: self.sequence_steps(inputs),
                rows: inputs.nrows(),
            },
            ModelKind::FfLstm => {
                let w_off = self.spec.n_pool * self.spec.lags;
                PreparedInput::Composite {
                    steps: self.sequence_steps(inputs),
                    w_input: inputs.slice(ndarray::s![.., w_off..]).to_owned(),
                }
            }
        })
    }

    fn forward(
        &self,
        params: &[f64],
        prepared: &PreparedInput,
        with_cache: bool,
    ) -> Result<(Array1<f64>, Option<ModelCache>)> {
        match prepared {
            PreparedInput::Dense(input) => {
                let (y, cache) = dense_forward(params, &self.layout, &self.dense, input.view())?;
                Ok((
                    y,
                    with_cache.then_some(ModelCache {
                        dense: cache,
                        lstm: None,
                        dense_input: None,
                    }),
                ))
            }
            PreparedInput::Sequence { steps, .. } => {
                let handles = self.lstm.as_ref().expect("sequence input implies LSTM");
                let (state, lstm_cache) = lstm_forward(params, &self.layout, handles, steps)?;
                let (y, dense_cache) =
                    dense_forward(params, &self.layout, &self.dense, state.view())?;
                Ok((
                    y,
                    with_cache.then_some(ModelCache {
                        dense: dense_cache,
                        lstm: Some(lstm_cache),
                        dense_input: Some(state),
                    }),
                ))
            }
            PreparedInput::Composite { steps, w_input } => {
                let handles = self.lstm.as_ref().expect("composite input implies LSTM");
                let (state, lstm_cache) = lstm_forward(params, &self.layout, handles, steps)?;
                // Dense consumes (x_w, f) in that order.
                let dense_input = concatenate![Axis(1), w_input.view(), state.view()];
                let (y, dense_cache) =
                    dense_forward(params, &self.layout, &self.dense, dense_input.view())?;
                Ok((
                    y,
                    with_cache.then_some(ModelCache {
                        dense: dense_cache,
                        lstm: Some(lstm_cache),
                        dense_input: Some(dense_input),
                    }),
                ))
            }
        }
    }

    fn backward(
        &self,
        params: &[f64],
        prepared: &PreparedInput,
        cache: &ModelCache,
        output_grad: ArrayView1<f64>,
    ) -> Result<Vec<f64>> {
        let mut grad = vec![0.0; self.layout.total()];
        match prepared {
            PreparedInput::Dense(input) => {
                dense_backward(
                    params,
                    &self.layout,
                    &self.dense,
                    input.view(),
                    &cache.dense,
                    output_grad,
                    &mut grad,
                    false,
                );
            }
            PreparedInput::Sequence { steps, .. } => {
                let lstm_cache = cache.lstm.as_ref().expect("lstm cache");
                let state = cache.dense_input.as_ref().expect("lstm dense input");
                let d_state = dense_backward(
                    params,
                    &self.layout,
                    &self.dense,
                    state.view(),
                    &cache.dense,
                    output_grad,
                    &mut grad,
                    true,
                )
                .expect("input grad requested");
                let handles = self.lstm.as_ref().unwrap();
                lstm_backward(params, &self.layout, handles, steps, lstm_cache, d_state, &mut grad);
            }
            PreparedInput::Composite { steps, .. } => {
                let lstm_cache = cache.lstm.as_ref().expect("lstm cache");
                let dense_input = cache.dense_input.as_ref().expect("composite dense input");
                let d_input = dense_backward(
                    params,
                    &self.layout,
                    &self.dense,
                    dense_input.view(),
                    &cache.dense,
                    output_grad,
                    &mut grad,
                    true,
                )
                .expect("input grad requested");
                let w_width = self.spec.n_cpi * self.spec.w_lags.unwrap();
                let d_state = d_input.slice(ndarray::s![.., w_width..]).to_owned();
                let handles = self.lstm.as_ref().unwrap();
                lstm_backward(params, &self.layout, handles, steps, lstm_cache, d_state, &mut grad);
            }
        }
        Ok(grad)
    }
}
