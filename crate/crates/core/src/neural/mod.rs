//! From-scratch neural computation: forward passes, exact analytic
//! gradients, Glorot initialization, Adam and the training loop.

pub mod adam;
pub mod checkpoint;
pub mod dense;
pub mod lstm;
pub mod params;
pub mod rnn;
pub mod train;

pub use adam::AdamState;
pub use checkpoint::{load_params, save_params, write_loss_history, LoadedParams};
pub use dense::{dense_backward, dense_forward, dense_layout, DenseCache, DenseDims, DenseHandles};
pub use lstm::{lstm_backward, lstm_forward, lstm_layout, LstmCache, LstmDims, LstmHandles};
pub use params::{fill_glorot, glorot_bound, glorot_init, InitKind, ParamEntry, ParamLayout};
pub use rnn::RnnCell;
pub use train::{
    init_params, loss_gradient, predict_batch, train, BatchSize, Model, TrainConfig, TrainResult,
};
