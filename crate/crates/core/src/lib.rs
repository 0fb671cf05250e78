//! Core engine for monthly CPI inflation forecasting with from-scratch neural
//! networks and classical benchmarks.
//!
//! The crate is organized around the stages of the forecasting exercise:
//!
//! - [`data`] — FRED-MD-style panel ingestion: stationarity transforms,
//!   imputation, `[-1, 1]` normalization without look-ahead, lagged supervised
//!   sets and train/validation/test splits.
//! - [`neural`] — dense and LSTM computation with exact analytic gradients
//!   (backprop and BPTT), Glorot initialization, Adam, and a deterministic
//!   training loop.
//! - [`models`] — the five forecasting architectures (FF-cpi, FF-pool,
//!   LSTM-pool, LSTM-all, FF-LSTM), exact parameter counts, internal-memory
//!   extraction and validation-based instance selection.
//! - [`benchmarks`] — AR(1) closed-form forecasts, the UC-SV trend model via
//!   Gibbs sampling, and a factor-augmented distributed-lag regression with a
//!   fixed-regressor bootstrap.
//! - [`eval`] — rolling out-of-sample forecasting with periodic re-estimation,
//!   ensembles over initializations, loss ratios, Diebold–Mariano and
//!   fluctuation statistics, perturbation variable importance and two-stage
//!   grid search.
//! - [`config`] — the plain-text run configuration shared with the CLI.
//!
//! All floating point work is `f64`; every stochastic routine takes an
//! explicit seed and is bit-reproducible for a fixed `(seed, config, data)`
//! triple.

pub mod benchmarks;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod models;
pub mod neural;

pub use config::RunConfig;
pub use data::{
    Group, Month, Normalizer, PredictorChoice, PreparedDataset, RawSeriesTable, SampleSplits,
    SupervisedSet,
};
pub use error::{Error, Result};
pub use eval::{ForecastRun, ImportanceTable, LossDifferential};
pub use models::{AssembledModel, ModelKind, NetworkSpec};
pub use neural::{AdamState, BatchSize, TrainConfig, TrainResult};
