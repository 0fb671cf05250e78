//! Two-stage hyperparameter search with nested validation windows.
//!
//! Stage 1 selects architecture hyperparameters model by model: the two
//! feed-forward models search lags x nodes x layers; the LSTM models then
//! search lags x layers x state with the node count fixed at the
//! feed-forward optimum; the composite model inherits everything (dense
//! lags and width from ff_cpi, LSTM lags and state from lstm_pool). Stage 2
//! re-scores epochs x batch with the architecture frozen.
//!
//! Every candidate is scored by the same seeded repetitions: forecasts over
//! the validation span with periodic refits, ensembled, and the RMSE
//! averaged over the three nested validation windows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::PreparedDataset;
use crate::error::{Error, Result};
use crate::eval::executor::run_parallel;
use crate::eval::rolling::{rolling_forecast_over, RollingConfig, TargetRange};
use crate::eval::runs::{ensemble, ForecastRun, LossKind};
use crate::models::{AssembledModel, ModelKind, NetworkSpec};
use crate::neural::{BatchSize, TrainConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPlan {
    pub ff_lags: Vec<usize>,
    pub ff_nodes: Vec<usize>,
    pub ff_layers: Vec<usize>,
    pub lstm_lags: Vec<usize>,
    pub lstm_layers: Vec<usize>,
    pub lstm_state: Vec<usize>,
    pub epochs: Vec<usize>,
    pub batches: Vec<BatchSize>,
    /// Ensemble size per candidate during validation scoring.
    pub repetitions: usize,
    /// Epochs/batch used while stage 1 searches the architecture.
    pub stage1_train: TrainConfig,
    pub refit_every: usize,
    pub horizon: usize,
    pub base_seed: u64,
    pub workers: usize,
}

impl Default for GridPlan {
    fn default() -> Self {
        GridPlan {
            ff_lags: vec![6, 12, 24, 48],
            ff_nodes: vec![16, 32, 64, 128],
            ff_layers: vec![1, 2, 3, 4],
            lstm_lags: vec![6, 12, 24, 48],
            lstm_layers: vec![3, 4],
            lstm_state: vec![2, 4, 6, 8],
            epochs: vec![200, 400, 600],
            batches: vec![BatchSize::Fixed(128), BatchSize::Max],
            repetitions: 140,
            stage1_train: TrainConfig::new(200, BatchSize::Fixed(128), 0),
            refit_every: 48,
            horizon: 12,
            base_seed: 0,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub spec: NetworkSpec,
    pub train: TrainConfig,
    /// Average validation RMSE over the three nested windows.
    pub score: f64,
}

/// Ensemble validation forecast for one candidate, averaged-RMSE scored.
fn score_candidate(
    data: &PreparedDataset,
    spec: &NetworkSpec,
    train: &TrainConfig,
    plan: &GridPlan,
) -> Result<f64> {
    let model = AssembledModel::build(*spec)?;
    let range = TargetRange::validation(data);
    let rolling = RollingConfig {
        refit_every: plan.refit_every,
    };
    let runs: Vec<Result<ForecastRun>> = run_parallel(
        plan.workers,
        (0..plan.repetitions.max(1)).collect(),
        |k| {
            rolling_forecast_over(
                &model,
                data,
                plan.horizon,
                plan.base_seed + k as u64,
                train,
                &rolling,
                range,
            )
        },
    );
    let runs: Vec<ForecastRun> = runs.into_iter().collect::<Result<_>>()?;
    let combined = ensemble(&runs)?;

    let start = data.dates[data.splits.train_end];
    let mut total = 0.0;
    for end_idx in data.splits.validation_ends {
        let end = data.dates[end_idx - 1];
        total += combined.loss_over(LossKind::Rmse, start, end)?;
    }
    Ok(total / 3.0)
}

fn pick_best<I>(candidates: I) -> Result<(NetworkSpec, f64)>
where
    I: IntoIterator<Item = (NetworkSpec, Result<f64>)>,
{
    let mut best: Option<(NetworkSpec, f64)> = None;
    let mut any = false;
    for (spec, score) in candidates {
        any = true;
        let score = score?;
        if best.as_ref().map(|(_, s)| score < *s).unwrap_or(true) {
            best = Some((spec, score));
        }
    }
    if !any {
        return Err(Error::validation("empty candidate grid".to_string()));
    }
    Ok(best.unwrap())
}

fn search_ff(
    data: &PreparedDataset,
    kind: ModelKind,
    plan: &GridPlan,
    n_pool: usize,
    n_cpi: usize,
) -> Result<(NetworkSpec, f64)> {
    let mut scored = Vec::new();
    for &lags in &plan.ff_lags {
        for &nodes in &plan.ff_nodes {
            for &layers in &plan.ff_layers {
                let spec = NetworkSpec {
                    kind,
                    lags,
                    w_lags: None,
                    nodes,
                    layers,
                    state: None,
                    n_pool,
                    n_cpi,
                };
                let score = score_candidate(data, &spec, &plan.stage1_train, plan);
                scored.push((spec, score));
            }
        }
    }
    pick_best(scored)
}

fn search_lstm(
    data: &PreparedDataset,
    kind: ModelKind,
    nodes: usize,
    plan: &GridPlan,
    n_pool: usize,
    n_cpi: usize,
) -> Result<(NetworkSpec, f64)> {
    let mut scored = Vec::new();
    for &lags in &plan.lstm_lags {
        for &layers in &plan.lstm_layers {
            for &state in &plan.lstm_state {
                let spec = NetworkSpec {
                    kind,
                    lags,
                    w_lags: None,
                    nodes,
                    layers,
                    state: Some(state),
                    n_pool,
                    n_cpi,
                };
                let score = score_candidate(data, &spec, &plan.stage1_train, plan);
                scored.push((spec, score));
            }
        }
    }
    pick_best(scored)
}

fn stage2(
    data: &PreparedDataset,
    spec: &NetworkSpec,
    plan: &GridPlan,
) -> Result<(TrainConfig, f64)> {
    let mut best: Option<(TrainConfig, f64)> = None;
    if plan.epochs.is_empty() || plan.batches.is_empty() {
        return Err(Error::validation("empty stage-2 grid".to_string()));
    }
    for &epochs in &plan.epochs {
        for &batch in &plan.batches {
            let train = TrainConfig {
                epochs,
                batch,
                ..plan.stage1_train
            };
            let score = score_candidate(data, spec, &train, plan)?;
            if best.as_ref().map(|(_, s)| score < *s).unwrap_or(true) {
                best = Some((train, score));
            }
        }
    }
    Ok(best.unwrap())
}

/// Runs both stages for the requested model kinds and returns the selected
/// spec and training settings per kind.
pub fn grid_search(
    data: &PreparedDataset,
    kinds: &[ModelKind],
    plan: &GridPlan,
) -> Result<BTreeMap<String, GridOutcome>> {
    let n_pool = data.z_columns.len();
    let n_cpi = data.w_columns.len();
    let mut stage1: BTreeMap<ModelKind, (NetworkSpec, f64)> = BTreeMap::new();

    let want = |k: ModelKind| kinds.contains(&k);

    if want(ModelKind::FfCpi) || want(ModelKind::FfLstm) {
        let best = search_ff(data, ModelKind::FfCpi, plan, n_pool, n_cpi)?;
        stage1.insert(ModelKind::FfCpi, best);
    }
    if want(ModelKind::FfPool)
        || want(ModelKind::LstmPool)
        || want(ModelKind::LstmAll)
        || want(ModelKind::FfLstm)
    {
        let best = search_ff(data, ModelKind::FfPool, plan, n_pool, n_cpi)?;
        stage1.insert(ModelKind::FfPool, best);
    }

    // The LSTM stacks reuse the feed-forward node optimum.
    let ff_nodes = stage1
        .get(&ModelKind::FfPool)
        .or_else(|| stage1.get(&ModelKind::FfCpi))
        .map(|(s, _)| s.nodes)
        .unwrap_or_else(|| plan.ff_nodes.iter().copied().max().unwrap_or(16));

    if want(ModelKind::LstmPool) || want(ModelKind::FfLstm) {
        let best = search_lstm(data, ModelKind::LstmPool, ff_nodes, plan, n_pool, n_cpi)?;
        stage1.insert(ModelKind::LstmPool, best);
    }
    if want(ModelKind::LstmAll) {
        let best = search_lstm(data, ModelKind::LstmAll, ff_nodes, plan, n_pool, n_cpi)?;
        stage1.insert(ModelKind::LstmAll, best);
    }
    if want(ModelKind::FfLstm) {
        let ff_cpi = &stage1[&ModelKind::FfCpi].0;
        let lstm_pool = &stage1[&ModelKind::LstmPool].0;
        let spec = NetworkSpec {
            kind: ModelKind::FfLstm,
            lags: lstm_pool.lags,
            w_lags: Some(ff_cpi.lags),
            nodes: ff_cpi.nodes,
            layers: ff_cpi.layers,
            state: lstm_pool.state,
            n_pool,
            n_cpi,
        };
        let score = score_candidate(data, &spec, &plan.stage1_train, plan)?;
        stage1.insert(ModelKind::FfLstm, (spec, score));
    }

    let mut out = BTreeMap::new();
    for kind in kinds {
        let (spec, _) = *stage1
            .get(kind)
            .ok_or_else(|| Error::validation(format!("no stage-1 result for {kind}")))?;
        let (train, score) = stage2(data, &spec, plan)?;
        out.insert(
            kind.id().to_string(),
            GridOutcome { spec, train, score },
        );
    }
    Ok(out)
}
