//! Perturbation-based variable importance aggregated into economic groups.

use ndarray::{Array1, Array2};

use crate::data::{build_supervised, Group, PredictorChoice, PreparedDataset};
use crate::error::{Error, Result};
use crate::eval::rolling::{rows_with_targets_in, TargetRange};
use crate::models::{AssembledModel, TrainedInstance};
use crate::neural::predict_batch;

/// Gain of one input variable: the mean squared deviation between the
/// shocked and baseline ensemble prediction series over the test window.
#[derive(Clone, Debug)]
pub struct VariableGain {
    pub column: usize,
    pub name: String,
    pub group: Group,
    pub gain: f64,
}

/// Importance results across horizons, with per-group means and the
/// highest / second-highest group flags per horizon.
#[derive(Clone, Debug)]
pub struct ImportanceTable {
    pub horizons: Vec<usize>,
    /// One entry per consumed variable, gains aligned with `horizons`.
    pub variables: Vec<(String, Group, Vec<f64>)>,
    /// Per-group mean gains aligned with `horizons`; only groups with at
    /// least one consumed variable appear.
    pub groups: Vec<(Group, Vec<f64>)>,
    /// Per horizon: (highest-gain group, second-highest-gain group).
    pub top_groups: Vec<(Group, Option<Group>)>,
}

/// Options for the perturbation exercise.
#[derive(Copy, Clone, Debug)]
pub struct ImportanceOptions {
    /// Shock size in units of the in-sample standard deviation.
    pub shock_sd_multiple: f64,
    /// Shock the variable at every lag simultaneously (the default) or at
    /// the most recent lag only.
    pub all_lags: bool,
}

impl Default for ImportanceOptions {
    fn default() -> Self {
        ImportanceOptions {
            shock_sd_multiple: 3.0,
            all_lags: true,
        }
    }
}

/// Panel columns the model consumes, in supervised-block order.
fn consumed_columns(choice: PredictorChoice, data: &PreparedDataset) -> Vec<usize> {
    match choice {
        PredictorChoice::CpiOnly { .. } => data.w_columns.clone(),
        PredictorChoice::Pool { .. } => data.z_columns.clone(),
        PredictorChoice::All { .. } | PredictorChoice::Composite { .. } => {
            let mut cols = data.z_columns.clone();
            cols.extend(&data.w_columns);
            cols
        }
    }
}

/// Flat-row positions occupied by panel column `col` (one per shocked lag).
fn flat_positions(
    choice: PredictorChoice,
    data: &PreparedDataset,
    col: usize,
    all_lags: bool,
) -> Vec<usize> {
    let n_z = data.z_columns.len();
    let n_w = data.w_columns.len();
    let mut positions = Vec::new();
    let mut block = |offset: usize, cols: &[usize], width: usize, lags: usize| {
        if let Some(pos) = cols.iter().position(|&c| c == col) {
            let depth = if all_lags { lags } else { 1 };
            for lag in 0..depth {
                positions.push(offset + lag * width + pos);
            }
        }
    };
    match choice {
        PredictorChoice::CpiOnly { lags } => block(0, &data.w_columns, n_w, lags),
        PredictorChoice::Pool { lags } => block(0, &data.z_columns, n_z, lags),
        PredictorChoice::All { lags } => {
            block(0, &data.z_columns, n_z, lags);
            block(n_z * lags, &data.w_columns, n_w, lags);
        }
        PredictorChoice::Composite { w_lags, z_lags } => {
            block(0, &data.z_columns, n_z, z_lags);
            block(n_z * z_lags, &data.w_columns, n_w, w_lags);
        }
    }
    positions
}

fn ensemble_predictions(
    model: &AssembledModel,
    instances: &[TrainedInstance],
    inputs: &Array2<f64>,
) -> Result<Array1<f64>> {
    let mut acc = Array1::zeros(inputs.nrows());
    for inst in instances {
        acc += &predict_batch(model, &inst.params, inputs.view())?;
    }
    Ok(acc / instances.len() as f64)
}

/// Per-variable gains for one trained ensemble at one horizon.
pub fn variable_importance(
    model: &AssembledModel,
    instances: &[TrainedInstance],
    data: &PreparedDataset,
    horizon: usize,
    options: &ImportanceOptions,
) -> Result<Vec<VariableGain>> {
    if instances.is_empty() {
        return Err(Error::validation("importance needs a trained ensemble".to_string()));
    }
    let choice = model.spec().predictor_choice();
    let sup = build_supervised(data, choice, horizon)?;
    let (oos_inputs, _) = rows_with_targets_in(
        sup.inputs.view(),
        &sup.origins,
        horizon,
        TargetRange::test(data),
    )?;
    let baseline = ensemble_predictions(model, instances, &oos_inputs)?;

    let mut gains = Vec::new();
    for &col in &consumed_columns(choice, data) {
        let positions = flat_positions(choice, data, col, options.all_lags);
        if positions.is_empty() {
            return Err(Error::validation(format!(
                "variable `{}` is not consumed by {}",
                data.names[col],
                model.spec().kind
            )));
        }
        let shock = options.shock_sd_multiple * data.in_sample_std(col);
        let mut shocked = oos_inputs.clone();
        for row in 0..shocked.nrows() {
            for &pos in &positions {
                shocked[[row, pos]] += shock;
            }
        }
        let shocked_preds = ensemble_predictions(model, instances, &shocked)?;
        let gain = shocked_preds
            .iter()
            .zip(baseline.iter())
            .map(|(s, b)| (s - b) * (s - b))
            .sum::<f64>()
            / baseline.len() as f64;
        gains.push(VariableGain {
            column: col,
            name: data.names[col].clone(),
            group: data.groups[col],
            gain,
        });
    }
    Ok(gains)
}

/// Assembles per-horizon gain vectors into one table with group means and
/// top-group flags.
pub fn build_importance_table(per_horizon: Vec<(usize, Vec<VariableGain>)>) -> Result<ImportanceTable> {
    let first = per_horizon
        .first()
        .ok_or_else(|| Error::validation("no importance results".to_string()))?;
    let horizons: Vec<usize> = per_horizon.iter().map(|(h, _)| *h).collect();
    let n_vars = first.1.len();
    for (h, gains) in &per_horizon {
        if gains.len() != n_vars {
            return Err(Error::shape(format!(
                "horizon {h} has {} variables, expected {n_vars}",
                gains.len()
            )));
        }
    }

    let mut variables = Vec::with_capacity(n_vars);
    for v in 0..n_vars {
        let name = first.1[v].name.clone();
        let group = first.1[v].group;
        let gains: Vec<f64> = per_horizon.iter().map(|(_, g)| g[v].gain).collect();
        variables.push((name, group, gains));
    }

    let mut groups: Vec<(Group, Vec<f64>)> = Vec::new();
    for group in Group::ALL {
        let members: Vec<usize> = (0..n_vars).filter(|&v| first.1[v].group == group).collect();
        if members.is_empty() {
            continue;
        }
        let means: Vec<f64> = (0..horizons.len())
            .map(|hi| {
                members
                    .iter()
                    .map(|&v| per_horizon[hi].1[v].gain)
                    .sum::<f64>()
                    / members.len() as f64
            })
            .collect();
        groups.push((group, means));
    }

    let mut top_groups = Vec::with_capacity(horizons.len());
    for hi in 0..horizons.len() {
        let mut ranked: Vec<(Group, f64)> = groups.iter().map(|(g, m)| (*g, m[hi])).collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let best = ranked[0].0;
        let second = ranked.get(1).map(|(g, _)| *g);
        top_groups.push((best, second));
    }

    Ok(ImportanceTable {
        horizons,
        variables,
        groups,
        top_groups,
    })
}
