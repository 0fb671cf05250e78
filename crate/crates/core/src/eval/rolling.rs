//! Rolling out-of-sample forecasting with periodic re-estimation.
//!
//! The estimation window expands by one observation per month; parameters
//! are re-fit every `refit_every` months and frozen in between while the
//! input window keeps advancing. A forecast at origin `t` only ever reads
//! panel rows dated `<= t` and training pairs whose targets are realized by
//! `t`.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::benchmarks::{ar1_fit, ar1_forecast, fadl_fit_forecast, ucsv_fit, FadlConfig, UcsvConfig};
use crate::data::{build_supervised, PreparedDataset};
use crate::error::{Error, Result};
use crate::eval::runs::ForecastRun;
use crate::models::AssembledModel;
use crate::neural::{predict_batch, train, TrainConfig};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RollingConfig {
    /// Months between re-estimations.
    pub refit_every: usize,
}

impl Default for RollingConfig {
    fn default() -> Self {
        RollingConfig { refit_every: 48 }
    }
}

/// Out-of-sample steps (0-based) at which parameters are re-estimated:
/// the first origin, then every `refit_every` months.
pub fn refit_schedule(oos_len: usize, refit_every: usize) -> Vec<usize> {
    (0..oos_len).step_by(refit_every.max(1)).collect()
}

/// Target-date range `[start_row, end_row)` in panel indices.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TargetRange {
    pub start: usize,
    pub end: usize,
}

impl TargetRange {
    /// The test window of the dataset's splits.
    pub fn test(data: &PreparedDataset) -> Self {
        TargetRange {
            start: data.splits.test_start(),
            end: data.splits.test_end,
        }
    }

    /// The full validation span (all three nested windows).
    pub fn validation(data: &PreparedDataset) -> Self {
        TargetRange {
            start: data.splits.train_end,
            end: data.splits.validation_ends[2],
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

/// Rolling forecast of a neural model over the test window.
pub fn rolling_forecast(
    model: &AssembledModel,
    data: &PreparedDataset,
    horizon: usize,
    seed: u64,
    train_config: &TrainConfig,
    rolling: &RollingConfig,
) -> Result<ForecastRun> {
    rolling_forecast_over(
        model,
        data,
        horizon,
        seed,
        train_config,
        rolling,
        TargetRange::test(data),
    )
}

/// Rolling forecast over an arbitrary target range (used for validation
/// scoring during grid search as well as the test window).
pub fn rolling_forecast_over(
    model: &AssembledModel,
    data: &PreparedDataset,
    horizon: usize,
    seed: u64,
    train_config: &TrainConfig,
    rolling: &RollingConfig,
    range: TargetRange,
) -> Result<ForecastRun> {
    if range.is_empty() || range.end > data.n_rows() {
        return Err(Error::validation(format!(
            "bad target range {}..{}",
            range.start, range.end
        )));
    }
    if rolling.refit_every < 1 {
        return Err(Error::validation("refit_every must be at least 1".to_string()));
    }
    let sup = build_supervised(data, model.spec().predictor_choice(), horizon)?;
    let cfg = train_config.with_seed(seed);

    let mut forecasts = Vec::with_capacity(range.len());
    let mut realized = Vec::with_capacity(range.len());
    let mut dates = Vec::with_capacity(range.len());
    let mut params: Option<Vec<f64>> = None;

    let mut segment_rows: Vec<usize> = Vec::new();
    let flush = |params: &Option<Vec<f64>>,
                     segment_rows: &mut Vec<usize>,
                     forecasts: &mut Vec<f64>|
     -> Result<()> {
        if segment_rows.is_empty() {
            return Ok(());
        }
        let batch = sup.inputs.select(Axis(0), segment_rows);
        let p = params.as_ref().expect("parameters fitted before prediction");
        let preds = predict_batch(model, p, batch.view())?;
        forecasts.extend(preds.iter().copied());
        segment_rows.clear();
        Ok(())
    };

    for (step, target_row) in (range.start..range.end).enumerate() {
        let origin = target_row
            .checked_sub(horizon)
            .ok_or_else(|| Error::validation("horizon exceeds target row".to_string()))?;
        let sample = sup.sample_at_origin(origin).ok_or_else(|| {
            Error::validation(format!(
                "no supervised sample at origin row {origin}; not enough history"
            ))
        })?;

        if step % rolling.refit_every == 0 {
            flush(&params, &mut segment_rows, &mut forecasts)?;
            // Training pairs with targets realized by the origin date.
            let last_train_origin = origin.checked_sub(horizon).and_then(|t| sup.sample_at_origin(t));
            let end = match last_train_origin {
                Some(idx) => idx + 1,
                None => {
                    return Err(Error::Training(format!(
                        "no realized training targets before origin row {origin}"
                    )))
                }
            };
            let inputs = sup.inputs.slice(ndarray::s![..end, ..]);
            let targets = sup.targets.slice(ndarray::s![..end]);
            let result = train(model, inputs, targets, &cfg).map_err(|e| {
                let last_good = dates.last().map(|d: &crate::data::Month| d.to_string());
                Error::Training(format!(
                    "refit at panel row {origin} failed ({e}); last good forecast: {}",
                    last_good.unwrap_or_else(|| "none".to_string())
                ))
            })?;
            params = Some(result.params);
        }

        segment_rows.push(sample);
        realized.push(sup.targets[sample]);
        dates.push(data.dates[target_row]);
    }
    flush(&params, &mut segment_rows, &mut forecasts)?;

    // Under a normalized target the model output lives in [-1,1] space;
    // evaluation always happens in raw units.
    let forecasts = forecasts.into_iter().map(|v| data.target_to_raw(v)).collect();
    let realized = realized.into_iter().map(|v| data.target_to_raw(v)).collect();

    Ok(ForecastRun {
        model_id: model.spec().kind.id().to_string(),
        horizon,
        seed,
        dates,
        forecasts,
        realized,
    })
}

/// Classical benchmarks emitted in the same run schema.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    Ar1,
    Ucsv,
    Fadl,
}

impl BenchmarkKind {
    pub fn id(&self) -> &'static str {
        match self {
            BenchmarkKind::Ar1 => "ar1",
            BenchmarkKind::Ucsv => "ucsv",
            BenchmarkKind::Fadl => "fadl",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ar1" | "ar" => Some(BenchmarkKind::Ar1),
            "ucsv" | "uc-sv" => Some(BenchmarkKind::Ucsv),
            "fadl" | "factor" => Some(BenchmarkKind::Fadl),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkSettings {
    pub ucsv: UcsvConfig,
    pub fadl: FadlConfig,
    /// Benchmarks are cheap; they refit every month by default.
    pub refit_every: usize,
}

impl Default for BenchmarkSettings {
    fn default() -> Self {
        BenchmarkSettings {
            ucsv: UcsvConfig::default(),
            fadl: FadlConfig::default(),
            refit_every: 1,
        }
    }
}

/// Rolling benchmark forecasts over a target range. Each fit sees only the
/// target (and panel) rows up to its origin.
pub fn rolling_benchmark(
    kind: BenchmarkKind,
    data: &PreparedDataset,
    horizon: usize,
    settings: &BenchmarkSettings,
    range: TargetRange,
) -> Result<ForecastRun> {
    if range.is_empty() || range.end > data.n_rows() {
        return Err(Error::validation(format!(
            "bad target range {}..{}",
            range.start, range.end
        )));
    }
    let target = data.target_series();
    let z_panel: Array2<f64> = pick_columns(&data.raw, &data.z_columns);

    let mut forecasts = Vec::with_capacity(range.len());
    let mut realized = Vec::with_capacity(range.len());
    let mut dates = Vec::with_capacity(range.len());

    // For cadences > 1 the latest fit is reused but always re-anchored on
    // the newest observation where the model needs one (AR(1) iterates from
    // pi_t; UC-SV would need re-filtering, so it refits whenever stale).
    let mut fitted_ar1 = None;
    let mut last_fit_step = None;

    for (step, target_row) in (range.start..range.end).enumerate() {
        let origin = target_row - horizon;
        let history = &target[..=origin];
        let needs_fit = match last_fit_step {
            None => true,
            Some(s) => step - s >= settings.refit_every,
        };
        let forecast = match kind {
            BenchmarkKind::Ar1 => {
                if needs_fit || fitted_ar1.is_none() {
                    fitted_ar1 = Some(ar1_fit(history)?);
                    last_fit_step = Some(step);
                }
                ar1_forecast(fitted_ar1.as_ref().unwrap(), history[origin], horizon)
            }
            BenchmarkKind::Ucsv => {
                // The forecast is the filtered trend at the origin, so the
                // chain reruns on every origin's history.
                let mut cfg = settings.ucsv;
                cfg.seed = settings.ucsv.seed.wrapping_add(step as u64);
                let fit = ucsv_fit(history, &cfg)?;
                last_fit_step = Some(step);
                fit.forecast(horizon)
            }
            BenchmarkKind::Fadl => {
                let panel_slice = z_panel.slice(ndarray::s![..=origin, ..]);
                let mut cfg = settings.fadl;
                cfg.seed = settings.fadl.seed.wrapping_add(step as u64);
                let fit = fadl_fit_forecast(history, panel_slice, horizon, &cfg)?;
                last_fit_step = Some(step);
                fit.point_forecast
            }
        };
        forecasts.push(forecast);
        realized.push(target[target_row]);
        dates.push(data.dates[target_row]);
    }

    Ok(ForecastRun {
        model_id: kind.id().to_string(),
        horizon,
        seed: match kind {
            BenchmarkKind::Ucsv => settings.ucsv.seed,
            BenchmarkKind::Fadl => settings.fadl.seed,
            BenchmarkKind::Ar1 => 0,
        },
        dates,
        forecasts,
        realized,
    })
}

fn pick_columns(matrix: &Array2<f64>, columns: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((matrix.nrows(), columns.len()));
    for (k, &j) in columns.iter().enumerate() {
        out.column_mut(k).assign(&matrix.column(j));
    }
    out
}

/// View of the supervised rows whose origins fall in `[start, end)`.
pub fn rows_with_targets_in(
    sup_inputs: ArrayView2<f64>,
    origins: &[usize],
    horizon: usize,
    range: TargetRange,
) -> Result<(Array2<f64>, Vec<usize>)> {
    let mut rows = Vec::new();
    for (idx, &t) in origins.iter().enumerate() {
        let target_row = t + horizon;
        if target_row >= range.start && target_row < range.end {
            rows.push(idx);
        }
    }
    if rows.is_empty() {
        return Err(Error::validation("no supervised rows in range".to_string()));
    }
    Ok((sup_inputs.select(Axis(0), &rows), rows))
}
