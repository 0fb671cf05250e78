//! Lagged supervised predictor/target pairs.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::PreparedDataset;
use crate::error::{Error, Result};

/// Which predictor blocks feed the model, with lag depth per block.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorChoice {
    /// CPI and its components only: flat row of `n_w * lags`.
    CpiOnly { lags: usize },
    /// Macro pool excluding CPI data: flat row of `n_z * lags`.
    Pool { lags: usize },
    /// Pool and CPI blocks at a shared lag depth, z-lags first then w-lags.
    All { lags: usize },
    /// Separate lag depths per block (z-lags first, then w-lags).
    Composite { w_lags: usize, z_lags: usize },
}

impl PredictorChoice {
    pub fn max_lag(&self) -> usize {
        match *self {
            PredictorChoice::CpiOnly { lags }
            | PredictorChoice::Pool { lags }
            | PredictorChoice::All { lags } => lags,
            PredictorChoice::Composite { w_lags, z_lags } => w_lags.max(z_lags),
        }
    }

    pub fn width(&self, n_z: usize, n_w: usize) -> usize {
        match *self {
            PredictorChoice::CpiOnly { lags } => n_w * lags,
            PredictorChoice::Pool { lags } => n_z * lags,
            PredictorChoice::All { lags } => (n_z + n_w) * lags,
            PredictorChoice::Composite { w_lags, z_lags } => n_z * z_lags + n_w * w_lags,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PredictorChoice::CpiOnly { lags }
            | PredictorChoice::Pool { lags }
            | PredictorChoice::All { lags } => lags >= 1,
            PredictorChoice::Composite { w_lags, z_lags } => w_lags >= 1 && z_lags >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation("lag depth must be at least 1".to_string()))
        }
    }
}

/// Supervised rows: row `k` pairs the stacked lags at origin `origins[k]`
/// with the raw-unit target `horizon` months ahead.
///
/// Flat layout per row: z block first (when present) then w block; inside a
/// block, most recent month first. Inputs are normalized panel values;
/// targets stay in raw log-difference units.
#[derive(Clone, Debug)]
pub struct SupervisedSet {
    pub inputs: Array2<f64>,
    pub targets: Array1<f64>,
    /// Panel row index of each sample's forecast origin `t`.
    pub origins: Vec<usize>,
    pub horizon: usize,
    pub choice: PredictorChoice,
    pub n_z: usize,
    pub n_w: usize,
}

impl SupervisedSet {
    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of the sample whose origin is panel row `t`, if present.
    pub fn sample_at_origin(&self, t: usize) -> Option<usize> {
        let first = *self.origins.first()?;
        if t < first || t > *self.origins.last()? {
            return None;
        }
        Some(t - first)
    }

    /// Column offset and lag depth of the z block within a flat row.
    pub fn z_block(&self) -> Option<(usize, usize)> {
        match self.choice {
            PredictorChoice::CpiOnly { .. } => None,
            PredictorChoice::Pool { lags } | PredictorChoice::All { lags } => Some((0, lags)),
            PredictorChoice::Composite { z_lags, .. } => Some((0, z_lags)),
        }
    }

    /// Column offset and lag depth of the w block within a flat row.
    pub fn w_block(&self) -> Option<(usize, usize)> {
        match self.choice {
            PredictorChoice::Pool { .. } => None,
            PredictorChoice::CpiOnly { lags } => Some((0, lags)),
            PredictorChoice::All { lags } => Some((self.n_z * lags, lags)),
            PredictorChoice::Composite { w_lags, z_lags } => Some((self.n_z * z_lags, w_lags)),
        }
    }
}

/// Builds the supervised set for one predictor choice and horizon over the
/// whole prepared panel.
pub fn build_supervised(
    data: &PreparedDataset,
    choice: PredictorChoice,
    horizon: usize,
) -> Result<SupervisedSet> {
    choice.validate()?;
    if horizon < 1 {
        return Err(Error::validation("horizon must be at least 1".to_string()));
    }
    let t_len = data.normalized.nrows();
    let lag = choice.max_lag();
    if t_len < lag + horizon {
        return Err(Error::validation(format!(
            "panel of {t_len} rows cannot support L={lag} and h={horizon}"
        )));
    }
    let n_z = data.z_columns.len();
    let n_w = data.w_columns.len();
    let width = choice.width(n_z, n_w);
    let rows = t_len - lag + 1 - horizon;

    let mut inputs = Array2::zeros((rows, width));
    let mut targets = Array1::zeros(rows);
    let mut origins = Vec::with_capacity(rows);

    for (k, t) in ((lag - 1)..(t_len - horizon)).enumerate() {
        let mut col = 0;
        let mut push_block = |cols: &[usize], lags: usize, inputs: &mut Array2<f64>| {
            for back in 0..lags {
                let row = t - back;
                for &j in cols {
                    inputs[[k, col]] = data.normalized[[row, j]];
                    col += 1;
                }
            }
        };
        match choice {
            PredictorChoice::CpiOnly { lags } => push_block(&data.w_columns, lags, &mut inputs),
            PredictorChoice::Pool { lags } => push_block(&data.z_columns, lags, &mut inputs),
            PredictorChoice::All { lags } => {
                push_block(&data.z_columns, lags, &mut inputs);
                push_block(&data.w_columns, lags, &mut inputs);
            }
            PredictorChoice::Composite { w_lags, z_lags } => {
                push_block(&data.z_columns, z_lags, &mut inputs);
                push_block(&data.w_columns, w_lags, &mut inputs);
            }
        }
        debug_assert_eq!(col, width);
        targets[k] = data.supervised_target(t + horizon);
        origins.push(t);
    }

    Ok(SupervisedSet {
        inputs,
        targets,
        origins,
        horizon,
        choice,
        n_z,
        n_w,
    })
}
