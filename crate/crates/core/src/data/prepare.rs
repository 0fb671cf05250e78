//! End-to-end panel preparation: transform, trim, impute, split, normalize.

use ndarray::Array2;

use crate::data::transform::{impute_missing, transform_panel, COMMON_TRIM};
use crate::data::{Group, Month, Normalizer, RawSeriesTable, SampleSplits, SplitSpec};
use crate::error::{Error, Result};

/// Stationarized, imputed and normalized panel with split boundaries.
///
/// `raw` keeps the transformed panel in original units (the target series is
/// read from here); `normalized` is the `[-1, 1]` panel fed to models, with
/// the map fitted on rows `[0, splits.in_sample_end())` and extrapolated
/// beyond it.
#[derive(Clone, Debug)]
pub struct PreparedDataset {
    pub dates: Vec<Month>,
    pub names: Vec<String>,
    pub groups: Vec<Group>,
    pub raw: Array2<f64>,
    pub normalized: Array2<f64>,
    pub normalizer: Normalizer,
    pub target_col: usize,
    pub w_columns: Vec<usize>,
    pub z_columns: Vec<usize>,
    pub splits: SampleSplits,
    /// Train on normalized targets (forecasts are mapped back to raw units
    /// for evaluation). Off by default: losses stay comparable to the
    /// classical benchmarks fitted on raw inflation.
    pub normalize_target: bool,
}

impl PreparedDataset {
    pub fn n_rows(&self) -> usize {
        self.raw.nrows()
    }

    pub fn n_series(&self) -> usize {
        self.raw.ncols()
    }

    /// Target series (CPI log differences) in raw units.
    pub fn target_series(&self) -> Vec<f64> {
        self.raw.column(self.target_col).to_vec()
    }

    /// Target value as fed to the training loss.
    pub fn supervised_target(&self, row: usize) -> f64 {
        if self.normalize_target {
            self.normalized[[row, self.target_col]]
        } else {
            self.raw[[row, self.target_col]]
        }
    }

    /// Maps a model output back to raw target units.
    pub fn target_to_raw(&self, value: f64) -> f64 {
        if self.normalize_target {
            self.normalizer.invert_value(self.target_col, value)
        } else {
            value
        }
    }

    /// Per-column standard deviation of the normalized in-sample window,
    /// used to size perturbation shocks.
    pub fn in_sample_std(&self, column: usize) -> f64 {
        let end = self.splits.in_sample_end();
        let col = self.normalized.column(column);
        let mean = col.iter().take(end).sum::<f64>() / end as f64;
        let var = col
            .iter()
            .take(end)
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / end as f64;
        var.sqrt()
    }
}

/// Everything `prepare` needs besides the raw table itself.
#[derive(Clone, Debug)]
pub struct PrepareOptions {
    /// Name of the target price series (first element of the w set).
    pub target: String,
    /// CPI and component series forming the w block, target included.
    pub w_names: Vec<String>,
    pub splits: SplitSpec,
    /// Transform code forced onto the target so it becomes a log difference
    /// regardless of the vintage's own code. `None` keeps the file's code.
    pub target_tcode_override: Option<u8>,
    /// Feed `[-1,1]`-normalized targets to training.
    pub normalize_target: bool,
}

impl PrepareOptions {
    pub fn new(target: impl Into<String>, w_names: Vec<String>, splits: SplitSpec) -> Self {
        PrepareOptions {
            target: target.into(),
            w_names,
            splits,
            target_tcode_override: Some(5),
            normalize_target: false,
        }
    }
}

/// Runs the full preparation pipeline on a raw table.
pub fn prepare(table: &RawSeriesTable, opts: &PrepareOptions) -> Result<PreparedDataset> {
    let target_col = table.column_index(&opts.target)?;
    if !opts.w_names.contains(&opts.target) {
        return Err(Error::validation(format!(
            "target `{}` must be part of the w set",
            opts.target
        )));
    }
    let mut w_columns = Vec::with_capacity(opts.w_names.len());
    for name in &opts.w_names {
        w_columns.push(table.column_index(name)?);
    }
    let mut seen = w_columns.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != w_columns.len() {
        return Err(Error::validation("duplicate series in w set".to_string()));
    }
    let z_columns: Vec<usize> = (0..table.n_series())
        .filter(|j| !w_columns.contains(j))
        .collect();

    let mut tcodes = table.tcodes.clone();
    if let Some(code) = opts.target_tcode_override {
        if !(1..=7).contains(&code) {
            return Err(Error::validation(format!("bad target tcode override {code}")));
        }
        tcodes[target_col] = code;
    }

    let transformed = transform_panel(&table.values, &tcodes)?;
    let raw = impute_missing(&transformed)?;
    let dates: Vec<Month> = table.dates[COMMON_TRIM..].to_vec();
    let splits = opts.splits.resolve(&dates)?;
    let normalizer = Normalizer::fit(&raw, &table.names, splits.in_sample_end())?;
    let normalized = normalizer.apply(&raw);

    Ok(PreparedDataset {
        dates,
        names: table.names.clone(),
        groups: table.groups.clone(),
        raw,
        normalized,
        normalizer,
        target_col,
        w_columns,
        z_columns,
        splits,
        normalize_target: opts.normalize_target,
    })
}
