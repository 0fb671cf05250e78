//! Run configuration: one plain-text TOML file shared by every CLI
//! subcommand, with resolved defaults mirroring the reference exercise.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::benchmarks::{FadlConfig, UcsvConfig};
use crate::data::{Group, PrepareOptions, SplitSpec, TableMeta};
use crate::error::{Error, Result};
use crate::eval::GridPlan;
use crate::models::{ModelKind, NetworkSpec};
use crate::neural::{BatchSize, TrainConfig};

fn default_horizons() -> Vec<usize> {
    vec![1, 3, 6, 12, 24]
}

fn default_ensemble_size() -> usize {
    64
}

fn default_cv_repetitions() -> usize {
    140
}

fn default_importance_ensemble() -> usize {
    8
}

fn default_refit_every() -> usize {
    48
}

fn default_target_tcode() -> Option<u8> {
    Some(5)
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Batch size as written in config files: an integer or the word `max`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BatchSetting {
    Size(usize),
    Word(BatchWord),
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchWord {
    Max,
}

impl BatchSetting {
    pub fn to_batch_size(self) -> BatchSize {
        match self {
            BatchSetting::Size(n) => BatchSize::Fixed(n),
            BatchSetting::Word(BatchWord::Max) => BatchSize::Max,
        }
    }
}

/// Per-model overrides on top of the reference optima.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lags: Option<usize>,
    pub w_lags: Option<usize>,
    pub nodes: Option<usize>,
    pub layers: Option<usize>,
    pub state: Option<usize>,
    pub epochs: Option<usize>,
    pub batch: Option<BatchSetting>,
    pub learning_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarksConfig {
    pub ucsv: UcsvConfig,
    pub fadl: FadlConfig,
    /// Refit cadence for the cheap benchmarks (months).
    pub refit_every: usize,
}

impl Default for BenchmarksConfig {
    fn default() -> Self {
        BenchmarksConfig {
            ucsv: UcsvConfig::default(),
            fadl: FadlConfig::default(),
            refit_every: 1,
        }
    }
}

/// Candidate-grid overrides for `gridsearch`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub ff_lags: Option<Vec<usize>>,
    pub ff_nodes: Option<Vec<usize>>,
    pub ff_layers: Option<Vec<usize>>,
    pub lstm_lags: Option<Vec<usize>>,
    pub lstm_layers: Option<Vec<usize>>,
    pub lstm_state: Option<Vec<usize>>,
    pub epochs: Option<Vec<usize>>,
    pub batches: Option<Vec<BatchSetting>>,
    pub repetitions: Option<usize>,
    pub horizon: Option<usize>,
    pub stage1_epochs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: PathBuf,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub target: String,
    /// CPI and components (the w block); must include the target.
    pub w_columns: Vec<String>,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<usize>,
    /// Ensemble size K for `run`.
    #[serde(default = "default_ensemble_size")]
    pub ensemble_size: usize,
    /// Repetitions per grid-search candidate.
    #[serde(default = "default_cv_repetitions")]
    pub cv_repetitions: usize,
    /// Reduced ensemble size for the importance exercise.
    #[serde(default = "default_importance_ensemble")]
    pub importance_ensemble: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_refit_every")]
    pub refit_every: usize,
    /// 0 = use MACROCAST_WORKERS or all cores.
    #[serde(default)]
    pub workers: usize,
    /// Train on `[-1,1]`-normalized targets instead of raw log differences
    /// (forecasts are mapped back before evaluation).
    #[serde(default)]
    pub normalize_target: bool,
    /// Transform code forced onto the target series.
    #[serde(default = "default_target_tcode")]
    pub target_tcode_override: Option<u8>,
    pub splits: SplitSpec,
    /// Group label -> series names. Series not listed fall back to
    /// `default_group`.
    #[serde(default)]
    pub groups: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub default_group: Option<String>,
    /// Sidecar transform codes for files without a transform row.
    #[serde(default)]
    pub tcodes: BTreeMap<String, u8>,
    #[serde(default)]
    pub models: BTreeMap<String, ModelConfig>,
    #[serde(default)]
    pub benchmarks: BenchmarksConfig,
    #[serde(default)]
    pub grid: GridConfig,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() || self.horizons.iter().any(|h| *h < 1) {
            return Err(Error::Config("horizons must be positive".to_string()));
        }
        if self.ensemble_size < 1 {
            return Err(Error::Config("ensemble_size must be at least 1".to_string()));
        }
        if !self.w_columns.contains(&self.target) {
            return Err(Error::Config(format!(
                "w_columns must include the target `{}`",
            self.target
            )));
        }
        for label in self.groups.keys() {
            Group::parse(label)?;
        }
        if let Some(label) = &self.default_group {
            Group::parse(label)?;
        }
        for name in self.models.keys() {
            ModelKind::parse(name)?;
        }
        Ok(())
    }

    pub fn table_meta(&self) -> Result<TableMeta> {
        let mut meta = TableMeta::default();
        for (label, names) in &self.groups {
            let group = Group::parse(label)?;
            for name in names {
                meta.groups.insert(name.clone(), group);
            }
        }
        meta.default_group = match &self.default_group {
            Some(label) => Some(Group::parse(label)?),
            None => None,
        };
        meta.tcodes = self.tcodes.clone().into_iter().collect();
        Ok(meta)
    }

    pub fn prepare_options(&self) -> PrepareOptions {
        PrepareOptions {
            target: self.target.clone(),
            w_names: self.w_columns.clone(),
            splits: self.splits.clone(),
            target_tcode_override: self.target_tcode_override,
            normalize_target: self.normalize_target,
        }
    }

    /// Architecture for a model kind: reference optimum plus any overrides.
    pub fn network_spec(&self, kind: ModelKind, n_pool: usize, n_cpi: usize) -> Result<NetworkSpec> {
        let mut spec = NetworkSpec::reference_optimum(kind, n_pool, n_cpi);
        if let Some(over) = self.models.get(kind.id()) {
            if let Some(v) = over.lags {
                spec.lags = v;
            }
            if let Some(v) = over.w_lags {
                spec.w_lags = Some(v);
            }
            if let Some(v) = over.nodes {
                spec.nodes = v;
            }
            if let Some(v) = over.layers {
                spec.layers = v;
            }
            if let Some(v) = over.state {
                spec.state = Some(v);
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Optimization settings for a model kind (stage-2 reference values
    /// plus overrides).
    pub fn train_config(&self, kind: ModelKind) -> TrainConfig {
        let (epochs, batch) = match kind {
            ModelKind::FfCpi => (200, BatchSize::Fixed(128)),
            ModelKind::FfPool => (400, BatchSize::Fixed(128)),
            ModelKind::LstmPool | ModelKind::LstmAll => (400, BatchSize::Max),
            ModelKind::FfLstm => (400, BatchSize::Fixed(128)),
        };
        let mut cfg = TrainConfig::new(epochs, batch, self.base_seed);
        if let Some(over) = self.models.get(kind.id()) {
            if let Some(v) = over.epochs {
                cfg.epochs = v;
            }
            if let Some(v) = over.batch {
                cfg.batch = v.to_batch_size();
            }
            if let Some(v) = over.learning_rate {
                cfg.learning_rate = v;
            }
        }
        cfg
    }

    pub fn grid_plan(&self, workers: usize) -> GridPlan {
        let mut plan = GridPlan {
            repetitions: self.cv_repetitions,
            refit_every: self.refit_every,
            base_seed: self.base_seed,
            workers,
            ..GridPlan::default()
        };
        let g = &self.grid;
        if let Some(v) = &g.ff_lags {
            plan.ff_lags = v.clone();
        }
        if let Some(v) = &g.ff_nodes {
            plan.ff_nodes = v.clone();
        }
        if let Some(v) = &g.ff_layers {
            plan.ff_layers = v.clone();
        }
        if let Some(v) = &g.lstm_lags {
            plan.lstm_lags = v.clone();
        }
        if let Some(v) = &g.lstm_layers {
            plan.lstm_layers = v.clone();
        }
        if let Some(v) = &g.lstm_state {
            plan.lstm_state = v.clone();
        }
        if let Some(v) = &g.epochs {
            plan.epochs = v.clone();
        }
        if let Some(v) = &g.batches {
            plan.batches = v.iter().map(|b| b.to_batch_size()).collect();
        }
        if let Some(v) = g.repetitions {
            plan.repetitions = v;
        }
        if let Some(v) = g.horizon {
            plan.horizon = v;
        }
        if let Some(v) = g.stage1_epochs {
            plan.stage1_train.epochs = v;
        }
        plan.stage1_train.seed = self.base_seed;
        plan
    }
}
