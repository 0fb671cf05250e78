//! Command-line surface. Precedence: flags > config file > defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "macrocast",
    about = "Neural-network CPI inflation forecasting over FRED-MD-style panels",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long, short = 'c')]
    pub config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (overrides config and MACROCAST_WORKERS).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Recompute artifacts even when they already exist.
    #[arg(long)]
    pub force: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ingest the panel, write the prepared/normalized audit CSV and print
    /// the split boundaries.
    Prepare(PrepareArgs),
    /// Two-stage hyperparameter search; writes the selected values.
    Gridsearch(GridsearchArgs),
    /// Rolling out-of-sample forecasts for one model (neural ensemble or a
    /// classical benchmark).
    Run(RunArgs),
    /// Loss-ratio table with significance stars, fluctuation series and the
    /// DM distribution over initializations.
    Evaluate(EvaluateArgs),
    /// Perturbation variable importance aggregated into economic groups.
    Importance(ImportanceArgs),
    /// Extract the LSTM internal memory over the full sample.
    Memory(MemoryArgs),
}

#[derive(Args, Debug)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct GridsearchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Model kinds to search (default: all five).
    #[arg(long, value_delimiter = ',')]
    pub model: Vec<String>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Model id: ff_cpi, ff_pool, lstm_pool, lstm_all, ff_lstm, ar1, ucsv
    /// or fadl.
    #[arg(long)]
    pub model: String,
    /// Horizons to run (default: the config's list).
    #[arg(long, value_delimiter = ',')]
    pub horizon: Vec<usize>,
    /// Ensemble size K (overrides the config).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Models to include (default: the three benchmarks plus all five
    /// neural models).
    #[arg(long, value_delimiter = ',')]
    pub model: Vec<String>,
    /// Horizons to evaluate (default: the config's list).
    #[arg(long, value_delimiter = ',')]
    pub horizon: Vec<usize>,
    /// Horizon for the DM-over-initializations distribution.
    #[arg(long)]
    pub dm_horizon: Option<usize>,
    /// Fluctuation window m (default: about 0.3 of the test length).
    #[arg(long)]
    pub window: Option<usize>,
    /// Star the table with one-sided DM p-values instead of two-sided.
    #[arg(long)]
    pub one_sided_stars: bool,
}

#[derive(Args, Debug)]
pub struct ImportanceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Models to perturb (default: every model consuming the pool).
    #[arg(long, value_delimiter = ',')]
    pub model: Vec<String>,
    /// Horizons (default: 3,6,12,24 intersected with the config's list).
    #[arg(long, value_delimiter = ',')]
    pub horizon: Vec<usize>,
    /// Shock only the most recent lag instead of every lag.
    #[arg(long)]
    pub last_lag_only: bool,
}

#[derive(Args, Debug)]
pub struct MemoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// LSTM-bearing model id (default: lstm_pool).
    #[arg(long, default_value = "lstm_pool")]
    pub model: String,
    /// Forecast horizon the windows are aligned to.
    #[arg(long, default_value_t = 24)]
    pub horizon: usize,
}
