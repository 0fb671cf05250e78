//! Out-of-sample evaluation: rolling forecasts, ensembles, accuracy tests,
//! variable importance and hyperparameter search.

mod dm;
mod executor;
mod fluctuation;
mod grid;
mod importance;
mod rolling;
mod runs;

pub use dm::{
    dm_distribution, dm_p_value, dm_p_value_one_sided, dm_statistic, significance_stars,
    DmDistribution, LossDifferential,
};
pub use executor::{resolve_workers, run_parallel};
pub use fluctuation::{
    default_window, fluctuation_test, FluctuationSeries, FLUCTUATION_CRITICAL_5PCT,
};
pub use grid::{grid_search, GridOutcome, GridPlan};
pub use importance::{
    build_importance_table, variable_importance, ImportanceOptions, ImportanceTable, VariableGain,
};
pub use rolling::{
    refit_schedule, rolling_benchmark, rolling_forecast, rolling_forecast_over,
    rows_with_targets_in, BenchmarkKind, BenchmarkSettings, RollingConfig, TargetRange,
};
pub use runs::{ensemble, loss_ratio, ForecastRun, LossKind};
