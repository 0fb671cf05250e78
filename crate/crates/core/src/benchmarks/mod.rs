//! Classical forecasting benchmarks: AR(1), UC-SV and the factor-augmented
//! distributed-lag regression.

mod ar1;
mod fadl;
mod ucsv;

pub use ar1::{ar1_fit, ar1_forecast, ar1_forecast_recursive, Ar1Fit};
pub use fadl::{
    distributed_lag_forecast, fadl_fit_forecast, principal_components, standardize, FadlConfig,
    FadlFit, Pca,
};
pub use ucsv::{simulate_ucsv, ucsv_fit, UcsvConfig, UcsvFit};
