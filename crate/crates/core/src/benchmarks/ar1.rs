//! AR(1) benchmark with closed-form multi-step forecasts.

use crate::error::{Error, Result};

/// Least-squares fit of `pi_t = c + phi * pi_{t-1} + nu_t`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Ar1Fit {
    pub intercept: f64,
    pub slope: f64,
    pub residual_variance: f64,
}

pub fn ar1_fit(series: &[f64]) -> Result<Ar1Fit> {
    if series.len() < 3 {
        return Err(Error::validation(format!(
            "AR(1) needs at least 3 observations, got {}",
            series.len()
        )));
    }
    let n = series.len() - 1;
    let x = &series[..n];
    let y = &series[1..];
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 {
        return Err(Error::validation(
            "AR(1) regressor is constant; cannot fit".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut rss = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let r = yi - intercept - slope * xi;
        rss += r * r;
    }
    Ok(Ar1Fit {
        intercept,
        slope,
        residual_variance: rss / n as f64,
    })
}

/// `h`-step forecast from the last observed value:
/// `c (1 - phi^h) / (1 - phi) + phi^h * pi_t`, falling back to the unit-root
/// limit `c h + pi_t` at the formula's pole.
pub fn ar1_forecast(fit: &Ar1Fit, last: f64, horizon: usize) -> f64 {
    assert!(horizon >= 1, "horizon must be at least 1");
    let phi = fit.slope;
    let c = fit.intercept;
    if (1.0 - phi).abs() < 1e-12 {
        return c * horizon as f64 + last;
    }
    let phi_h = phi.powi(horizon as i32);
    c * (1.0 - phi_h) / (1.0 - phi) + phi_h * last
}

/// `h`-fold application of the fitted one-step map; the closed form above
/// must agree with this to machine precision.
pub fn ar1_forecast_recursive(fit: &Ar1Fit, last: f64, horizon: usize) -> f64 {
    let mut value = last;
    for _ in 0..horizon {
        value = fit.intercept + fit.slope * value;
    }
    value
}
