//! Diebold–Mariano equal-accuracy statistic with a uniform-window spectral
//! estimate of the long-run variance.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Paired loss-differential series `d_t` over an out-of-sample window.
/// Positive values favor the second (reference) forecast.
#[derive(Clone, Debug)]
pub struct LossDifferential {
    pub values: Vec<f64>,
    pub horizon: usize,
}

impl LossDifferential {
    /// Squared-error differential `e_first^2 - e_reference^2`.
    pub fn squared(first_errors: &[f64], reference_errors: &[f64], horizon: usize) -> Result<Self> {
        if first_errors.len() != reference_errors.len() {
            return Err(Error::shape(format!(
                "error series lengths differ: {} vs {}",
                first_errors.len(),
                reference_errors.len()
            )));
        }
        Ok(LossDifferential {
            values: first_errors
                .iter()
                .zip(reference_errors)
                .map(|(a, b)| a * a - b * b)
                .collect(),
            horizon,
        })
    }
}

/// Sample autocovariance with divisor `P` at lag `tau >= 0`.
fn autocovariance(values: &[f64], mean: f64, tau: usize) -> f64 {
    let p = values.len();
    let mut acc = 0.0;
    for t in tau..p {
        acc += (values[t] - mean) * (values[t - tau] - mean);
    }
    acc / p as f64
}

/// The DM statistic `mean(d) / sqrt(2 pi f_d(0) / P)` where the long-run
/// variance sums autocovariances under a uniform lag window with truncation
/// `S(P) = P^(1/3)`.
///
/// Degenerate rules: an identically-zero differential returns 0 (exact tie);
/// a non-positive variance estimate returns `4 * sign(mean(d))`.
pub fn dm_statistic(diff: &[f64]) -> Result<f64> {
    let p = diff.len();
    if p < 2 {
        return Err(Error::validation(format!(
            "DM statistic needs at least 2 observations, got {p}"
        )));
    }
    if diff.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let mean = diff.iter().sum::<f64>() / p as f64;
    let lrv = long_run_variance(diff, mean);
    if lrv <= 0.0 {
        return Ok(4.0 * sign(mean));
    }
    Ok(mean / (lrv / p as f64).sqrt())
}

/// `2 pi f_d(0)`: gamma(0) plus twice the gammas up to the truncation lag.
fn long_run_variance(diff: &[f64], mean: f64) -> f64 {
    let p = diff.len();
    let truncation = (p as f64).powf(1.0 / 3.0);
    let max_lag = (truncation.floor() as usize).min(p - 1);
    let mut lrv = autocovariance(diff, mean, 0);
    for tau in 1..=max_lag {
        lrv += 2.0 * autocovariance(diff, mean, tau);
    }
    lrv
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Two-sided normal p-value for a DM statistic.
pub fn dm_p_value(stat: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    2.0 * (1.0 - normal.cdf(stat.abs()))
}

/// One-sided p-value for "the candidate beats the reference", under the
/// convention that negative statistics favor the candidate.
pub fn dm_p_value_one_sided(stat: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    normal.cdf(stat)
}

/// Table stars at the 10/5/1% two-sided levels.
pub fn significance_stars(p_value: f64) -> &'static str {
    if p_value < 0.01 {
        "***"
    } else if p_value < 0.05 {
        "**"
    } else if p_value < 0.1 {
        "*"
    } else {
        ""
    }
}

/// DM statistics of each ensemble member against the ensemble itself, with
/// the share of members beyond the two-sided 5% and 1% critical values.
#[derive(Clone, Debug)]
pub struct DmDistribution {
    pub deltas: Vec<f64>,
    pub share_beyond_5pct: f64,
    pub share_beyond_1pct: f64,
}

pub fn dm_distribution(member_diffs: &[Vec<f64>]) -> Result<DmDistribution> {
    let mut deltas = Vec::with_capacity(member_diffs.len());
    for d in member_diffs {
        deltas.push(dm_statistic(d)?);
    }
    let total = deltas.len().max(1) as f64;
    let share_beyond_5pct = deltas.iter().filter(|d| d.abs() > 1.96).count() as f64 / total;
    let share_beyond_1pct = deltas.iter().filter(|d| d.abs() > 2.576).count() as f64 / total;
    Ok(DmDistribution {
        deltas,
        share_beyond_5pct,
        share_beyond_1pct,
    })
}
