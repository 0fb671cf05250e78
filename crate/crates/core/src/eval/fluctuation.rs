//! Rolling-window test for time variation in relative forecast accuracy.

use crate::error::{Error, Result};
use crate::eval::dm::dm_statistic;

/// One-sided 5% critical value tabulated for a window share m/P of about
/// 0.3. A statistic above it means the candidate beats the benchmark over
/// that window.
pub const FLUCTUATION_CRITICAL_5PCT: f64 = 2.77;

#[derive(Clone, Debug)]
pub struct FluctuationSeries {
    pub window: usize,
    /// Statistic for each window start `s` (window covers `s..s+m`),
    /// `P - m + 1` entries.
    pub stats: Vec<f64>,
    pub critical_value: f64,
}

impl FluctuationSeries {
    /// Index of the observation at the center of window `k`.
    pub fn center(&self, k: usize) -> usize {
        k + self.window / 2
    }
}

/// Default window: `m/P` of about 0.3, never below the variance-estimate
/// floor of 8.
pub fn default_window(sample_len: usize) -> usize {
    ((0.3 * sample_len as f64).round() as usize).clamp(8, sample_len)
}

/// DM-type statistic over every rolling window of size `m`. With `m = P`
/// this is exactly the single global DM statistic.
pub fn fluctuation_test(diff: &[f64], window: usize) -> Result<FluctuationSeries> {
    let p = diff.len();
    if window > p {
        return Err(Error::validation(format!(
            "window {window} exceeds sample length {p}"
        )));
    }
    if window < 8 {
        return Err(Error::validation(format!(
            "window {window} too small for a usable variance estimate (need >= 8)"
        )));
    }
    let mut stats = Vec::with_capacity(p - window + 1);
    for start in 0..=(p - window) {
        stats.push(dm_statistic(&diff[start..start + window])?);
    }
    Ok(FluctuationSeries {
        window,
        stats,
        critical_value: FLUCTUATION_CRITICAL_5PCT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_differential_gives_a_flat_zero_series() {
        let out = fluctuation_test(&vec![0.0; 50], 10).unwrap();
        assert_eq!(out.stats.len(), 41);
        assert!(out.stats.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn full_window_equals_global_dm() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let d: Vec<f64> = (0..80).map(|_| rng.random_range(-1.0..1.0)).collect();
        let out = fluctuation_test(&d, d.len()).unwrap();
        assert_eq!(out.stats.len(), 1);
        assert_eq!(out.stats[0], dm_statistic(&d).unwrap());
    }

    #[test]
    fn window_statistic_is_the_windowed_dm() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        let d: Vec<f64> = (0..60).map(|_| rng.random_range(-1.0..1.0) + 0.2).collect();
        let m = 20;
        let out = fluctuation_test(&d, m).unwrap();
        for (k, stat) in out.stats.iter().enumerate() {
            assert_eq!(*stat, dm_statistic(&d[k..k + m]).unwrap());
        }
    }

    #[test]
    fn constructed_break_crosses_sign_near_the_break() {
        // Negative differential in the first half (candidate better),
        // positive in the second: the statistic must cross zero close to
        // the break point.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let p = 120;
        let d: Vec<f64> = (0..p)
            .map(|t| {
                let level = if t < p / 2 { -0.5 } else { 0.5 };
                level + rng.random_range(-0.05..0.05)
            })
            .collect();
        let m = 36;
        let out = fluctuation_test(&d, m).unwrap();
        assert!(out.stats.first().unwrap() < &0.0);
        assert!(out.stats.last().unwrap() > &0.0);
        let crossing = out
            .stats
            .windows(2)
            .position(|w| w[0] <= 0.0 && w[1] > 0.0)
            .expect("a sign crossing");
        let crossing_center = out.center(crossing);
        assert!(
            (crossing_center as i64 - (p / 2) as i64).abs() <= m as i64 / 2 + 2,
            "crossing at {crossing_center}, break at {}",
            p / 2
        );
    }

    #[test]
    fn window_bounds_are_validated() {
        assert!(fluctuation_test(&[0.1; 20], 21).is_err());
        assert!(fluctuation_test(&[0.1; 20], 7).is_err());
        assert_eq!(default_window(159), 48);
        assert_eq!(default_window(10), 8);
    }
}
