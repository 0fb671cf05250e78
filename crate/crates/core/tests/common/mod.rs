//! Shared synthetic data for integration tests: a two-factor linear panel
//! whose infeasible conditional-mean forecast is known exactly.

use macrocast_core::data::{
    prepare, Group, Month, PrepareOptions, PreparedDataset, RawSeriesTable, SplitSpec,
};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SyntheticOpts {
    pub rows: usize,
    pub n_pool: usize,
    pub horizon: usize,
    /// Noise standard deviation of the target equation.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticOpts {
    fn default() -> Self {
        SyntheticOpts {
            rows: 240,
            n_pool: 6,
            horizon: 3,
            noise: 0.1,
            seed: 7,
        }
    }
}

pub struct SyntheticData {
    pub dataset: PreparedDataset,
    /// Conditional mean of the target at each prepared-panel row (the
    /// infeasible oracle forecast made `horizon` months earlier).
    pub oracle: Vec<f64>,
}

/// Panel: `n_pool` noisy loadings of two AR(1) factors plus a `cpi` target
/// driven by the lagged factors, and one extra CPI-component column.
/// All tcodes are 1, so preparation only trims and normalizes.
pub fn factor_dataset(opts: &SyntheticOpts) -> SyntheticData {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let t_raw = opts.rows + 2; // prepare trims two leading rows
    let h = opts.horizon;

    let mut f1 = 0.0f64;
    let mut f2 = 0.0f64;
    let mut factors = Vec::with_capacity(t_raw);
    for _ in 0..t_raw {
        f1 = 0.8 * f1 + rng.random_range(-0.5..0.5);
        f2 = -0.3 * f2 + rng.random_range(-0.5..0.5);
        factors.push((f1, f2));
    }

    let loadings: Vec<(f64, f64)> = (0..opts.n_pool)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();

    let n_total = opts.n_pool + 2; // pool + target + one component
    let mut values = Array2::zeros((t_raw, n_total));
    let mut oracle_raw = vec![0.0; t_raw];
    let (a, b) = (0.9, -0.6);
    for t in 0..t_raw {
        for (j, (la, lb)) in loadings.iter().enumerate() {
            values[[t, j]] =
                la * factors[t].0 + lb * factors[t].1 + rng.random_range(-0.05..0.05);
        }
        let mean = if t >= h {
            a * factors[t - h].0 + b * factors[t - h].1
        } else {
            0.0
        };
        oracle_raw[t] = mean;
        let z: f64 = rng.random_range(-1.0..1.0); // bounded noise, sd ~ noise
        values[[t, opts.n_pool]] = mean + opts.noise * z * 3.0f64.sqrt();
        values[[t, opts.n_pool + 1]] = 0.5 * factors[t].0 + rng.random_range(-0.1..0.1);
    }

    let start = Month::new(1980, 1).unwrap();
    let dates: Vec<Month> = (0..t_raw).map(|k| start.add_months(k as i64)).collect();
    let mut names: Vec<String> = (0..opts.n_pool).map(|j| format!("pool_{j}")).collect();
    names.push("cpi".to_string());
    names.push("cpi_comp".to_string());
    let tcodes = vec![1u8; n_total];
    let mut groups = vec![Group::OutputIncome; opts.n_pool];
    groups.push(Group::Prices);
    groups.push(Group::Prices);

    let table = RawSeriesTable::new(dates, names, values, tcodes, groups).unwrap();
    let mut prep = PrepareOptions::new(
        "cpi",
        vec!["cpi".to_string(), "cpi_comp".to_string()],
        SplitSpec::Fractions {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
        },
    );
    prep.target_tcode_override = None;
    let dataset = prepare(&table, &prep).unwrap();

    SyntheticData {
        dataset,
        oracle: oracle_raw[2..].to_vec(),
    }
}

/// RMSE of the infeasible oracle over the test window.
#[allow(dead_code)]
pub fn oracle_test_rmse(data: &SyntheticData) -> f64 {
    let d = &data.dataset;
    let target = d.target_series();
    let (start, end) = (d.splits.test_start(), d.splits.test_end);
    let mut acc = 0.0;
    for r in start..end {
        let e = target[r] - data.oracle[r];
        acc += e * e;
    }
    (acc / (end - start) as f64).sqrt()
}
