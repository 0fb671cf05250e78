//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Criterion 7 needs the user-supplied October-2019
//! FRED-MD vintage and is skipped (with a notice) when the
//! `MACROCAST_FREDMD` environment variable is unset; see the README.

mod common;

use common::{factor_dataset, oracle_test_rmse, SyntheticOpts};
use macrocast_core::benchmarks::{
    ar1_forecast, ar1_forecast_recursive, fadl_fit_forecast, principal_components, simulate_ucsv,
    standardize, ucsv_fit, Ar1Fit, FadlConfig, UcsvConfig, UcsvFit,
};
use macrocast_core::data::{load_table, prepare, Month, PrepareOptions, SplitSpec, TableMeta};
use macrocast_core::eval::{
    dm_statistic, ensemble, fluctuation_test, loss_ratio, rolling_benchmark, rolling_forecast,
    rolling_forecast_over, run_parallel, BenchmarkKind, BenchmarkSettings, LossDifferential,
    LossKind, RollingConfig, TargetRange,
};
use macrocast_core::models::{AssembledModel, ModelKind, NetworkSpec};
use macrocast_core::neural::{loss_gradient, BatchSize, Model, TrainConfig};
use ndarray::{concatenate, Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(n: usize, what: &str) {
    println!("[PASS] criterion {n}: {what}");
}

// --- 1 -------------------------------------------------------------------

#[test]
fn criterion_1_parameter_counts() {
    let expected = [
        (ModelKind::FfCpi, 80_513),
        (ModelKind::FfPool, 758_273),
        (ModelKind::LstmPool, 51_017),
        (ModelKind::LstmAll, 51_097),
        (ModelKind::FfLstm, 81_737),
    ];
    for (kind, want) in expected {
        let spec = NetworkSpec::reference_optimum(kind, 118, 10);
        assert_eq!(spec.param_count(), want, "{kind} closed form");
        let model = AssembledModel::build(spec).unwrap();
        assert_eq!(model.param_count(), want, "{kind} assembled");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let kind = ModelKind::ALL[rng.random_range(0..5)];
        let spec = NetworkSpec {
            kind,
            lags: rng.random_range(1..7),
            w_lags: matches!(kind, ModelKind::FfLstm).then(|| rng.random_range(1..6)),
            nodes: rng.random_range(1..12),
            layers: rng.random_range(1..5),
            state: kind.has_lstm().then(|| rng.random_range(1..6)),
            n_pool: rng.random_range(1..9),
            n_cpi: rng.random_range(1..6),
        };
        let model = AssembledModel::build(spec).unwrap();
        assert_eq!(model.param_count(), spec.param_count(), "{spec:?}");
    }
    pass(1, "published parameter counts and 100 random assembled specs");
}

// --- 2 -------------------------------------------------------------------

fn gradient_check(spec: NetworkSpec, seed: u64) {
    let model = AssembledModel::build(spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<f64> = (0..model.param_count())
        .map(|_| rng.random_range(-0.8..0.8))
        .collect();
    let rows = rng.random_range(3..8);
    let inputs = Array2::from_shape_fn((rows, spec.input_width()), |_| rng.random_range(-1.0..1.0));
    let targets = Array1::from_shape_fn(rows, |_| rng.random_range(-1.0..1.0));
    let prepared = model.prepare(inputs.view()).unwrap();
    let (_, analytic) = loss_gradient(&model, &params, &prepared, targets.view()).unwrap();

    let mse = |theta: &[f64]| -> f64 {
        let (preds, _) = model.forward(theta, &prepared, false).unwrap();
        preds
            .iter()
            .zip(targets.iter())
            .map(|(p, y)| (p - y) * (p - y))
            .sum::<f64>()
            / rows as f64
    };
    let step = 1e-6;
    let mut theta = params.clone();
    for i in 0..theta.len() {
        let keep = theta[i];
        theta[i] = keep + step;
        let up = mse(&theta);
        theta[i] = keep - step;
        let down = mse(&theta);
        theta[i] = keep;
        let numeric = (up - down) / (2.0 * step);
        let analytic_i = analytic[i];
        let rel = (analytic_i - numeric).abs() / 1.0f64.max(analytic_i.abs()).max(numeric.abs());
        assert!(
            rel <= 1e-6,
            "{:?} seed {seed} param {i}: {analytic_i} vs {numeric} (rel {rel:.2e})",
            spec.kind
        );
    }
}

#[test]
fn criterion_2_gradient_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..20 {
        let kind = if trial % 2 == 0 { ModelKind::FfCpi } else { ModelKind::FfPool };
        gradient_check(
            NetworkSpec {
                kind,
                lags: rng.random_range(1..4),
                w_lags: None,
                nodes: rng.random_range(1..=8),
                layers: rng.random_range(1..=3),
                state: None,
                n_pool: rng.random_range(1..5),
                n_cpi: rng.random_range(1..4),
            },
            4000 + trial,
        );
    }
    for trial in 0..20 {
        let kind = if trial % 2 == 0 { ModelKind::LstmPool } else { ModelKind::LstmAll };
        gradient_check(
            NetworkSpec {
                kind,
                lags: rng.random_range(1..=6),
                w_lags: None,
                nodes: rng.random_range(1..=6),
                layers: rng.random_range(1..=2),
                state: Some(rng.random_range(1..=4)),
                n_pool: rng.random_range(1..4),
                n_cpi: rng.random_range(1..3),
            },
            5000 + trial,
        );
    }
    pass(2, "analytic gradients within 1e-6 of central differences (20 FF + 20 LSTM)");
}

// --- 3 -------------------------------------------------------------------

fn dm_bruteforce(diff: &[f64]) -> f64 {
    let p = diff.len();
    let mean = diff.iter().sum::<f64>() / p as f64;
    let s = (p as f64).powf(1.0 / 3.0);
    let mut lrv = 0.0;
    for tau in -(p as i64 - 1)..=(p as i64 - 1) {
        if (tau as f64 / s).abs() <= 1.0 {
            let a = tau.unsigned_abs() as usize;
            let mut g = 0.0;
            for t in a..p {
                g += (diff[t] - mean) * (diff[t - a] - mean);
            }
            lrv += g / p as f64;
        }
    }
    if lrv <= 0.0 {
        let sign = if mean > 0.0 { 1.0 } else if mean < 0.0 { -1.0 } else { 0.0 };
        return 4.0 * sign;
    }
    mean / (lrv / p as f64).sqrt()
}

#[test]
fn criterion_3_statistic_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..500 {
        let p = rng.random_range(2..250);
        let d: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = dm_statistic(&d).unwrap();
        let slow = dm_bruteforce(&d);
        assert!(
            (fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()),
            "trial {trial}: {fast} vs {slow}"
        );
    }
    // Degenerate rules.
    assert_eq!(dm_statistic(&vec![0.0; 50]).unwrap(), 0.0);
    let alternating: Vec<f64> = (0..30)
        .map(|t| if t % 2 == 0 { 1.01 } else { -0.99 })
        .collect();
    assert_eq!(dm_statistic(&alternating).unwrap(), 4.0);
    let flipped: Vec<f64> = alternating.iter().map(|v| -v).collect();
    assert_eq!(dm_statistic(&flipped).unwrap(), -4.0);
    // Fluctuation with m = P is the global statistic.
    for seed in 0..20 {
        let mut r = ChaCha8Rng::seed_from_u64(300 + seed);
        let d: Vec<f64> = (0..90).map(|_| r.random_range(-1.0..1.0)).collect();
        let series = fluctuation_test(&d, d.len()).unwrap();
        assert_eq!(series.stats, vec![dm_statistic(&d).unwrap()]);
    }
    pass(3, "DM matches the brute-force kernel sum; tie and sentinel rules; m=P fluctuation");
}

// --- 4 -------------------------------------------------------------------

#[test]
fn criterion_4_benchmark_correctness() {
    // AR(1): closed form vs recursion, 1000 cases.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let fit = Ar1Fit {
            intercept: rng.random_range(-1.0..1.0),
            slope: rng.random_range(-0.99..0.99),
            residual_variance: 1.0,
        };
        let last = rng.random_range(-5.0..5.0);
        let h = rng.random_range(1..=24);
        let a = ar1_forecast(&fit, last, h);
        let b = ar1_forecast_recursive(&fit, last, h);
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    // UC-SV: simulation-based coverage of the innovation variances.
    let truth = 0.04;
    let cfg = UcsvConfig {
        draws: 2500,
        burn_in: 500,
        ..UcsvConfig::default()
    };
    let mut covered_tau = 0usize;
    let mut covered_h = 0usize;
    let reps = 50usize;
    for rep in 0..reps {
        let series = simulate_ucsv(200, truth, truth, 0.12, 40_000 + rep as u64);
        let fit = ucsv_fit(&series, &UcsvConfig { seed: 41_000 + rep as u64, ..cfg }).unwrap();
        let (lo, hi) = UcsvFit::credible_interval(&fit.omega_tau2_draws, 0.95);
        covered_tau += usize::from(lo <= truth && truth <= hi);
        let (lo, hi) = UcsvFit::credible_interval(&fit.omega_h2_draws, 0.95);
        covered_h += usize::from(lo <= truth && truth <= hi);
    }
    assert!(covered_tau * 100 >= 90 * reps, "trend-variance coverage {covered_tau}/{reps}");
    assert!(covered_h * 100 >= 90 * reps, "vol-variance coverage {covered_h}/{reps}");

    // FADL: zero residuals return the exact OLS forecast.
    let mut target = Vec::with_capacity(60);
    let mut v: f64 = 1.0;
    for _ in 0..60 {
        target.push(v);
        v = 0.2 + 0.9 * v;
    }
    let fit = fadl_fit_forecast(
        &target,
        Array2::zeros((60, 0)).view(),
        1,
        &FadlConfig { ar_lags: 1, factors: 0, bootstrap: 500, seed: 2 },
    )
    .unwrap();
    assert!((fit.point_forecast - fit.ols_forecast).abs() < 1e-9);

    // PCA against a Jacobi eigensolver (oracle in this file's helper).
    let panel = Array2::from_shape_fn((10, 5), |_| rng.random_range(-2.0..2.0));
    let standardized = standardize(panel.view()).unwrap();
    let pca = principal_components(standardized.view(), 5).unwrap();
    let (vals, vecs) = jacobi(&standardized);
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    for (k, &idx) in order.iter().enumerate() {
        assert!((pca.eigenvalues[k] - vals[idx]).abs() < 1e-10);
        let mut same = 0.0;
        let mut flip = 0.0;
        for row in 0..5 {
            let a = pca.loadings[[row, k]];
            let b = vecs[row][idx];
            same += (a - b) * (a - b);
            flip += (a + b) * (a + b);
        }
        assert!(same.sqrt().min(flip.sqrt()) < 1e-10);
    }
    pass(4, "AR(1) recursion oracle, UC-SV coverage >= 90%, FADL degenerate bootstrap, PCA oracle");
}

fn jacobi(standardized: &Array2<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = standardized.ncols();
    let t = standardized.nrows();
    let mut a = vec![vec![0.0; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for r in 0..t {
                s += standardized[[r, i]] * standardized[[r, j]];
            }
            a[i][j] = s / t as f64;
        }
    }
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..300 {
        let mut off = 0.0;
        let (mut p, mut q) = (0, 1);
        for i in 0..n {
            for j in (i + 1)..n {
                if a[i][j].abs() > off {
                    off = a[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if off < 1e-14 {
            break;
        }
        let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
        let tt = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (tt * tt + 1.0).sqrt();
        let s = tt * c;
        for k in 0..n {
            let akp = a[k][p];
            let akq = a[k][q];
            a[k][p] = c * akp - s * akq;
            a[k][q] = s * akp + c * akq;
        }
        for k in 0..n {
            let apk = a[p][k];
            let aqk = a[q][k];
            a[p][k] = c * apk - s * aqk;
            a[q][k] = s * apk + c * aqk;
        }
        for k in 0..n {
            let vkp = v[k][p];
            let vkq = v[k][q];
            v[k][p] = c * vkp - s * vkq;
            v[k][q] = s * vkp + c * vkq;
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

// --- 5 -------------------------------------------------------------------

#[test]
fn criterion_5_no_leakage() {
    let data = factor_dataset(&SyntheticOpts::default());
    let d = &data.dataset;
    let horizon = 3;
    let rolling = RollingConfig { refit_every: 7 };
    let mut train_cfg = TrainConfig::new(12, BatchSize::Max, 9);
    train_cfg.learning_rate = 5e-3;

    for kind in [ModelKind::FfPool, ModelKind::LstmPool, ModelKind::FfLstm] {
        let spec = NetworkSpec {
            kind,
            lags: 3,
            w_lags: matches!(kind, ModelKind::FfLstm).then_some(2),
            nodes: 4,
            layers: 1,
            state: kind.has_lstm().then_some(2),
            n_pool: d.z_columns.len(),
            n_cpi: d.w_columns.len(),
        };
        let model = AssembledModel::build(spec).unwrap();
        let clean = rolling_forecast(&model, d, horizon, 9, &train_cfg, &rolling).unwrap();

        // Corrupt everything after each of several origins and compare the
        // forecasts made at or before it.
        for &offset in &[10usize, 40, 80] {
            let cut = d.splits.test_start() + offset - horizon;
            let mut corrupted = d.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for i in (cut + 1)..corrupted.n_rows() {
                for j in 0..corrupted.n_series() {
                    corrupted.raw[[i, j]] = rng.random_range(-1e3..1e3);
                    corrupted.normalized[[i, j]] = rng.random_range(-1e3..1e3);
                }
            }
            let dirty =
                rolling_forecast(&model, &corrupted, horizon, 9, &train_cfg, &rolling).unwrap();
            for i in 0..clean.len() {
                let target_row = d.splits.test_start() + i;
                if target_row - horizon <= cut {
                    assert_eq!(
                        clean.forecasts[i].to_bits(),
                        dirty.forecasts[i].to_bits(),
                        "{kind}: leak at forecast {i} with cut {offset}"
                    );
                }
            }
        }
    }
    pass(5, "corrupting post-origin rows leaves rolling forecasts bit-identical");
}

// --- 6 -------------------------------------------------------------------

#[test]
fn criterion_6_lstm_boundedness_and_nesting() {
    // Boundedness on 10^4 random windows.
    let spec = NetworkSpec {
        kind: ModelKind::LstmPool,
        lags: 4,
        w_lags: None,
        nodes: 4,
        layers: 1,
        state: Some(2),
        n_pool: 5,
        n_cpi: 1,
    };
    let model = AssembledModel::build(spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut seen = 0;
    while seen < 10_000 {
        let params: Vec<f64> = (0..model.param_count())
            .map(|_| rng.random_range(-1.5..1.5))
            .collect();
        let inputs =
            Array2::from_shape_fn((500, spec.input_width()), |_| rng.random_range(-3.0..3.0));
        let memory = model.internal_memory(&params, inputs.view()).unwrap();
        for v in memory.iter() {
            assert!(v.abs() < 1.0, "memory component {v} outside (-1,1)");
        }
        seen += memory.nrows();
    }

    // Nesting: silence the LSTM path of a composite model and compare with
    // the plain CPI network parameter for parameter.
    let n_pool = 4;
    let n_cpi = 3;
    let w_lags = 3;
    let composite = AssembledModel::build(NetworkSpec {
        kind: ModelKind::FfLstm,
        lags: 5,
        w_lags: Some(w_lags),
        nodes: 6,
        layers: 3,
        state: Some(2),
        n_pool,
        n_cpi,
    })
    .unwrap();
    let cpi = AssembledModel::build(NetworkSpec {
        kind: ModelKind::FfCpi,
        lags: w_lags,
        w_lags: None,
        nodes: 6,
        layers: 3,
        state: None,
        n_pool,
        n_cpi,
    })
    .unwrap();
    let mut comp_params: Vec<f64> = (0..composite.param_count())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let layout = composite.layout();
    for entry in layout.entries() {
        if entry.name.starts_with("lstm.") {
            for v in comp_params[entry.offset..entry.offset + entry.len()].iter_mut() {
                *v = 0.0;
            }
        }
    }
    let w_width = n_cpi * w_lags;
    let e = layout.entry(layout.handle("dense.w1").unwrap());
    for r in 0..e.rows {
        for c in w_width..e.cols {
            comp_params[e.offset + r * e.cols + c] = 0.0;
        }
    }
    let mut cpi_params = vec![0.0; cpi.param_count()];
    for entry in cpi.layout().entries() {
        let se = layout.entry(layout.handle(&entry.name).unwrap());
        if entry.name == "dense.w1" {
            for r in 0..entry.rows {
                for c in 0..entry.cols {
                    cpi_params[entry.offset + r * entry.cols + c] =
                        comp_params[se.offset + r * se.cols + c];
                }
            }
        } else {
            cpi_params[entry.offset..entry.offset + entry.len()]
                .copy_from_slice(&comp_params[se.offset..se.offset + se.len()]);
        }
    }
    let rows = 50;
    let w_block = Array2::from_shape_fn((rows, w_width), |_| rng.random_range(-1.0..1.0));
    let z_block = Array2::from_shape_fn((rows, n_pool * 5), |_| rng.random_range(-1.0..1.0));
    let composite_inputs = concatenate![Axis(1), z_block, w_block];
    let from_composite = macrocast_core::neural::predict_batch(
        &composite,
        &comp_params,
        composite_inputs.view(),
    )
    .unwrap();
    let from_cpi =
        macrocast_core::neural::predict_batch(&cpi, &cpi_params, w_block.view()).unwrap();
    assert_eq!(from_composite, from_cpi);
    pass(6, "internal memory strictly inside (-1,1); silenced composite equals ff_cpi exactly");
}

// --- 7 -------------------------------------------------------------------

/// CPI and its nine components in FRED-MD naming.
const FRED_W_COLUMNS: [&str; 10] = [
    "CPIAUCSL",
    "CPIAPPSL",
    "CPITRNSL",
    "CPIMEDSL",
    "CUSR0000SAC",
    "CUSR0000SAD",
    "CUSR0000SAS",
    "CPIULFSL",
    "CUSR0000SA0L2",
    "CUSR0000SA0L5",
];

#[test]
fn criterion_7_fred_md_directional_reproduction() {
    let Some(csv) = std::env::var_os("MACROCAST_FREDMD") else {
        println!(
            "[SKIP] criterion 7: set MACROCAST_FREDMD=/path/to/2019-10.csv to run the \
             desk-scale FRED-MD reproduction (hours; see README)"
        );
        return;
    };
    let k_members: usize = std::env::var("MACROCAST_FREDMD_K")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(64);
    let workers = macrocast_core::eval::resolve_workers(None);

    let meta = TableMeta {
        default_group: Some(macrocast_core::data::Group::Prices),
        ..TableMeta::default()
    };
    let table = load_table(std::path::Path::new(&csv), &meta).expect("read FRED-MD vintage");
    let opts = PrepareOptions::new(
        "CPIAUCSL",
        FRED_W_COLUMNS.iter().map(|s| s.to_string()).collect(),
        SplitSpec::fred_md_default(),
    );
    let data = prepare(&table, &opts).expect("prepare FRED-MD panel");
    assert_eq!(data.splits.test_len(), 159, "out-of-sample size");

    let horizon = 24;
    let ar1 = rolling_benchmark(
        BenchmarkKind::Ar1,
        &data,
        horizon,
        &BenchmarkSettings::default(),
        TargetRange::test(&data),
    )
    .expect("AR(1) reference");

    let n_pool = data.z_columns.len();
    let n_cpi = data.w_columns.len();
    for kind in [ModelKind::LstmPool, ModelKind::LstmAll, ModelKind::FfLstm] {
        let spec = NetworkSpec::reference_optimum(kind, n_pool, n_cpi);
        let train_cfg = match kind {
            ModelKind::FfLstm => TrainConfig::new(400, BatchSize::Fixed(128), 0),
            _ => TrainConfig::new(400, BatchSize::Max, 0),
        };
        let model = AssembledModel::build(spec).expect("assemble");
        let rolling = RollingConfig { refit_every: 48 };
        let runs: Vec<_> = run_parallel(workers, (0..k_members as u64).collect(), |k| {
            rolling_forecast(&model, &data, horizon, k, &train_cfg, &rolling)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .expect("member runs");
        let ens = ensemble(&runs).expect("ensemble");
        let ratio = loss_ratio(&ens, &ar1, LossKind::Rmse).expect("ratio");
        println!("criterion 7: {kind} h=24 RMSE ratio vs AR(1) = {ratio:.3} (K={k_members})");
        assert!(ratio < 1.0, "{kind} ratio {ratio} >= 1.0");
    }
    pass(7, "h=24 LSTM ensembles beat AR(1) on the 2019-10 vintage at reduced K");
}

// --- 8 -------------------------------------------------------------------

#[test]
fn criterion_8_ensemble_dominance() {
    let horizon = 24;
    let data = factor_dataset(&SyntheticOpts {
        rows: 300,
        n_pool: 6,
        horizon,
        noise: 0.1,
        seed: 8,
    });
    let d = &data.dataset;
    let spec = NetworkSpec {
        kind: ModelKind::LstmPool,
        lags: 6,
        w_lags: None,
        nodes: 6,
        layers: 1,
        state: Some(2),
        n_pool: d.z_columns.len(),
        n_cpi: d.w_columns.len(),
    };
    let model = AssembledModel::build(spec).unwrap();
    let mut train_cfg = TrainConfig::new(80, BatchSize::Max, 0);
    train_cfg.learning_rate = 5e-3;
    let rolling = RollingConfig { refit_every: 24 };
    let k_members = 64u64;
    let workers = macrocast_core::eval::resolve_workers(None);
    let runs: Vec<_> = run_parallel(workers, (0..k_members).collect(), |k| {
        rolling_forecast(&model, d, horizon, 1000 + k, &train_cfg, &rolling)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .unwrap();
    let ens = ensemble(&runs).unwrap();
    let ens_errors = ens.errors();

    let mut deltas = Vec::with_capacity(runs.len());
    for run in &runs {
        let d_k = LossDifferential::squared(&run.errors(), &ens_errors, horizon).unwrap();
        deltas.push(dm_statistic(&d_k.values).unwrap());
    }
    let mut sorted = deltas.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let beat = deltas.iter().filter(|v| **v < -1.96).count();
    println!(
        "criterion 8: median DM over {} members = {median:.3}, {beat} beat the ensemble at 5%",
        runs.len()
    );
    assert!(median >= 0.0, "median {median} < 0");
    assert!(
        beat * 10 <= runs.len(),
        "{beat} of {} members beat the ensemble at the 5% level",
        runs.len()
    );
    pass(8, "ensemble at least as good as members (median DM >= 0, <= 10% significant losses)");
}

// --- 9 -------------------------------------------------------------------

#[test]
fn criterion_9_synthetic_recovery() {
    let horizon = 3;
    let data = factor_dataset(&SyntheticOpts {
        rows: 300,
        n_pool: 6,
        horizon,
        noise: 0.1,
        seed: 9,
    });
    let d = &data.dataset;
    let spec = NetworkSpec {
        kind: ModelKind::LstmPool,
        lags: 12,
        w_lags: None,
        nodes: 8,
        layers: 1,
        state: Some(2),
        n_pool: d.z_columns.len(),
        n_cpi: d.w_columns.len(),
    };
    let model = AssembledModel::build(spec).unwrap();
    let rolling = RollingConfig { refit_every: 24 };
    let workers = macrocast_core::eval::resolve_workers(None);

    // Stage-2-style search over epochs with the architecture frozen,
    // scored on the validation span.
    let mut best: Option<(usize, f64)> = None;
    for epochs in [150usize, 300, 600] {
        let mut cfg = TrainConfig::new(epochs, BatchSize::Max, 0);
        cfg.learning_rate = 5e-3;
        let runs: Vec<_> = run_parallel(workers, (0..4u64).collect(), |k| {
            rolling_forecast_over(
                &model,
                d,
                horizon,
                2000 + k,
                &cfg,
                &rolling,
                TargetRange::validation(d),
            )
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .unwrap();
        let score = ensemble(&runs).unwrap().loss(LossKind::Rmse);
        if best.map(|(_, s)| score < s).unwrap_or(true) {
            best = Some((epochs, score));
        }
    }
    let (epochs, val_score) = best.unwrap();

    // Final out-of-sample ensemble with the selected epochs.
    let mut cfg = TrainConfig::new(epochs, BatchSize::Max, 0);
    cfg.learning_rate = 5e-3;
    let runs: Vec<_> = run_parallel(workers, (0..8u64).collect(), |k| {
        rolling_forecast(&model, d, horizon, 3000 + k, &cfg, &rolling)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .unwrap();
    let ens = ensemble(&runs).unwrap();
    let model_rmse = ens.loss(LossKind::Rmse);
    let oracle_rmse = oracle_test_rmse(&data);
    println!(
        "criterion 9: epochs={epochs} (val {val_score:.4}), OOS RMSE {model_rmse:.4} vs oracle {oracle_rmse:.4}"
    );
    assert!(
        model_rmse <= 1.10 * oracle_rmse,
        "model {model_rmse} vs oracle {oracle_rmse}"
    );
    pass(9, "LSTM-pool within 10% of the generator oracle after epoch search");
}

// Month sanity used by the reference calendar (kept here so the acceptance
// suite is self-contained).
#[test]
fn reference_calendar_p_is_159() {
    let start = Month::new(2006, 8).unwrap();
    let end = Month::new(2019, 10).unwrap();
    assert_eq!(end.months_since(start) + 1, 159);
}
