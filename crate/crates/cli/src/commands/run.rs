//! `run`: rolling forecasts for one model, ensembled over seeds for the
//! neural architectures.

use std::fs;
use std::io::BufReader;

use anyhow::Context;
use macrocast_core::eval::{
    ensemble, rolling_benchmark, rolling_forecast, run_parallel, BenchmarkKind,
    BenchmarkSettings, ForecastRun, RollingConfig, TargetRange,
};
use macrocast_core::models::{AssembledModel, ModelKind};

use crate::args::RunArgs;
use crate::failure::{user_error, CommandResult, Failure, IntoFailure};
use crate::workspace::{write_atomic, Workspace};

pub fn run(args: &RunArgs) -> CommandResult {
    let ws = Workspace::open(&args.common).user()?;
    let horizons = if args.horizon.is_empty() {
        ws.config.horizons.clone()
    } else {
        args.horizon.clone()
    };

    if let Some(kind) = BenchmarkKind::parse(&args.model) {
        return run_benchmark(&ws, kind, &horizons);
    }
    let kind = ModelKind::parse(&args.model).user()?;
    run_neural(&ws, kind, &horizons, args.k)
}

fn write_run(path: &std::path::Path, run: &ForecastRun) -> Result<(), Failure> {
    let mut buf = Vec::new();
    run.write_csv(&mut buf).runtime()?;
    write_atomic(path, &buf).runtime()
}

fn load_run(path: &std::path::Path, model: &str, seed: u64) -> anyhow::Result<ForecastRun> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(ForecastRun::read_csv(&mut BufReader::new(file), model, seed)?)
}

fn run_benchmark(ws: &Workspace, kind: BenchmarkKind, horizons: &[usize]) -> CommandResult {
    let mut settings = BenchmarkSettings {
        ucsv: ws.config.benchmarks.ucsv,
        fadl: ws.config.benchmarks.fadl,
        refit_every: ws.config.benchmarks.refit_every,
    };
    settings.ucsv.seed = ws.seed;
    settings.fadl.seed = ws.seed;
    let data = ws.dataset().user()?;
    for &h in horizons {
        let path = ws.run_file(kind.id(), h, None).runtime()?;
        if ws.can_skip(&path) {
            println!("run: {} exists, skipping", path.display());
            continue;
        }
        let run = rolling_benchmark(kind, &data, h, &settings, TargetRange::test(&data)).runtime()?;
        write_run(&path, &run)?;
        println!("wrote {}", path.display());
    }
    ws.write_effective_config().runtime()?;
    Ok(())
}

fn run_neural(
    ws: &Workspace,
    kind: ModelKind,
    horizons: &[usize],
    k_override: Option<usize>,
) -> CommandResult {
    let data = ws.dataset().user()?;
    let spec = ws
        .config
        .network_spec(kind, data.z_columns.len(), data.w_columns.len())
        .user()?;
    let train = ws.config.train_config(kind);
    let rolling = RollingConfig {
        refit_every: ws.config.refit_every,
    };
    let k_total = k_override.unwrap_or(ws.config.ensemble_size).max(1);
    let model = AssembledModel::build(spec).user()?;

    for &h in horizons {
        let ens_path = ws.run_file(kind.id(), h, None).runtime()?;
        if ws.can_skip(&ens_path) {
            println!("run: {} exists, skipping", ens_path.display());
            continue;
        }

        // Reuse member files from interrupted runs; compute the rest.
        let mut members: Vec<Option<ForecastRun>> = vec![None; k_total];
        let mut missing = Vec::new();
        for (k, slot) in members.iter_mut().enumerate() {
            let path = ws.run_file(kind.id(), h, Some(k)).runtime()?;
            if ws.can_skip(&path) {
                *slot = Some(load_run(&path, kind.id(), ws.seed + k as u64).runtime()?);
            } else {
                missing.push(k);
            }
        }
        let computed: Vec<(usize, Result<ForecastRun, macrocast_core::Error>)> =
            run_parallel(ws.workers, missing, |k| {
                let seed = ws.seed + k as u64;
                (k, rolling_forecast(&model, &data, h, seed, &train, &rolling))
            });

        let mut failures = Vec::new();
        for (k, outcome) in computed {
            match outcome {
                Ok(run) => {
                    let path = ws.run_file(kind.id(), h, Some(k)).runtime()?;
                    write_run(&path, &run)?;
                    members[k] = Some(run);
                }
                Err(e) => {
                    eprintln!("seed {} failed: {e}", ws.seed + k as u64);
                    failures.push(k);
                }
            }
        }
        if failures.len() * 100 > k_total {
            return Err(Failure::Runtime(anyhow::anyhow!(
                "{} of {k_total} seeds failed (more than 1%); aborting h={h}",
                failures.len()
            )));
        }
        let successes: Vec<ForecastRun> = members.into_iter().flatten().collect();
        if successes.is_empty() {
            return Err(user_error(format!("no successful members for h={h}")));
        }
        let mut combined = ensemble(&successes).runtime()?;
        combined.seed = ws.seed;
        write_run(&ens_path, &combined)?;
        println!(
            "wrote {} ({} members{})",
            ens_path.display(),
            successes.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(", {} failed", failures.len())
            }
        );
    }
    ws.write_effective_config().runtime()?;
    Ok(())
}
