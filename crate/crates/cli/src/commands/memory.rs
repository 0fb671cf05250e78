//! `memory`: internal-memory extraction with validation-selected
//! initialization.

use std::fmt::Write as _;

use macrocast_core::data::build_supervised;
use macrocast_core::eval::run_parallel;
use macrocast_core::models::{
    extract_internal_memory, save_model, select_by_validation, AssembledModel, ModelKind,
    TrainedInstance,
};
use macrocast_core::neural::{train, write_loss_history};

use crate::args::MemoryArgs;
use crate::failure::{user_error, CommandResult, IntoFailure};
use crate::workspace::{write_atomic_string, Workspace};

pub fn run(args: &MemoryArgs) -> CommandResult {
    let ws = Workspace::open(&args.common).user()?;
    let kind = ModelKind::parse(&args.model).user()?;
    if !kind.has_lstm() {
        return Err(user_error(format!("{kind} has no internal memory to extract")));
    }
    let h = args.horizon;
    let plots = ws.subdir("plots").runtime()?;
    let tables = ws.subdir("tables").runtime()?;
    let series_path = plots.join(format!("memory_{}_h{h}_s{}.csv", kind.id(), ws.seed));
    let corr_path = tables.join(format!("memory_correlations_{}_h{h}_s{}.csv", kind.id(), ws.seed));
    if ws.can_skip(&series_path) && ws.can_skip(&corr_path) {
        println!("memory: {} exists, skipping", series_path.display());
        return Ok(());
    }

    let data = ws.dataset().user()?;
    let spec = ws
        .config
        .network_spec(kind, data.z_columns.len(), data.w_columns.len())
        .user()?;
    let model = AssembledModel::build(spec).user()?;
    let train_cfg = ws.config.train_config(kind);

    // Train K initializations on the training window, then keep the one
    // with the lowest error over the full validation sample.
    let sup = build_supervised(&data, spec.predictor_choice(), h).runtime()?;
    let train_end = data.splits.train_end;
    let val_end = data.splits.in_sample_end();
    let train_rows = sup
        .origins
        .iter()
        .position(|&t| t + h >= train_end)
        .unwrap_or(sup.len());
    if train_rows == 0 {
        return Err(user_error(format!("no training rows for h={h}")));
    }
    let val_rows: Vec<usize> = sup
        .origins
        .iter()
        .enumerate()
        .filter(|(_, &t)| t + h >= train_end && t + h < val_end)
        .map(|(i, _)| i)
        .collect();
    if val_rows.is_empty() {
        return Err(user_error("empty validation sample".to_string()));
    }

    let k_total = ws.config.importance_ensemble.max(1);
    let inputs = sup.inputs.slice(ndarray::s![..train_rows, ..]);
    let targets = sup.targets.slice(ndarray::s![..train_rows]);
    let trained: Vec<(TrainedInstance, Vec<f64>)> =
        run_parallel(ws.workers, (0..k_total).collect(), |k| {
            let cfg = train_cfg.with_seed(ws.seed + k as u64);
            train(&model, inputs, targets, &cfg).map(|r| {
                (
                    TrainedInstance {
                        seed: cfg.seed,
                        params: r.params,
                    },
                    r.loss_history,
                )
            })
        })
        .into_iter()
        .collect::<Result<_, _>>()
        .runtime()?;
    let (instances, histories): (Vec<TrainedInstance>, Vec<Vec<f64>>) =
        trained.into_iter().unzip();

    let val_inputs = sup.inputs.select(ndarray::Axis(0), &val_rows);
    let val_targets: ndarray::Array1<f64> =
        ndarray::Array1::from_iter(val_rows.iter().map(|&i| sup.targets[i]));
    let best = select_by_validation(&model, &instances, val_inputs.view(), val_targets.view())
        .runtime()?;
    println!(
        "selected initialization seed {} of {k_total} candidates",
        instances[best].seed
    );

    // Persist the selected instance and its training curve.
    let models_dir = ws.subdir("models").runtime()?;
    let ckpt_path = models_dir.join(format!("{}_h{h}_s{}.params", kind.id(), ws.seed));
    let mut buf = Vec::new();
    save_model(&mut buf, &model, &instances[best].params).runtime()?;
    crate::workspace::write_atomic(&ckpt_path, &buf).runtime()?;
    let loss_path = models_dir.join(format!("{}_h{h}_s{}_loss.csv", kind.id(), ws.seed));
    let mut loss_buf = Vec::new();
    write_loss_history(&mut loss_buf, &histories[best]).runtime()?;
    crate::workspace::write_atomic(&loss_path, &loss_buf).runtime()?;
    println!("wrote {}", ckpt_path.display());
    println!("wrote {}", loss_path.display());

    let memory = extract_internal_memory(&model, &instances[best].params, &data, h).runtime()?;

    let p = memory.values.ncols();
    let mut csv = String::from("date");
    for j in 0..p {
        write!(csv, ",component_{}", j + 1).unwrap();
    }
    csv.push_str(",inflation\n");
    for (i, date) in memory.dates.iter().enumerate() {
        write!(csv, "{date}").unwrap();
        for j in 0..p {
            write!(csv, ",{}", memory.values[[i, j]]).unwrap();
        }
        writeln!(csv, ",{}", memory.inflation[i]).unwrap();
    }
    write_atomic_string(&series_path, &csv).runtime()?;

    let mut corr = String::from("component,correlation_with_inflation\n");
    for (j, c) in memory.correlations.iter().enumerate() {
        writeln!(corr, "{},{}", j + 1, c).unwrap();
        println!("component {} correlation with inflation: {c:.3}", j + 1);
    }
    write_atomic_string(&corr_path, &corr).runtime()?;
    println!("wrote {}", series_path.display());
    println!("wrote {}", corr_path.display());
    ws.write_effective_config().runtime()?;
    Ok(())
}
