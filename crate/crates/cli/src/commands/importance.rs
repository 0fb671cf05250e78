//! `importance`: perturbation gains per variable and economic group.

use std::fmt::Write as _;

use macrocast_core::data::build_supervised;
use macrocast_core::eval::{
    build_importance_table, run_parallel, variable_importance, ImportanceOptions,
};
use macrocast_core::models::{AssembledModel, ModelKind, TrainedInstance};
use macrocast_core::neural::train;

use crate::args::ImportanceArgs;
use crate::failure::{user_error, CommandResult, IntoFailure};
use crate::workspace::{write_atomic_string, Workspace};

const DEFAULT_MODELS: [ModelKind; 4] = [
    ModelKind::FfPool,
    ModelKind::LstmPool,
    ModelKind::LstmAll,
    ModelKind::FfLstm,
];

pub fn run(args: &ImportanceArgs) -> CommandResult {
    let ws = Workspace::open(&args.common).user()?;
    let kinds: Vec<ModelKind> = if args.model.is_empty() {
        DEFAULT_MODELS.to_vec()
    } else {
        args.model
            .iter()
            .map(|m| ModelKind::parse(m))
            .collect::<Result<_, _>>()
            .user()?
    };
    let horizons: Vec<usize> = if args.horizon.is_empty() {
        [3usize, 6, 12, 24]
            .iter()
            .copied()
            .filter(|h| ws.config.horizons.contains(h))
            .collect()
    } else {
        args.horizon.clone()
    };
    if horizons.is_empty() {
        return Err(user_error("no horizons to analyze"));
    }

    let data = ws.dataset().user()?;
    let tables = ws.subdir("tables").runtime()?;
    let options = ImportanceOptions {
        all_lags: !args.last_lag_only,
        ..ImportanceOptions::default()
    };

    for kind in kinds {
        let var_path = tables.join(format!("importance_{}_s{}.csv", kind.id(), ws.seed));
        let group_path = tables.join(format!("importance_groups_{}_s{}.csv", kind.id(), ws.seed));
        if ws.can_skip(&var_path) && ws.can_skip(&group_path) {
            println!("importance: {} exists, skipping", var_path.display());
            continue;
        }
        let spec = ws
            .config
            .network_spec(kind, data.z_columns.len(), data.w_columns.len())
            .user()?;
        let model = AssembledModel::build(spec).user()?;
        let train_cfg = ws.config.train_config(kind);
        let k_total = ws.config.importance_ensemble.max(1);

        let mut per_horizon = Vec::new();
        for &h in &horizons {
            // In-sample fit: training pairs whose targets precede the test
            // window.
            let sup = build_supervised(&data, spec.predictor_choice(), h).runtime()?;
            let cutoff = data.splits.test_start();
            let rows = sup
                .origins
                .iter()
                .position(|&t| t + h >= cutoff)
                .unwrap_or(sup.len());
            if rows == 0 {
                return Err(user_error(format!("no in-sample rows for h={h}")));
            }
            let inputs = sup.inputs.slice(ndarray::s![..rows, ..]);
            let targets = sup.targets.slice(ndarray::s![..rows]);
            let instances: Vec<TrainedInstance> =
                run_parallel(ws.workers, (0..k_total).collect(), |k| {
                    let cfg = train_cfg.with_seed(ws.seed + k as u64);
                    train(&model, inputs, targets, &cfg).map(|r| TrainedInstance {
                        seed: cfg.seed,
                        params: r.params,
                    })
                })
                .into_iter()
                .collect::<Result<_, _>>()
                .runtime()?;

            let gains = variable_importance(&model, &instances, &data, h, &options).runtime()?;
            per_horizon.push((h, gains));
        }
        let table = build_importance_table(per_horizon).runtime()?;

        let mut var_csv = String::from("variable,group");
        for h in &table.horizons {
            write!(var_csv, ",gain_h{h}").unwrap();
        }
        var_csv.push('\n');
        for (name, group, gains) in &table.variables {
            write!(var_csv, "{name},{group}").unwrap();
            for g in gains {
                write!(var_csv, ",{g}").unwrap();
            }
            var_csv.push('\n');
        }
        write_atomic_string(&var_path, &var_csv).runtime()?;

        let mut group_csv = String::from("group");
        for h in &table.horizons {
            write!(group_csv, ",gain_h{h},rank_h{h}").unwrap();
        }
        group_csv.push('\n');
        for (group, means) in &table.groups {
            write!(group_csv, "{group}").unwrap();
            for (hi, mean) in means.iter().enumerate() {
                let (top, second) = table.top_groups[hi];
                let rank = if top == *group {
                    "highest"
                } else if second == Some(*group) {
                    "second"
                } else {
                    ""
                };
                write!(group_csv, ",{mean},{rank}").unwrap();
            }
            group_csv.push('\n');
        }
        write_atomic_string(&group_path, &group_csv).runtime()?;
        println!("wrote {}", var_path.display());
        println!("wrote {}", group_path.display());
    }
    ws.write_effective_config().runtime()?;
    Ok(())
}
