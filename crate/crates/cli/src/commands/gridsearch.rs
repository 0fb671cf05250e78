//! `gridsearch`: two-stage search, selected values written as a config
//! fragment.

use std::fmt::Write as _;

use macrocast_core::eval::grid_search;
use macrocast_core::models::ModelKind;
use macrocast_core::neural::BatchSize;

use crate::args::GridsearchArgs;
use crate::failure::{CommandResult, IntoFailure};
use crate::workspace::{write_atomic_string, Workspace};

pub fn run(args: &GridsearchArgs) -> CommandResult {
    let ws = Workspace::open(&args.common).user()?;
    let kinds: Vec<ModelKind> = if args.model.is_empty() {
        ModelKind::ALL.to_vec()
    } else {
        args.model
            .iter()
            .map(|m| ModelKind::parse(m))
            .collect::<Result<_, _>>()
            .user()?
    };
    let out_path = ws
        .subdir("tables")
        .runtime()?
        .join(format!("gridsearch_s{}.toml", ws.seed));
    if ws.can_skip(&out_path) {
        println!("gridsearch: {} exists, skipping", out_path.display());
        return Ok(());
    }

    let data = ws.dataset().user()?;
    let plan = ws.config.grid_plan(ws.workers);
    let outcome = grid_search(&data, &kinds, &plan).runtime()?;

    // A config fragment that can be pasted into the run configuration.
    let mut text = String::new();
    for (id, picked) in &outcome {
        writeln!(text, "# validation rmse {:.6}", picked.score).unwrap();
        writeln!(text, "[models.{id}]").unwrap();
        writeln!(text, "lags = {}", picked.spec.lags).unwrap();
        if let Some(w) = picked.spec.w_lags {
            writeln!(text, "w_lags = {w}").unwrap();
        }
        writeln!(text, "nodes = {}", picked.spec.nodes).unwrap();
        writeln!(text, "layers = {}", picked.spec.layers).unwrap();
        if let Some(p) = picked.spec.state {
            writeln!(text, "state = {p}").unwrap();
        }
        writeln!(text, "epochs = {}", picked.train.epochs).unwrap();
        match picked.train.batch {
            BatchSize::Fixed(b) => writeln!(text, "batch = {b}").unwrap(),
            BatchSize::Max => writeln!(text, "batch = \"max\"").unwrap(),
        }
        text.push('\n');
        println!(
            "{id}: L={} n={} Q={} p={:?} epochs={} batch={:?} (rmse {:.6})",
            picked.spec.lags,
            picked.spec.nodes,
            picked.spec.layers,
            picked.spec.state,
            picked.train.epochs,
            picked.train.batch,
            picked.score
        );
    }
    write_atomic_string(&out_path, &text).runtime()?;
    println!("wrote {}", out_path.display());
    ws.write_effective_config().runtime()?;
    Ok(())
}
