//! `prepare`: panel ingestion and the normalized audit CSV.

use std::fmt::Write as _;

use crate::args::PrepareArgs;
use crate::failure::{CommandResult, IntoFailure};
use crate::workspace::{write_atomic_string, Workspace};

pub fn run(args: &PrepareArgs) -> CommandResult {
    let ws = Workspace::open(&args.common).user()?;
    let panel_path = ws.out.join(format!("panel_s{}.csv", ws.seed));
    let norm_path = ws.out.join(format!("normalizer_s{}.csv", ws.seed));
    if ws.can_skip(&panel_path) && ws.can_skip(&norm_path) {
        println!("prepare: {} exists, skipping (use --force to rebuild)", panel_path.display());
        return Ok(());
    }

    let data = ws.dataset().user()?;

    let mut panel = String::new();
    panel.push_str("sasdate");
    for name in &data.names {
        write!(panel, ",{name}").unwrap();
    }
    panel.push('\n');
    for (i, date) in data.dates.iter().enumerate() {
        write!(panel, "{date}").unwrap();
        for j in 0..data.n_series() {
            write!(panel, ",{}", data.normalized[[i, j]]).unwrap();
        }
        panel.push('\n');
    }
    write_atomic_string(&panel_path, &panel).runtime()?;

    let mut audit = String::from("series,min,max,in_sample_rows\n");
    for (j, name) in data.names.iter().enumerate() {
        writeln!(
            audit,
            "{name},{},{},{}",
            data.normalizer.mins[j], data.normalizer.maxs[j], data.normalizer.in_sample_end
        )
        .unwrap();
    }
    write_atomic_string(&norm_path, &audit).runtime()?;
    ws.write_effective_config().runtime()?;

    let s = &data.splits;
    println!(
        "prepared panel: {} rows x {} series ({}..{})",
        data.n_rows(),
        data.n_series(),
        data.dates[0],
        data.dates[data.n_rows() - 1]
    );
    println!(
        "splits: train ..{} | validation ..{} / ..{} / ..{} | test ..{} (P = {})",
        data.dates[s.train_end - 1],
        data.dates[s.validation_ends[0] - 1],
        data.dates[s.validation_ends[1] - 1],
        data.dates[s.validation_ends[2] - 1],
        data.dates[s.test_end - 1],
        s.test_len()
    );
    println!("wrote {}", panel_path.display());
    println!("wrote {}", norm_path.display());
    Ok(())
}
