//! `evaluate`: the loss-ratio table with DM stars, fluctuation series and
//! the DM distribution over initializations.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;

use macrocast_core::eval::{
    default_window, dm_distribution, dm_p_value, dm_p_value_one_sided, dm_statistic,
    fluctuation_test, loss_ratio, significance_stars, ForecastRun, LossDifferential, LossKind,
};

use crate::args::EvaluateArgs;
use crate::failure::{user_error, CommandResult, IntoFailure};
use crate::workspace::{write_atomic_string, Workspace};

const DEFAULT_MODELS: [&str; 8] = [
    "ar1", "ucsv", "fadl", "ff_cpi", "ff_pool", "lstm_pool", "lstm_all", "ff_lstm",
];

pub fn run(args: &EvaluateArgs) -> CommandResult {
    let ws = Workspace::open(&args.common).user()?;
    let models: Vec<String> = if args.model.is_empty() {
        DEFAULT_MODELS.iter().map(|s| s.to_string()).collect()
    } else {
        args.model.clone()
    };
    let horizons = if args.horizon.is_empty() {
        ws.config.horizons.clone()
    } else {
        args.horizon.clone()
    };
    if !models.iter().any(|m| m == "ar1") {
        return Err(user_error("evaluation needs the ar1 reference run; include it in --model"));
    }
    let tables = ws.subdir("tables").runtime()?;
    let plots = ws.subdir("plots").runtime()?;
    let wide_path = tables.join(format!("loss_ratios_s{}.csv", ws.seed));
    if ws.can_skip(&wide_path) {
        println!("evaluate: {} exists, skipping", wide_path.display());
        return Ok(());
    }

    // Load every requested cell, listing all the missing ones at once.
    let mut runs: Vec<(String, usize, ForecastRun)> = Vec::new();
    let mut missing = Vec::new();
    for model in &models {
        for &h in &horizons {
            let path = ws.run_file(model, h, None).runtime()?;
            if !path.exists() {
                missing.push(format!("{model} h={h} ({})", path.display()));
                continue;
            }
            let file = fs::File::open(&path).runtime()?;
            let run = ForecastRun::read_csv(&mut BufReader::new(file), model, ws.seed).runtime()?;
            runs.push((model.clone(), h, run));
        }
    }
    if !missing.is_empty() {
        return Err(user_error(format!(
            "missing forecast runs (generate them with `macrocast run`):\n  {}",
            missing.join("\n  ")
        )));
    }
    let get = |model: &str, h: usize| -> &ForecastRun {
        &runs
            .iter()
            .find(|(m, hh, _)| m == model && *hh == h)
            .unwrap()
            .2
    };

    // Loss-ratio table (wide, human-facing) plus a tidy long version.
    let mut wide = String::from("model,loss");
    for &h in &horizons {
        write!(wide, ",h{h}").unwrap();
    }
    wide.push('\n');
    let mut long = String::from("model,loss,horizon,ratio,dm_stat,p_value,stars\n");
    for kind in [LossKind::Rmse, LossKind::Mae] {
        for model in &models {
            write!(wide, "{model},{}", kind.label()).unwrap();
            for &h in &horizons {
                let candidate = get(model, h);
                let reference = get("ar1", h);
                let ratio = loss_ratio(candidate, reference, kind).runtime()?;
                let (stat, p, stars) = if model == "ar1" {
                    (0.0, 1.0, "")
                } else {
                    let d = LossDifferential::squared(
                        &candidate.errors(),
                        &reference.errors(),
                        h,
                    )
                    .runtime()?;
                    let stat = dm_statistic(&d.values).runtime()?;
                    let p = if args.one_sided_stars {
                        dm_p_value_one_sided(stat)
                    } else {
                        dm_p_value(stat)
                    };
                    (stat, p, significance_stars(p))
                };
                write!(wide, ",{ratio:.2}{stars}").unwrap();
                writeln!(
                    long,
                    "{model},{},{h},{ratio},{stat},{p},{stars}",
                    kind.label()
                )
                .unwrap();
            }
            wide.push('\n');
        }
    }
    write_atomic_string(&wide_path, &wide).runtime()?;
    let long_path = tables.join(format!("loss_ratios_long_s{}.csv", ws.seed));
    write_atomic_string(&long_path, &long).runtime()?;
    println!("wrote {}", wide_path.display());
    println!("wrote {}", long_path.display());
    print!("{wide}");

    // Fluctuation series against AR(1); positive statistic = candidate
    // better over that window.
    for model in models.iter().filter(|m| *m != "ar1") {
        for &h in &horizons {
            let candidate = get(model, h);
            let reference = get("ar1", h);
            let d = LossDifferential::squared(&reference.errors(), &candidate.errors(), h)
                .runtime()?;
            let window = args.window.unwrap_or_else(|| default_window(d.values.len()));
            if window > d.values.len() || window < 8 {
                continue;
            }
            let series = fluctuation_test(&d.values, window).runtime()?;
            let mut csv = String::from("date,stat,critical_value\n");
            for (k, stat) in series.stats.iter().enumerate() {
                let center = candidate.dates[series.center(k)];
                writeln!(csv, "{center},{stat},{}", series.critical_value).unwrap();
            }
            let path = plots.join(format!("fluctuation_{model}_h{h}_s{}.csv", ws.seed));
            write_atomic_string(&path, &csv).runtime()?;
        }
    }
    println!("wrote fluctuation series under {}", plots.display());

    // DM statistic distribution over initializations, where member runs
    // exist on disk.
    let dm_h = args
        .dm_horizon
        .unwrap_or_else(|| horizons.iter().copied().max().unwrap_or(24));
    for model in models.iter().filter(|m| !matches!(m.as_str(), "ar1" | "ucsv" | "fadl")) {
        let ens = match (horizons.contains(&dm_h)).then(|| get(model, dm_h)) {
            Some(e) => e,
            None => continue,
        };
        let mut member_diffs = Vec::new();
        let mut k = 0usize;
        loop {
            let path = ws.run_file(model, dm_h, Some(k)).runtime()?;
            if !path.exists() {
                break;
            }
            let file = fs::File::open(&path).runtime()?;
            let member =
                ForecastRun::read_csv(&mut BufReader::new(file), model, ws.seed + k as u64)
                    .runtime()?;
            member.check_aligned(ens).runtime()?;
            member_diffs.push(
                LossDifferential::squared(&member.errors(), &ens.errors(), dm_h)
                    .runtime()?
                    .values,
            );
            k += 1;
        }
        if member_diffs.is_empty() {
            continue;
        }
        let dist = dm_distribution(&member_diffs).runtime()?;
        let mut csv = String::from("member,delta\n");
        for (i, delta) in dist.deltas.iter().enumerate() {
            writeln!(csv, "{i},{delta}").unwrap();
        }
        let path = plots.join(format!("dm_distribution_{model}_h{dm_h}_s{}.csv", ws.seed));
        write_atomic_string(&path, &csv).runtime()?;
        let mut sorted = dist.deltas.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "dm distribution {model} h={dm_h}: K={}, median {:.2}, beyond 5%/1%: {:.1}%/{:.1}%",
            sorted.len(),
            sorted[sorted.len() / 2],
            100.0 * dist.share_beyond_5pct,
            100.0 * dist.share_beyond_1pct
        );
    }

    ws.write_effective_config().runtime()?;
    Ok(())
}
