//! End-to-end CLI runs on a toy panel: artifact layout, restartability,
//! determinism and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_macrocast")
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .env("MACROCAST_WORKERS", "1")
        .output()
        .expect("spawn macrocast")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// 140 months, 3 pool series plus a positive price index and one component.
fn write_toy_csv(path: &Path) {
    let mut csv = String::from("sasdate,act_a,act_b,act_c,cpi,cpi_food\n");
    csv.push_str("Transform:,1,1,1,6,5\n");
    let mut level: f64 = 100.0;
    let mut food: f64 = 50.0;
    for i in 0..140 {
        let month = i % 12 + 1;
        let year = 2000 + i / 12;
        let cycle = (i as f64 * 0.35).sin();
        let a = cycle + 0.1 * (i as f64 * 0.9).cos();
        let b = -0.8 * cycle + 0.05 * (i as f64 * 1.7).sin();
        let c = 0.4 * cycle * cycle + 0.2 * (i as f64 * 0.23).cos();
        level *= 1.002 + 0.001 * cycle;
        food *= 1.001 + 0.002 * (i as f64 * 0.5).sin();
        csv.push_str(&format!(
            "{month}/1/{year},{a:.6},{b:.6},{c:.6},{level:.6},{food:.6}\n"
        ));
    }
    fs::write(path, csv).unwrap();
}

fn write_config(dir: &Path, out: &Path) -> PathBuf {
    let config = format!(
        r#"
data = "{data}"
output = "{out}"
target = "cpi"
w_columns = ["cpi", "cpi_food"]
horizons = [3]
ensemble_size = 2
importance_ensemble = 2
base_seed = 42
refit_every = 12
default_group = "prices"

[groups]
output_income = ["act_a", "act_b", "act_c"]

[splits]
train = 0.6
validation = 0.2
test = 0.2

[benchmarks.ucsv]
draws = 80
burn_in = 30

[benchmarks.fadl]
ar_lags = 2
factors = 1
bootstrap = 50

[models.ff_pool]
lags = 2
nodes = 4
layers = 1
epochs = 25
batch = "max"
learning_rate = 0.005

[models.lstm_pool]
lags = 3
nodes = 4
layers = 1
state = 2
epochs = 25
batch = "max"
learning_rate = 0.005
"#,
        data = dir.join("toy.csv").display(),
        out = out.display(),
    );
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    path
}

struct Setup {
    _tmp: tempfile::TempDir,
    config: PathBuf,
    out: PathBuf,
}

fn setup() -> Setup {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    write_toy_csv(&tmp.path().join("toy.csv"));
    let config = write_config(tmp.path(), &out);
    Setup {
        _tmp: tmp,
        config,
        out,
    }
}

#[test]
fn full_pipeline_produces_all_artifacts() {
    let s = setup();
    let cfg = s.config.to_str().unwrap();

    let prep = run_cli(&["prepare", "--config", cfg]);
    assert_ok(&prep);
    let stdout = String::from_utf8_lossy(&prep.stdout);
    assert!(stdout.contains("splits:"), "{stdout}");
    let panel = s.out.join("panel_s42.csv");
    assert!(panel.exists());
    assert!(s.out.join("normalizer_s42.csv").exists());
    assert!(s.out.join("effective_config_s42.toml").exists());

    // prepare is idempotent: rerun with --force and compare bytes.
    let before = fs::read(&panel).unwrap();
    assert_ok(&run_cli(&["prepare", "--config", cfg, "--force"]));
    assert_eq!(before, fs::read(&panel).unwrap());

    // Rerun without --force skips.
    let skip = run_cli(&["prepare", "--config", cfg]);
    assert_ok(&skip);
    assert!(String::from_utf8_lossy(&skip.stdout).contains("skipping"));

    for model in ["ar1", "ucsv", "fadl", "ff_pool", "lstm_pool"] {
        assert_ok(&run_cli(&["run", "--config", cfg, "--model", model]));
        assert!(
            s.out.join(format!("runs/{model}_h3_s42.csv")).exists(),
            "{model} run missing"
        );
    }
    // Neural runs also leave one CSV per member.
    assert!(s.out.join("runs/ff_pool_h3_s42_k0000.csv").exists());
    assert!(s.out.join("runs/ff_pool_h3_s42_k0001.csv").exists());

    let eval = run_cli(&[
        "evaluate",
        "--config",
        cfg,
        "--model",
        "ar1,ucsv,fadl,ff_pool,lstm_pool",
        "--dm-horizon",
        "3",
    ]);
    assert_ok(&eval);
    assert!(s.out.join("tables/loss_ratios_s42.csv").exists());
    assert!(s.out.join("tables/loss_ratios_long_s42.csv").exists());
    assert!(s.out.join("plots/fluctuation_ff_pool_h3_s42.csv").exists());
    assert!(s.out.join("plots/dm_distribution_ff_pool_h3_s42.csv").exists());
    // AR(1) against itself is exactly 1.00 in every column.
    let table = fs::read_to_string(s.out.join("tables/loss_ratios_s42.csv")).unwrap();
    let ar1_rows: Vec<&str> = table.lines().filter(|l| l.starts_with("ar1,")).collect();
    assert_eq!(ar1_rows.len(), 2);
    for row in ar1_rows {
        assert!(row.ends_with("1.00"), "{row}");
    }

    assert_ok(&run_cli(&[
        "importance",
        "--config",
        cfg,
        "--model",
        "ff_pool",
        "--horizon",
        "3",
    ]));
    assert!(s.out.join("tables/importance_ff_pool_s42.csv").exists());
    assert!(s.out.join("tables/importance_groups_ff_pool_s42.csv").exists());

    assert_ok(&run_cli(&[
        "memory",
        "--config",
        cfg,
        "--model",
        "lstm_pool",
        "--horizon",
        "3",
    ]));
    assert!(s.out.join("plots/memory_lstm_pool_h3_s42.csv").exists());
    assert!(s.out.join("tables/memory_correlations_lstm_pool_h3_s42.csv").exists());
    assert!(s.out.join("models/lstm_pool_h3_s42.params").exists());
    assert!(s.out.join("models/lstm_pool_h3_s42_loss.csv").exists());

    // The saved checkpoint reloads into the same architecture.
    let ckpt = fs::read(s.out.join("models/lstm_pool_h3_s42.params")).unwrap();
    let (model, params) = macrocast_core::models::load_model(&mut ckpt.as_slice()).unwrap();
    assert_eq!(model.spec().kind, macrocast_core::models::ModelKind::LstmPool);
    assert_eq!(params.len(), model.param_count());
}

#[test]
fn effective_config_reproduces_the_run() {
    let s = setup();
    let cfg = s.config.to_str().unwrap();
    assert_ok(&run_cli(&["run", "--config", cfg, "--model", "ff_pool"]));
    let ens = fs::read(s.out.join("runs/ff_pool_h3_s42.csv")).unwrap();

    // Re-run from the written effective config into a fresh directory.
    let effective = s.out.join("effective_config_s42.toml");
    let out2 = s.out.parent().unwrap().join("out2");
    assert_ok(&run_cli(&[
        "run",
        "--config",
        effective.to_str().unwrap(),
        "--model",
        "ff_pool",
        "--out",
        out2.to_str().unwrap(),
    ]));
    let ens2 = fs::read(out2.join("runs/ff_pool_h3_s42.csv")).unwrap();
    assert_eq!(ens, ens2);
}

#[test]
fn reruns_reproduce_identical_ensembles() {
    let s1 = setup();
    let s2 = setup();
    for s in [&s1, &s2] {
        let cfg = s.config.to_str().unwrap();
        assert_ok(&run_cli(&["run", "--config", cfg, "--model", "ff_pool"]));
    }
    let a = fs::read(s1.out.join("runs/ff_pool_h3_s42.csv")).unwrap();
    let b = fs::read(s2.out.join("runs/ff_pool_h3_s42.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn evaluate_without_runs_is_a_user_error() {
    let s = setup();
    let cfg = s.config.to_str().unwrap();
    let out = run_cli(&["evaluate", "--config", cfg, "--model", "ar1"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing forecast runs"), "{stderr}");
    assert!(stderr.contains("ar1 h=3"), "{stderr}");
}

#[test]
fn bad_inputs_use_the_user_error_exit_code() {
    // Unreadable config.
    let out = run_cli(&["prepare", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(1));
    // Unknown model id.
    let s = setup();
    let cfg = s.config.to_str().unwrap();
    let out = run_cli(&["run", "--config", cfg, "--model", "transformer"]);
    assert_eq!(out.status.code(), Some(1));
    // Unknown flag is a usage error.
    let out = run_cli(&["run", "--config", cfg, "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_restarts_from_existing_member_files() {
    let s = setup();
    let cfg = s.config.to_str().unwrap();
    assert_ok(&run_cli(&["run", "--config", cfg, "--model", "ff_pool"]));
    let member = s.out.join("runs/ff_pool_h3_s42_k0001.csv");
    let ens = s.out.join("runs/ff_pool_h3_s42.csv");
    let ens_bytes = fs::read(&ens).unwrap();
    // Drop the ensemble and one member; the rerun recomputes only what is
    // missing and reproduces the same ensemble.
    fs::remove_file(&ens).unwrap();
    fs::remove_file(&member).unwrap();
    let out = run_cli(&["run", "--config", cfg, "--model", "ff_pool"]);
    assert_ok(&out);
    assert_eq!(fs::read(&ens).unwrap(), ens_bytes);
    assert!(member.exists());
}
