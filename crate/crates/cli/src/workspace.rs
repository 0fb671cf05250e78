//! Shared command plumbing: config resolution, artifact paths, atomic
//! writes and restartability checks.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use macrocast_core::config::RunConfig;
use macrocast_core::data::{load_table, prepare, PreparedDataset};
use macrocast_core::eval::resolve_workers;

use crate::args::CommonArgs;

/// Everything a command needs: the resolved config, seed, workers and the
/// output root.
pub struct Workspace {
    pub config: RunConfig,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub force: bool,
}

impl Workspace {
    pub fn open(common: &CommonArgs) -> Result<Self> {
        let mut config = RunConfig::from_path(&common.config)
            .with_context(|| format!("loading config {}", common.config.display()))?;
        if let Some(out) = &common.out {
            config.output = out.clone();
        }
        if let Some(seed) = common.seed {
            config.base_seed = seed;
        }
        let workers = resolve_workers(
            common
                .workers
                .or((config.workers > 0).then_some(config.workers)),
        );
        let out = config.output.clone();
        fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Workspace {
            seed: config.base_seed,
            workers,
            out,
            force: common.force,
            config,
        })
    }

    /// Loads and prepares the panel from the configured CSV.
    pub fn dataset(&self) -> Result<PreparedDataset> {
        let meta = self.config.table_meta()?;
        let table = load_table(&self.config.data, &meta)
            .with_context(|| format!("reading {}", self.config.data.display()))?;
        let data = prepare(&table, &self.config.prepare_options())?;
        Ok(data)
    }

    /// Writes the resolved configuration next to the outputs so a rerun
    /// reproduces the results.
    pub fn write_effective_config(&self) -> Result<()> {
        let path = self.out.join(format!("effective_config_s{}.toml", self.seed));
        write_atomic(&path, self.config.to_toml().as_bytes())
    }

    pub fn subdir(&self, name: &str) -> Result<PathBuf> {
        let dir = self.out.join(name);
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    /// True when the artifact already exists and `--force` was not given.
    pub fn can_skip(&self, path: &Path) -> bool {
        !self.force && path.exists()
    }

    /// Forecast CSV path: the plain file is the evaluated forecast (the
    /// ensemble for neural models); `member` selects one initialization.
    pub fn run_file(&self, model: &str, horizon: usize, member: Option<usize>) -> Result<PathBuf> {
        let dir = self.subdir("runs")?;
        let name = match member {
            Some(k) => format!("{model}_h{horizon}_s{}_k{k:04}.csv", self.seed),
            None => format!("{model}_h{horizon}_s{}.csv", self.seed),
        };
        Ok(dir.join(name))
    }
}

/// Write-then-rename so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_atomic_string(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}
