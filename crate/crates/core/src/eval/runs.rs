//! Forecast series, ensembles and loss ratios.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::data::Month;
use crate::error::{Error, Result};

/// One out-of-sample forecast series with its realized targets, aligned
/// 1:1 over the evaluation window.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastRun {
    pub model_id: String,
    pub horizon: usize,
    pub seed: u64,
    /// Date of each target `t+h`.
    pub dates: Vec<Month>,
    pub forecasts: Vec<f64>,
    pub realized: Vec<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Rmse,
    Mae,
}

impl LossKind {
    pub fn label(&self) -> &'static str {
        match self {
            LossKind::Rmse => "rmse",
            LossKind::Mae => "mae",
        }
    }
}

impl ForecastRun {
    pub fn len(&self) -> usize {
        self.forecasts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forecasts.is_empty()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.forecasts
            .iter()
            .zip(&self.realized)
            .map(|(f, y)| f - y)
            .collect()
    }

    pub fn loss(&self, kind: LossKind) -> f64 {
        let n = self.len() as f64;
        match kind {
            LossKind::Rmse => (self
                .errors()
                .iter()
                .map(|e| e * e)
                .sum::<f64>()
                / n)
                .sqrt(),
            LossKind::Mae => self.errors().iter().map(|e| e.abs()).sum::<f64>() / n,
        }
    }

    /// Loss over the subrange of dates `[from, to]` inclusive.
    pub fn loss_over(&self, kind: LossKind, from: Month, to: Month) -> Result<f64> {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| self.dates[i] >= from && self.dates[i] <= to)
            .collect();
        if idx.is_empty() {
            return Err(Error::validation(format!(
                "no forecasts between {from} and {to}"
            )));
        }
        let n = idx.len() as f64;
        let errs = self.errors();
        Ok(match kind {
            LossKind::Rmse => (idx.iter().map(|&i| errs[i] * errs[i]).sum::<f64>() / n).sqrt(),
            LossKind::Mae => idx.iter().map(|&i| errs[i].abs()).sum::<f64>() / n,
        })
    }

    pub fn check_aligned(&self, other: &ForecastRun) -> Result<()> {
        if self.horizon != other.horizon {
            return Err(Error::validation(format!(
                "horizon mismatch: {} vs {}",
                self.horizon, other.horizon
            )));
        }
        if self.dates != other.dates {
            return Err(Error::validation(format!(
                "date mismatch between runs `{}` and `{}`",
                self.model_id, other.model_id
            )));
        }
        if self.realized != other.realized {
            return Err(Error::validation(format!(
                "realized targets differ between runs `{}` and `{}`",
                self.model_id, other.model_id
            )));
        }
        Ok(())
    }

    /// `date,horizon,forecast,realized` rows.
    pub fn write_csv<W: Write>(&self, writer: &mut W) -> Result<()> {
        writeln!(writer, "date,horizon,forecast,realized")?;
        for i in 0..self.len() {
            writeln!(
                writer,
                "{},{},{},{}",
                self.dates[i], self.horizon, self.forecasts[i], self.realized[i]
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(reader: &mut R, model_id: &str, seed: u64) -> Result<ForecastRun> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::validation("empty run file".to_string()))??;
        if header.trim() != "date,horizon,forecast,realized" {
            return Err(Error::validation(format!("bad run header `{header}`")));
        }
        let mut dates = Vec::new();
        let mut forecasts = Vec::new();
        let mut realized = Vec::new();
        let mut horizon = 0usize;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse {
                    row: i + 2,
                    column: String::new(),
                    message: "expected 4 cells".to_string(),
                });
            }
            dates.push(Month::parse(parts[0])?);
            horizon = parts[1].parse().map_err(|_| Error::Parse {
                row: i + 2,
                column: "horizon".to_string(),
                message: format!("`{}` is not an integer", parts[1]),
            })?;
            let cell = |s: &str, col: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    row: i + 2,
                    column: col.to_string(),
                    message: format!("`{s}` is not a number"),
                })
            };
            forecasts.push(cell(parts[2], "forecast")?);
            realized.push(cell(parts[3], "realized")?);
        }
        Ok(ForecastRun {
            model_id: model_id.to_string(),
            horizon,
            seed,
            dates,
            forecasts,
            realized,
        })
    }
}

/// Pointwise mean of K aligned runs.
pub fn ensemble(runs: &[ForecastRun]) -> Result<ForecastRun> {
    let first = runs
        .first()
        .ok_or_else(|| Error::validation("cannot ensemble zero runs".to_string()))?;
    for run in &runs[1..] {
        first.check_aligned(run)?;
    }
    let k = runs.len() as f64;
    let mut forecasts = vec![0.0; first.len()];
    for run in runs {
        for (acc, f) in forecasts.iter_mut().zip(&run.forecasts) {
            *acc += f;
        }
    }
    for f in &mut forecasts {
        *f /= k;
    }
    Ok(ForecastRun {
        model_id: format!("{}_ens", first.model_id),
        horizon: first.horizon,
        seed: first.seed,
        dates: first.dates.clone(),
        forecasts,
        realized: first.realized.clone(),
    })
}

/// Candidate loss divided by reference loss over the aligned window.
pub fn loss_ratio(candidate: &ForecastRun, reference: &ForecastRun, kind: LossKind) -> Result<f64> {
    candidate.check_aligned(reference)?;
    let denom = reference.loss(kind);
    if denom == 0.0 {
        return Err(Error::validation(
            "reference loss is zero; ratio undefined".to_string(),
        ));
    }
    Ok(candidate.loss(kind) / denom)
}
