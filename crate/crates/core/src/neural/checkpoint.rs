//! Plain-text parameter checkpoints.
//!
//! Layout:
//!
//! ```text
//! macrocast-params v1
//! meta <key> <value>          (zero or more)
//! entry <name> <rows> <cols>
//! <cols space-separated values, one line per row>
//! ...
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a save/load
//! cycle is bit-exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::neural::params::ParamLayout;

const MAGIC: &str = "macrocast-params v1";

pub fn save_params<W: Write>(
    writer: &mut W,
    layout: &ParamLayout,
    params: &[f64],
    meta: &[(String, String)],
) -> Result<()> {
    writeln!(writer, "{MAGIC}")?;
    for (k, v) in meta {
        writeln!(writer, "meta {k} {v}")?;
    }
    for e in layout.entries() {
        writeln!(writer, "entry {} {} {}", e.name, e.rows, e.cols)?;
        for r in 0..e.rows {
            let start = e.offset + r * e.cols;
            let row: Vec<String> = params[start..start + e.cols]
                .iter()
                .map(|v| format!("{v}"))
                .collect();
            writeln!(writer, "{}", row.join(" "))?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct LoadedParams {
    pub meta: Vec<(String, String)>,
    /// `(name, rows, cols)` per entry, in file order.
    pub entries: Vec<(String, usize, usize)>,
    pub values: Vec<f64>,
}

impl LoadedParams {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Checks the loaded shapes against a layout and returns the flat vector.
    pub fn into_vector_for(self, layout: &ParamLayout) -> Result<Vec<f64>> {
        let want: Vec<(String, usize, usize)> = layout
            .entries()
            .iter()
            .map(|e| (e.name.clone(), e.rows, e.cols))
            .collect();
        if want != self.entries {
            return Err(Error::shape(
                "checkpoint entries do not match the model layout".to_string(),
            ));
        }
        Ok(self.values)
    }
}

pub fn load_params<R: BufRead>(reader: &mut R) -> Result<LoadedParams> {
    let mut lines = reader.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::validation("empty checkpoint".to_string()))??;
    if first.trim() != MAGIC {
        return Err(Error::validation(format!(
            "bad checkpoint header `{first}`"
        )));
    }
    let mut meta = Vec::new();
    let mut entries = Vec::new();
    let mut values = Vec::new();
    let mut pending_rows = 0usize;
    let mut pending_cols = 0usize;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if pending_rows > 0 {
            let mut count = 0;
            for tok in line.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|_| Error::Parse {
                    row: lineno + 2,
                    column: String::new(),
                    message: format!("`{tok}` is not a float"),
                })?);
                count += 1;
            }
            if count != pending_cols {
                return Err(Error::Parse {
                    row: lineno + 2,
                    column: String::new(),
                    message: format!("expected {pending_cols} values, found {count}"),
                });
            }
            pending_rows -= 1;
            continue;
        }
        if let Some(rest) = line.strip_prefix("meta ") {
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            meta.push((k.to_string(), v.to_string()));
        } else if let Some(rest) = line.strip_prefix("entry ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse {
                    row: lineno + 2,
                    column: String::new(),
                    message: "entry line needs `name rows cols`".to_string(),
                });
            }
            let rows: usize = parts[1].parse().map_err(|_| Error::Parse {
                row: lineno + 2,
                column: String::new(),
                message: "bad row count".to_string(),
            })?;
            let cols: usize = parts[2].parse().map_err(|_| Error::Parse {
                row: lineno + 2,
                column: String::new(),
                message: "bad column count".to_string(),
            })?;
            entries.push((parts[0].to_string(), rows, cols));
            pending_rows = rows;
            pending_cols = cols;
        } else {
            return Err(Error::Parse {
                row: lineno + 2,
                column: String::new(),
                message: format!("unexpected line `{line}`"),
            });
        }
    }
    if pending_rows > 0 {
        return Err(Error::validation("truncated checkpoint".to_string()));
    }
    Ok(LoadedParams {
        meta,
        entries,
        values,
    })
}

/// Loss history as `epoch,loss` CSV.
pub fn write_loss_history<W: Write>(writer: &mut W, losses: &[f64]) -> Result<()> {
    writeln!(writer, "epoch,loss")?;
    for (i, l) in losses.iter().enumerate() {
        writeln!(writer, "{i},{l}")?;
    }
    Ok(())
}
