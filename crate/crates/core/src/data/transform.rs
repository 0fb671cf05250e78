//! Per-series stationarity transforms (FRED-MD tcodes) and mean imputation.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Rows a transform consumes at the start of the series.
pub fn tcode_order(code: u8) -> usize {
    match code {
        1 | 4 => 0,
        2 | 5 => 1,
        3 | 6 | 7 => 2,
        _ => 0,
    }
}

/// Maximum differencing order across all tcodes; every panel is trimmed by
/// this many leading rows so it stays rectangular.
pub const COMMON_TRIM: usize = 2;

fn check_positive(series: &[f64], code: u8) -> Result<()> {
    for (i, &v) in series.iter().enumerate() {
        if !v.is_nan() && v <= 0.0 {
            return Err(Error::domain(format!(
                "tcode {code} needs positive values, found {v} at index {i}"
            )));
        }
    }
    Ok(())
}

/// Applies a FRED-MD transform code to one series. Output is shorter than the
/// input by the differencing order of the code. Missing (`NaN`) inputs
/// propagate through differences.
///
/// Codes: 1 level, 2 first difference, 3 second difference, 4 log, 5 log
/// difference, 6 second log difference, 7 difference of the growth rate.
pub fn apply_tcode(series: &[f64], code: u8) -> Result<Vec<f64>> {
    let order = tcode_order(code);
    if series.len() <= order {
        return Err(Error::validation(format!(
            "series of length {} too short for tcode {code}",
            series.len()
        )));
    }
    let diff = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).collect::<Vec<f64>>();
    Ok(match code {
        1 => series.to_vec(),
        2 => diff(series),
        3 => diff(&diff(series)),
        4 => {
            check_positive(series, code)?;
            series.iter().map(|v| v.ln()).collect()
        }
        5 => {
            check_positive(series, code)?;
            diff(&series.iter().map(|v| v.ln()).collect::<Vec<f64>>())
        }
        6 => {
            check_positive(series, code)?;
            diff(&diff(&series.iter().map(|v| v.ln()).collect::<Vec<f64>>()))
        }
        7 => {
            let rates: Vec<f64> = series.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
            diff(&rates)
        }
        _ => return Err(Error::validation(format!("unknown tcode {code}"))),
    })
}

/// Transforms every column by its tcode and trims all columns to the common
/// length `T - COMMON_TRIM`, aligned at the end of the sample.
pub fn transform_panel(values: &Array2<f64>, tcodes: &[u8]) -> Result<Array2<f64>> {
    let (t, n) = (values.nrows(), values.ncols());
    if t <= COMMON_TRIM {
        return Err(Error::validation(format!(
            "panel of {t} rows too short to trim {COMMON_TRIM}"
        )));
    }
    let out_rows = t - COMMON_TRIM;
    let mut out = Array2::zeros((out_rows, n));
    for j in 0..n {
        let col: Vec<f64> = values.column(j).to_vec();
        let transformed = apply_tcode(&col, tcodes[j]).map_err(|e| {
            Error::domain(format!("column {j}: {e}"))
        })?;
        let skip = transformed.len() - out_rows;
        for (i, &v) in transformed[skip..].iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Replaces every missing cell with the mean of the observed cells of its own
/// column. Observed cells are untouched.
pub fn impute_missing(matrix: &Array2<f64>) -> Result<Array2<f64>> {
    let mut out = matrix.clone();
    for j in 0..matrix.ncols() {
        let col = matrix.column(j);
        let observed: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
        if observed.is_empty() {
            return Err(Error::validation(format!(
                "column {j} has no observed values to impute from"
            )));
        }
        if observed.len() == col.len() {
            continue;
        }
        let mean = observed.iter().sum::<f64>() / observed.len() as f64;
        for i in 0..matrix.nrows() {
            if out[[i, j]].is_nan() {
                out[[i, j]] = mean;
            }
        }
    }
    Ok(out)
}
