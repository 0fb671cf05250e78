//! Internal-memory extraction over the full sample.

use ndarray::Array2;

use crate::data::{build_supervised, Month, PreparedDataset};
use crate::error::Result;
use crate::models::AssembledModel;

/// The internal memory `f_{t|L}` evaluated on every rolling `L`-window of
/// the panel, one row per forecast origin, plus the correlation of each
/// component with the realized inflation series at the origin.
#[derive(Clone, Debug)]
pub struct InternalMemory {
    pub dates: Vec<Month>,
    /// `(T' - h - L + 1) x p`.
    pub values: Array2<f64>,
    /// Realized inflation at each origin, for plotting.
    pub inflation: Vec<f64>,
    pub correlations: Vec<f64>,
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Runs the trained cell over every window `t-L+1..t` of the panel from a
/// zero initial state, for `t = L..T'-h`.
pub fn extract_internal_memory(
    model: &AssembledModel,
    params: &[f64],
    data: &PreparedDataset,
    horizon: usize,
) -> Result<InternalMemory> {
    let sup = build_supervised(data, model.spec().predictor_choice(), horizon)?;
    let values = model.internal_memory(params, sup.inputs.view())?;
    let dates: Vec<Month> = sup.origins.iter().map(|&t| data.dates[t]).collect();
    let target = data.target_series();
    let inflation: Vec<f64> = sup.origins.iter().map(|&t| target[t]).collect();
    let correlations = (0..values.ncols())
        .map(|j| correlation(&values.column(j).to_vec(), &inflation))
        .collect();
    Ok(InternalMemory {
        dates,
        values,
        inflation,
        correlations,
    })
}
