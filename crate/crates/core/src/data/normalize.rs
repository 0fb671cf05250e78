//! Per-series affine normalization to `[-1, 1]`, fitted on the in-sample
//! window only and extrapolated (not clipped) out of sample.

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Normalizer {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    /// Row range `[0, in_sample_end)` the map was fitted on.
    pub in_sample_end: usize,
}

impl Normalizer {
    /// Fits per-column min/max on rows `[0, in_sample_end)`. A column that is
    /// constant over the window is rejected by name.
    pub fn fit(matrix: &Array2<f64>, names: &[String], in_sample_end: usize) -> Result<Self> {
        if in_sample_end == 0 || in_sample_end > matrix.nrows() {
            return Err(Error::validation(format!(
                "in_sample_end {in_sample_end} outside 1..={}",
                matrix.nrows()
            )));
        }
        let n = matrix.ncols();
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for i in 0..in_sample_end {
            for j in 0..n {
                let v = matrix[[i, j]];
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        for j in 0..n {
            // Negated comparison also rejects NaN bounds.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(maxs[j] > mins[j]) {
                let name = names.get(j).map(String::as_str).unwrap_or("?");
                return Err(Error::validation(format!(
                    "column `{name}` is constant over the in-sample window"
                )));
            }
        }
        Ok(Normalizer {
            mins,
            maxs,
            in_sample_end,
        })
    }

    pub fn apply_value(&self, column: usize, x: f64) -> f64 {
        let (lo, hi) = (self.mins[column], self.maxs[column]);
        -1.0 + 2.0 * (x - lo) / (hi - lo)
    }

    pub fn invert_value(&self, column: usize, y: f64) -> f64 {
        let (lo, hi) = (self.mins[column], self.maxs[column]);
        lo + (y + 1.0) * (hi - lo) / 2.0
    }

    /// Applies the fitted map to every row, in- and out-of-sample alike.
    pub fn apply(&self, matrix: &Array2<f64>) -> Array2<f64> {
        let mut out = matrix.clone();
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                out[[i, j]] = self.apply_value(j, matrix[[i, j]]);
            }
        }
        out
    }

    pub fn invert(&self, matrix: &Array2<f64>) -> Array2<f64> {
        let mut out = matrix.clone();
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                out[[i, j]] = self.invert_value(j, matrix[[i, j]]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn midpoint_maps_to_zero_and_oos_extrapolates() {
        let m = array![[0.0], [10.0], [5.0], [20.0]];
        let norm = Normalizer::fit(&m, &names(1), 2).unwrap();
        assert_eq!(norm.apply_value(0, 5.0), 0.0);
        // Out-of-sample value beyond the fitted range extrapolates linearly.
        assert_eq!(norm.apply_value(0, 20.0), 3.0);
        let applied = norm.apply(&m);
        assert_eq!(applied[[0, 0]], -1.0);
        assert_eq!(applied[[1, 0]], 1.0);
        assert_eq!(applied[[3, 0]], 3.0); // not clipped
    }

    #[test]
    fn constant_column_rejected_by_name() {
        let m = array![[1.0, 2.0], [1.0, 3.0]];
        let err = Normalizer::fit(&m, &names(2), 2).unwrap_err();
        assert!(err.to_string().contains("`s0`"), "{err}");
    }

    #[test]
    fn fit_ignores_out_of_sample_rows() {
        let a = array![[0.0], [1.0], [50.0]];
        let mut b = a.clone();
        b[[2, 0]] = -999.0;
        let na = Normalizer::fit(&a, &names(1), 2).unwrap();
        let nb = Normalizer::fit(&b, &names(1), 2).unwrap();
        assert_eq!(na, nb);
    }
}
