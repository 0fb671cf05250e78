//! Factor-augmented distributed-lag benchmark: principal-component factors,
//! direct h-step least squares, and a fixed-regressor residual bootstrap.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FadlConfig {
    /// Autoregressive lags p (target enters with lags 0..p-1).
    pub ar_lags: usize,
    /// Number of principal-component factors r (one factor lag).
    pub factors: usize,
    /// Fixed-regressor bootstrap replications.
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for FadlConfig {
    fn default() -> Self {
        FadlConfig {
            ar_lags: 4,
            factors: 4,
            bootstrap: 5000,
            seed: 0,
        }
    }
}

/// Columns scaled to zero mean and unit variance over the given rows.
pub fn standardize(panel: ArrayView2<f64>) -> Result<Array2<f64>> {
    let (t, n) = (panel.nrows(), panel.ncols());
    let mut out = panel.to_owned();
    for j in 0..n {
        let col = panel.column(j);
        let mean = col.sum() / t as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t as f64;
        if var <= 0.0 {
            return Err(Error::validation(format!(
                "panel column {j} is constant; cannot standardize"
            )));
        }
        let sd = var.sqrt();
        for i in 0..t {
            out[[i, j]] = (panel[[i, j]] - mean) / sd;
        }
    }
    Ok(out)
}

/// Principal components of a standardized panel.
#[derive(Clone, Debug)]
pub struct Pca {
    /// `n x r` unit-norm loading vectors, by descending eigenvalue.
    pub loadings: Array2<f64>,
    pub eigenvalues: Vec<f64>,
}

impl Pca {
    /// Factor scores `T x r` for a standardized panel.
    pub fn scores(&self, standardized: ArrayView2<f64>) -> Array2<f64> {
        standardized.dot(&self.loadings)
    }
}

/// Eigen-decomposition of the sample covariance of an already-standardized
/// panel.
pub fn principal_components(standardized: ArrayView2<f64>, r: usize) -> Result<Pca> {
    let (t, n) = (standardized.nrows(), standardized.ncols());
    if r > n {
        return Err(Error::validation(format!(
            "requested {r} factors from {n} series"
        )));
    }
    let mut cov = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut s = 0.0;
            for i in 0..t {
                s += standardized[[i, a]] * standardized[[i, b]];
            }
            s /= t as f64;
            cov[(a, b)] = s;
            cov[(b, a)] = s;
        }
    }
    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut loadings = Array2::zeros((n, r));
    let mut eigenvalues = Vec::with_capacity(r);
    for (k, &idx) in order.iter().take(r).enumerate() {
        eigenvalues.push(eig.eigenvalues[idx]);
        for row in 0..n {
            loadings[[row, k]] = eig.eigenvectors[(row, idx)];
        }
    }
    Ok(Pca {
        loadings,
        eigenvalues,
    })
}

/// Fitted regression and bootstrap forecast density summary.
#[derive(Clone, Debug)]
pub struct FadlFit {
    /// Intercept, then beta_0..beta_{p-1}, then gamma_1..gamma_r.
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Plain least-squares forecast from the final regressor row.
    pub ols_forecast: f64,
    /// Mean of the fixed-regressor bootstrap density.
    pub point_forecast: f64,
}

/// Fits the direct projection
/// `pi_{t+h} = b0 + sum_i beta_i pi_{t-i} + sum_j gamma_j f_{j,t} + nu`
/// on all data up to the end of `target`/`panel` and forecasts `h` steps
/// past the last row. Factors are principal components of the standardized
/// predictor panel; the point forecast averages `config.bootstrap`
/// resampled-residual refits with regressors held fixed.
pub fn fadl_fit_forecast(
    target: &[f64],
    panel: ArrayView2<f64>,
    horizon: usize,
    config: &FadlConfig,
) -> Result<FadlFit> {
    let t_len = target.len();
    if panel.nrows() != t_len {
        return Err(Error::shape(format!(
            "target has {t_len} rows, panel {}",
            panel.nrows()
        )));
    }
    let p = config.ar_lags;
    let r = config.factors;
    if p < 1 {
        return Err(Error::validation("ar_lags must be at least 1".to_string()));
    }
    if horizon < 1 {
        return Err(Error::validation("horizon must be at least 1".to_string()));
    }
    let scores = if r > 0 {
        let standardized = standardize(panel)?;
        let pca = principal_components(standardized.view(), r)?;
        Some(pca.scores(standardized.view()))
    } else {
        None
    };

    // Regression rows: origins t = p-1 .. t_len-1-h.
    if t_len < p + horizon + r + 2 {
        return Err(Error::validation(format!(
            "series of {t_len} too short for p={p}, r={r}, h={horizon}"
        )));
    }
    let k = 1 + p + r;
    let rows = t_len - horizon - (p - 1);
    let mut x = DMatrix::zeros(rows, k);
    let mut y = DVector::zeros(rows);
    for (row, t) in ((p - 1)..(t_len - horizon)).enumerate() {
        x[(row, 0)] = 1.0;
        for i in 0..p {
            x[(row, 1 + i)] = target[t - i];
        }
        if let Some(scores) = &scores {
            for j in 0..r {
                x[(row, 1 + p + j)] = scores[[t, j]];
            }
        }
        y[row] = target[t + horizon];
    }

    let xtx = x.transpose() * &x;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::validation("rank-deficient FADL regression".to_string()))?;
    let xty = x.transpose() * &y;
    let beta = chol.solve(&xty);
    let fitted = &x * &beta;
    let residuals: Vec<f64> = (0..rows).map(|i| y[i] - fitted[i]).collect();

    // Final regressor row at the forecast origin t = t_len-1.
    let mut x_now = DVector::zeros(k);
    x_now[0] = 1.0;
    for i in 0..p {
        x_now[1 + i] = target[t_len - 1 - i];
    }
    if let Some(scores) = &scores {
        for j in 0..r {
            x_now[1 + p + j] = scores[[t_len - 1, j]];
        }
    }
    let ols_forecast = x_now.dot(&beta);

    // beta* = beta + (X'X)^{-1} X' eps*, so the bootstrap forecast is
    // ols + w . eps* with w = x_now' (X'X)^{-1} X'.
    let w_t = chol.solve(&x_now);
    let weights: DVector<f64> = &x * &w_t;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sum = 0.0;
    for _ in 0..config.bootstrap.max(1) {
        let mut shift = 0.0;
        for i in 0..rows {
            let pick = rng.random_range(0..rows);
            shift += weights[i] * residuals[pick];
        }
        sum += ols_forecast + shift;
    }
    let point_forecast = sum / config.bootstrap.max(1) as f64;

    Ok(FadlFit {
        coefficients: beta.iter().copied().collect(),
        residuals,
        ols_forecast,
        point_forecast,
    })
}

/// Direct-projection AR forecast (no factors), for the structural-reduction
/// check.
pub fn distributed_lag_forecast(target: &[f64], horizon: usize, p: usize) -> Result<f64> {
    let cfg = FadlConfig {
        ar_lags: p,
        factors: 0,
        bootstrap: 1,
        seed: 0,
    };
    let panel = Array2::zeros((target.len(), 0));
    // factors = 0 skips standardization, so the empty panel is fine.
    let fit = fadl_fit_forecast(target, panel.view(), horizon, &cfg)?;
    Ok(fit.ols_forecast)
}
