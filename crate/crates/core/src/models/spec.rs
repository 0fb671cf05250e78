//! Architecture specifications and exact closed-form parameter counts.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::data::PredictorChoice;
use crate::error::{Error, Result};

/// The five forecasting architectures.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    FfCpi,
    FfPool,
    LstmPool,
    LstmAll,
    FfLstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::FfCpi,
        ModelKind::FfPool,
        ModelKind::LstmPool,
        ModelKind::LstmAll,
        ModelKind::FfLstm,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ModelKind::FfCpi => "ff_cpi",
            ModelKind::FfPool => "ff_pool",
            ModelKind::LstmPool => "lstm_pool",
            ModelKind::LstmAll => "lstm_all",
            ModelKind::FfLstm => "ff_lstm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match key.as_str() {
            "ff_cpi" | "ffcpi" => ModelKind::FfCpi,
            "ff_pool" | "ffpool" => ModelKind::FfPool,
            "lstm_pool" | "lstmpool" => ModelKind::LstmPool,
            "lstm_all" | "lstmall" => ModelKind::LstmAll,
            "ff_lstm" | "fflstm" => ModelKind::FfLstm,
            _ => return Err(Error::validation(format!("unknown model `{s}`"))),
        })
    }

    pub fn has_lstm(&self) -> bool {
        matches!(self, ModelKind::LstmPool | ModelKind::LstmAll | ModelKind::FfLstm)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Hyperparameters pinning one architecture to one panel shape.
///
/// `lags` is the lag depth of the model's main predictor block; for
/// [`ModelKind::FfLstm`] it is the LSTM-side depth `L_z` and `w_lags`
/// carries the dense-side depth `L_w`. `state` is the internal-memory size
/// `p`, present exactly when the architecture embeds an LSTM.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub kind: ModelKind,
    pub lags: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_lags: Option<usize>,
    pub nodes: usize,
    pub layers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<usize>,
    /// Number of pool series (N).
    pub n_pool: usize,
    /// Number of CPI-block series (M).
    pub n_cpi: usize,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lags < 1 || self.nodes < 1 || self.layers < 1 {
            return Err(Error::validation(format!(
                "spec needs lags/nodes/layers >= 1, got {self:?}"
            )));
        }
        if self.kind.has_lstm() != self.state.is_some() {
            return Err(Error::validation(format!(
                "state size must be present exactly for LSTM kinds, got {self:?}"
            )));
        }
        if matches!(self.kind, ModelKind::FfLstm) != self.w_lags.is_some() {
            return Err(Error::validation(format!(
                "w_lags must be present exactly for ff_lstm, got {self:?}"
            )));
        }
        if let Some(p) = self.state {
            if p < 1 {
                return Err(Error::validation("state size must be >= 1".to_string()));
            }
        }
        let needs_pool = !matches!(self.kind, ModelKind::FfCpi);
        if needs_pool && self.n_pool < 1 {
            return Err(Error::validation("n_pool must be >= 1".to_string()));
        }
        let needs_cpi = !matches!(self.kind, ModelKind::FfPool | ModelKind::LstmPool);
        if needs_cpi && self.n_cpi < 1 {
            return Err(Error::validation("n_cpi must be >= 1".to_string()));
        }
        Ok(())
    }

    /// Which supervised predictor set this architecture consumes.
    pub fn predictor_choice(&self) -> PredictorChoice {
        match self.kind {
            ModelKind::FfCpi => PredictorChoice::CpiOnly { lags: self.lags },
            ModelKind::FfPool | ModelKind::LstmPool => PredictorChoice::Pool { lags: self.lags },
            ModelKind::LstmAll => PredictorChoice::All { lags: self.lags },
            ModelKind::FfLstm => PredictorChoice::Composite {
                w_lags: self.w_lags.unwrap_or(1),
                z_lags: self.lags,
            },
        }
    }

    /// Flat supervised-row width this spec expects.
    pub fn input_width(&self) -> usize {
        self.predictor_choice().width(self.n_pool, self.n_cpi)
    }

    /// Exact number of scalars in the assembled model.
    pub fn param_count(&self) -> usize {
        let n = self.nodes;
        let q = self.layers;
        let dense_tail = (q - 1) * (n + 1) * n + (n + 1);
        match self.kind {
            ModelKind::FfCpi => (self.n_cpi * self.lags + 1) * n + dense_tail,
            ModelKind::FfPool => (self.n_pool * self.lags + 1) * n + dense_tail,
            ModelKind::LstmPool => {
                let p = self.state.unwrap();
                4 * (self.n_pool * p + p * p + p) + (p + 1) * n + dense_tail
            }
            ModelKind::LstmAll => {
                let p = self.state.unwrap();
                4 * ((self.n_pool + self.n_cpi) * p + p * p + p) + (p + 1) * n + dense_tail
            }
            ModelKind::FfLstm => {
                let p = self.state.unwrap();
                let lw = self.w_lags.unwrap();
                4 * (self.n_pool * p + p * p + p) + (p + self.n_cpi * lw + 1) * n + dense_tail
            }
        }
    }

    /// The grid-search optima reported for the October-2019 exercise, for a
    /// panel with `n_pool` pool series and `n_cpi` CPI-block series.
    pub fn reference_optimum(kind: ModelKind, n_pool: usize, n_cpi: usize) -> NetworkSpec {
        let base = NetworkSpec {
            kind,
            lags: 1,
            w_lags: None,
            nodes: 128,
            layers: 1,
            state: None,
            n_pool,
            n_cpi,
        };
        match kind {
            ModelKind::FfCpi => NetworkSpec { lags: 24, layers: 4, ..base },
            ModelKind::FfPool => NetworkSpec { lags: 48, layers: 3, ..base },
            ModelKind::LstmPool => NetworkSpec {
                lags: 48,
                layers: 4,
                state: Some(2),
                ..base
            },
            ModelKind::LstmAll => NetworkSpec {
                lags: 48,
                layers: 4,
                state: Some(2),
                ..base
            },
            ModelKind::FfLstm => NetworkSpec {
                lags: 48,
                w_lags: Some(24),
                layers: 4,
                state: Some(2),
                ..base
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_counts_match_published_table() {
        // (kind, expected) with N=118, M=10.
        let cases = [
            (ModelKind::FfCpi, 80_513),
            (ModelKind::FfPool, 758_273),
            (ModelKind::LstmPool, 51_017),
            (ModelKind::LstmAll, 51_097),
            (ModelKind::FfLstm, 81_737),
        ];
        for (kind, expected) in cases {
            let spec = NetworkSpec::reference_optimum(kind, 118, 10);
            assert_eq!(spec.param_count(), expected, "{kind}");
        }
    }

    #[test]
    fn state_presence_is_enforced() {
        let mut spec = NetworkSpec::reference_optimum(ModelKind::FfCpi, 118, 10);
        spec.state = Some(2);
        assert!(spec.validate().is_err());
        let mut spec = NetworkSpec::reference_optimum(ModelKind::LstmPool, 118, 10);
        spec.state = None;
        assert!(spec.validate().is_err());
        let mut spec = NetworkSpec::reference_optimum(ModelKind::FfLstm, 118, 10);
        spec.w_lags = None;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn input_widths() {
        let ff = NetworkSpec::reference_optimum(ModelKind::FfCpi, 118, 10);
        assert_eq!(ff.input_width(), 240);
        let pool = NetworkSpec::reference_optimum(ModelKind::FfPool, 118, 10);
        assert_eq!(pool.input_width(), 5664);
        let all = NetworkSpec::reference_optimum(ModelKind::LstmAll, 118, 10);
        assert_eq!(all.input_width(), 48 * 128);
        let comp = NetworkSpec::reference_optimum(ModelKind::FfLstm, 118, 10);
        assert_eq!(comp.input_width(), 118 * 48 + 10 * 24);
    }
}
