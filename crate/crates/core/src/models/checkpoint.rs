//! Trained-model persistence: the flat parameter checkpoint plus a spec
//! header, so a file is enough to rebuild the assembled model.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::models::{AssembledModel, ModelKind, NetworkSpec};
use crate::neural::{load_params, save_params, Model};

fn spec_meta(spec: &NetworkSpec) -> Vec<(String, String)> {
    let mut meta = vec![
        ("kind".to_string(), spec.kind.id().to_string()),
        ("lags".to_string(), spec.lags.to_string()),
        ("nodes".to_string(), spec.nodes.to_string()),
        ("layers".to_string(), spec.layers.to_string()),
        ("n_pool".to_string(), spec.n_pool.to_string()),
        ("n_cpi".to_string(), spec.n_cpi.to_string()),
    ];
    if let Some(w) = spec.w_lags {
        meta.push(("w_lags".to_string(), w.to_string()));
    }
    if let Some(p) = spec.state {
        meta.push(("state".to_string(), p.to_string()));
    }
    meta
}

pub fn save_model<W: Write>(writer: &mut W, model: &AssembledModel, params: &[f64]) -> Result<()> {
    save_params(writer, model.layout(), params, &spec_meta(model.spec()))
}

pub fn load_model<R: BufRead>(reader: &mut R) -> Result<(AssembledModel, Vec<f64>)> {
    let loaded = load_params(reader)?;
    let field = |key: &str| -> Result<usize> {
        loaded
            .meta_value(key)
            .ok_or_else(|| Error::validation(format!("checkpoint missing `{key}`")))?
            .parse()
            .map_err(|_| Error::validation(format!("bad `{key}` in checkpoint")))
    };
    let kind = ModelKind::parse(
        loaded
            .meta_value("kind")
            .ok_or_else(|| Error::validation("checkpoint missing `kind`".to_string()))?,
    )?;
    let spec = NetworkSpec {
        kind,
        lags: field("lags")?,
        w_lags: loaded.meta_value("w_lags").map(|_| field("w_lags")).transpose()?,
        nodes: field("nodes")?,
        layers: field("layers")?,
        state: loaded.meta_value("state").map(|_| field("state")).transpose()?,
        n_pool: field("n_pool")?,
        n_cpi: field("n_cpi")?,
    };
    let model = AssembledModel::build(spec)?;
    let params = loaded.into_vector_for(model.layout())?;
    Ok((model, params))
}
