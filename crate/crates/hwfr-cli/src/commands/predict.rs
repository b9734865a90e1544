//! `hwfr predict`: score new predictors with a fitted model.
//!
//! Reads `beta_hat.hwv` and `fit.json` from a fit output directory, applies
//! `ŷ = β̂₀ + (1/|grid|) Σ x(t_j) β̂(t_j)` to every predictor in the data
//! directory, and writes `predictions.csv` (columns `id,y_hat`).

use std::path::{Path, PathBuf};

use clap::Args;
use hwfr::simgen::linear_functional;
use serde::{Deserialize, Serialize};

use crate::config::{self, merge_params};
use crate::error::{CliError, Result};
use crate::formats::{self, GridData, LoadedPredictors};

use super::prepare_out;

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictParams {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Fit output directory (beta_hat.hwv + fit.json).
    #[arg(long)]
    pub fit: Option<String>,

    /// Directory whose predictors/ subdirectory to score.
    #[arg(long)]
    pub data: Option<String>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

merge_params!(PredictParams { fit, data, out });

#[derive(Debug, Serialize)]
struct PredictResolved {
    command: &'static str,
    fit: String,
    data: String,
    out: String,
}

pub fn run(mut params: PredictParams) -> Result<()> {
    let config_path = params.config.take();
    let p = config::merge_config(params, config_path.as_deref(), "predict")?;
    let resolved = PredictResolved {
        command: "predict",
        fit: config::require(p.fit, "fit")?,
        data: config::require(p.data, "data")?,
        out: config::require(p.out, "out")?,
    };

    let fit_dir = Path::new(&resolved.fit);
    let meta: super::fit::FitMeta = formats::read_json(&fit_dir.join("fit.json"))?;
    let beta = formats::read_grid(&fit_dir.join("beta_hat.hwv"))?;
    let predictors = formats::load_predictors(Path::new(&resolved.data))?;

    let predictions: Vec<f64> = match (&beta, &predictors) {
        (GridData::OneD(b), LoadedPredictors::OneD(xs)) => xs
            .iter()
            .map(|x| Ok(meta.intercept + linear_functional(x, b)?))
            .collect::<Result<_>>()?,
        (GridData::ThreeD(b), LoadedPredictors::ThreeD(xs)) => xs
            .iter()
            .map(|x| Ok(meta.intercept + linear_functional(x, b)?))
            .collect::<Result<_>>()?,
        _ => {
            return Err(CliError::config(
                "fitted coefficients and predictors have different dimensionality",
            ))
        }
    };

    let out_dir = prepare_out(&resolved.out)?;
    formats::write_json(&out_dir.join("resolved_config.json"), &resolved)?;
    let path = out_dir.join("predictions.csv");
    let mut w = csv::Writer::from_path(&path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    w.write_record(["id", "y_hat"])?;
    for (i, value) in predictions.iter().enumerate() {
        w.write_record([i.to_string(), format!("{value}")])?;
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
