//! `hwfr r2`: cross-validated predictive R² with nested tuning.
//!
//! Each outer fold is predicted by a model tuned by inner cross-validation
//! on the remaining data, so the reported R² reflects the whole pipeline.
//!
//! Outputs: `r2.json`, `fold_assignments.csv` (`id,fold`),
//! `resolved_config.json`.

use std::path::{Path, PathBuf};

use clap::Args;
use hwfr::funreg::FunctionalDataset;
use hwfr::inference::predictive_r2;
use hwfr::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{self, merge_params};
use crate::error::{CliError, Result};
use crate::formats;

use super::{build_grid, prepare_out, resolve_levels, with_dataset};

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct R2Params {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Dataset directory (predictors/ + responses.csv).
    #[arg(long)]
    pub data: Option<String>,

    /// Outer folds (default 10).
    #[arg(long)]
    pub outer_k: Option<usize>,

    /// Inner tuning folds (default 5).
    #[arg(long)]
    pub inner_k: Option<usize>,

    /// Decomposition levels to search, e.g. 1,2,3 (default: all admissible).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,

    /// Explicit penalty grid shared by every level, strictly decreasing
    /// (default: a data-derived logarithmic path per level).
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,

    /// Random seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker thread cap; 0 = automatic (default; falls back to
    /// HWFR_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

merge_params!(R2Params {
    data, outer_k, inner_k, levels, lambdas, seed, threads, out,
});

#[derive(Debug, Serialize)]
struct R2Resolved {
    command: &'static str,
    data: String,
    outer_k: usize,
    inner_k: usize,
    levels: Vec<usize>,
    lambdas: Option<Vec<f64>>,
    seed: u64,
    threads: usize,
    out: String,
}

#[derive(Debug, Serialize)]
struct R2Meta {
    r2_predictive: f64,
    r2_standard: f64,
    outer_k: usize,
    inner_k: usize,
    seed: u64,
}

pub fn run(mut params: R2Params) -> Result<()> {
    let config_path = params.config.take();
    let p = config::merge_config(params, config_path.as_deref(), "r2")?;

    let data = config::require(p.data, "data")?;
    let loaded = formats::load_dataset(Path::new(&data))?;
    let dims = with_dataset!(&loaded, |ds| ds.dims());
    let resolved = R2Resolved {
        command: "r2",
        data,
        outer_k: p.outer_k.unwrap_or(10),
        inner_k: p.inner_k.unwrap_or(5),
        levels: resolve_levels(p.levels, dims)?,
        lambdas: p.lambdas,
        seed: p.seed.unwrap_or(0),
        threads: config::resolve_threads(p.threads)?,
        out: config::require(p.out, "out")?,
    };

    config::init_threads(resolved.threads)?;
    let out_dir = prepare_out(&resolved.out)?;
    formats::write_json(&out_dir.join("resolved_config.json"), &resolved)?;

    with_dataset!(loaded, |ds| run_typed(&ds, &resolved, &out_dir))
}

fn run_typed<G: Grid>(
    dataset: &FunctionalDataset<G>,
    resolved: &R2Resolved,
    out_dir: &Path,
) -> Result<()> {
    let grid = build_grid(&resolved.levels, resolved.lambdas.as_ref())?;
    let result = predictive_r2(dataset, resolved.outer_k, resolved.inner_k, &grid, resolved.seed)?;

    formats::write_json(
        &out_dir.join("r2.json"),
        &R2Meta {
            r2_predictive: result.r2_predictive,
            r2_standard: result.r2_standard,
            outer_k: resolved.outer_k,
            inner_k: resolved.inner_k,
            seed: result.seed,
        },
    )?;
    let path = out_dir.join("fold_assignments.csv");
    let mut w = csv::Writer::from_path(&path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    w.write_record(["id", "fold"])?;
    for (i, fold) in result.fold_assignments.iter().enumerate() {
        w.write_record([i.to_string(), fold.to_string()])?;
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
