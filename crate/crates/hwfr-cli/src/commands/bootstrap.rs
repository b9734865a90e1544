//! `hwfr bootstrap`: bootstrap inclusion frequencies.
//!
//! Reruns the selection + estimation pipeline on resamples drawn with
//! replacement and counts, per grid cell, how many resamples gave that cell
//! a nonzero coefficient.
//!
//! Outputs: `bif.hwv` (counts as floats on the grid), `bootstrap.json`
//! (with the per-resample selected pairs), `resolved_config.json`.

use std::path::{Path, PathBuf};

use clap::Args;
use hwfr::funreg::FunctionalDataset;
use hwfr::inference::bootstrap_inclusion;
use hwfr::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{self, merge_params};
use crate::error::Result;
use crate::formats;

use super::{build_grid, parse_rule, prepare_out, resolve_levels, with_dataset};

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapParams {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Dataset directory (predictors/ + responses.csv).
    #[arg(long)]
    pub data: Option<String>,

    /// Selection rule rerun on each resample: cv, aic, or bic (default cv).
    #[arg(long)]
    pub tune: Option<String>,

    /// Folds for cross-validation (default 5).
    #[arg(long)]
    pub k: Option<usize>,

    /// Decomposition levels to search, e.g. 1,2,3 (default: all admissible).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,

    /// Explicit penalty grid shared by every level, strictly decreasing
    /// (default: a data-derived logarithmic path per level).
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,

    /// Number of bootstrap resamples (default 100).
    #[arg(long)]
    pub b: Option<usize>,

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

merge_params!(BootstrapParams {
    data, tune, k, levels, lambdas, b, seed, threads, out,
});

#[derive(Debug, Serialize)]
struct BootstrapResolved {
    command: &'static str,
    data: String,
    tune: String,
    k: Option<usize>,
    levels: Vec<usize>,
    lambdas: Option<Vec<f64>>,
    b: usize,
    seed: u64,
    threads: usize,
    out: String,
}

#[derive(Debug, Serialize)]
struct SelectedPair {
    level: usize,
    lambda: f64,
}

#[derive(Debug, Serialize)]
struct BootstrapMeta {
    b: usize,
    seed: u64,
    selected: Vec<SelectedPair>,
}

pub fn run(mut params: BootstrapParams) -> Result<()> {
    let config_path = params.config.take();
    let p = config::merge_config(params, config_path.as_deref(), "bootstrap")?;

    let data = config::require(p.data, "data")?;
    let tune = config::one_of("tune", p.tune.unwrap_or_else(|| "cv".into()), &["cv", "aic", "bic"])?;
    let loaded = formats::load_dataset(Path::new(&data))?;
    let dims = with_dataset!(&loaded, |ds| ds.dims());
    let resolved = BootstrapResolved {
        command: "bootstrap",
        data,
        k: match tune.as_str() {
            "cv" => Some(p.k.unwrap_or(5)),
            _ => {
                config::forbid(&p.k, "k", "without --tune cv")?;
                None
            }
        },
        tune,
        levels: resolve_levels(p.levels, dims)?,
        lambdas: p.lambdas,
        b: p.b.unwrap_or(100),
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
    resolved: &BootstrapResolved,
    out_dir: &Path,
) -> Result<()> {
    let grid = build_grid(&resolved.levels, resolved.lambdas.as_ref())?;
    let rule = parse_rule(&resolved.tune, resolved.k.unwrap_or(5))?;
    let result = bootstrap_inclusion(dataset, resolved.b, rule, &grid, resolved.seed)?;

    let counts: Vec<f64> = result.inclusion_frequency.iter().map(|c| *c as f64).collect();
    formats::write_volume(
        &out_dir.join("bif.hwv"),
        formats::storage_dims(dataset.dims()),
        &counts,
    )?;
    formats::write_json(
        &out_dir.join("bootstrap.json"),
        &BootstrapMeta {
            b: result.b,
            seed: result.seed,
            selected: result
                .selected
                .iter()
                .map(|(level, lambda)| SelectedPair {
                    level: *level,
                    lambda: *lambda,
                })
                .collect(),
        },
    )
}
