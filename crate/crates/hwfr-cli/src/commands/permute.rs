//! `hwfr permute`: permutation significance assessment for the fitted
//! coefficient function.
//!
//! Refits the full selection + estimation pipeline on response-shuffled
//! copies of the data and writes pointwise percentile bands, the pointwise
//! rejection mask, and the max-statistic global rejection mask.
//!
//! Outputs: `beta_hat.hwv` (original fit), `lower_band.hwv`,
//! `upper_band.hwv`, `rejection_mask.hwv`, `global_rejection_mask.hwv`
//! (masks hold 0/1 values), `permute.json`, `resolved_config.json`.

use std::path::{Path, PathBuf};

use clap::Args;
use hwfr::funreg::FunctionalDataset;
use hwfr::inference::{permutation_test, PermutationMode};
use hwfr::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{self, merge_params};
use crate::error::Result;
use crate::formats;

use super::{build_grid, parse_rule, prepare_out, resolve_levels, with_dataset, write_mask};

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermuteParams {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Dataset directory (predictors/ + responses.csv).
    #[arg(long)]
    pub data: Option<String>,

    /// Selection rule rerun on each permutation: cv, aic, or bic
    /// (default cv).
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

    /// Number of permutations (default 200; must be at least 2/alpha).
    #[arg(long)]
    pub n_perm: Option<usize>,

    /// Two-sided significance level (default 0.05).
    #[arg(long)]
    pub alpha: Option<f64>,

    /// "full" reruns selection per permutation (default);
    /// "reuse-selected" keeps the original (level, lambda) — faster, but
    /// the null distribution ignores selection variability.
    #[arg(long)]
    pub mode: Option<String>,

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

merge_params!(PermuteParams {
    data, tune, k, levels, lambdas, n_perm, alpha, mode, seed, threads, out,
});

#[derive(Debug, Serialize)]
struct PermuteResolved {
    command: &'static str,
    data: String,
    tune: String,
    k: Option<usize>,
    levels: Vec<usize>,
    lambdas: Option<Vec<f64>>,
    n_perm: usize,
    alpha: f64,
    mode: String,
    seed: u64,
    threads: usize,
    out: String,
}

#[derive(Debug, Serialize)]
struct PermuteMeta {
    n_perm: usize,
    alpha: f64,
    mode: String,
    original_level: usize,
    original_lambda: f64,
    global_max_quantile: f64,
    seed: u64,
}

pub fn run(mut params: PermuteParams) -> Result<()> {
    let config_path = params.config.take();
    let p = config::merge_config(params, config_path.as_deref(), "permute")?;

    let data = config::require(p.data, "data")?;
    let tune = config::one_of("tune", p.tune.unwrap_or_else(|| "cv".into()), &["cv", "aic", "bic"])?;
    let loaded = formats::load_dataset(Path::new(&data))?;
    let dims = with_dataset!(&loaded, |ds| ds.dims());
    let resolved = PermuteResolved {
        command: "permute",
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
        n_perm: p.n_perm.unwrap_or(200),
        alpha: p.alpha.unwrap_or(0.05),
        mode: config::one_of(
            "mode",
            p.mode.unwrap_or_else(|| "full".into()),
            &["full", "reuse-selected"],
        )?,
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
    resolved: &PermuteResolved,
    out_dir: &Path,
) -> Result<()> {
    let grid = build_grid(&resolved.levels, resolved.lambdas.as_ref())?;
    let rule = parse_rule(&resolved.tune, resolved.k.unwrap_or(5))?;
    let mode = match resolved.mode.as_str() {
        "full" => PermutationMode::Full,
        _ => PermutationMode::ReuseSelected,
    };
    let result = permutation_test(
        dataset,
        rule,
        &grid,
        resolved.n_perm,
        resolved.alpha,
        resolved.seed,
        mode,
    )?;

    formats::write_grid(&out_dir.join("beta_hat.hwv"), result.original_beta.grid())?;
    formats::write_grid(&out_dir.join("lower_band.hwv"), &result.lower_band)?;
    formats::write_grid(&out_dir.join("upper_band.hwv"), &result.upper_band)?;
    let dims = dataset.dims();
    write_mask(&out_dir.join("rejection_mask.hwv"), dims, &result.rejection_mask)?;
    write_mask(
        &out_dir.join("global_rejection_mask.hwv"),
        dims,
        &result.global_rejection_mask,
    )?;
    formats::write_json(
        &out_dir.join("permute.json"),
        &PermuteMeta {
            n_perm: result.n_perm,
            alpha: result.alpha,
            mode: resolved.mode.clone(),
            original_level: result.original_level,
            original_lambda: result.original_lambda,
            global_max_quantile: result.global_max_quantile,
            seed: result.seed,
        },
    )
}
