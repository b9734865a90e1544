//! `hwfr fit`: estimate the coefficient function on a dataset directory.
//!
//! Tuning modes (`--tune`):
//! * `cv` (default) — k-fold cross-validation over levels × penalties
//! * `sv` — split the data once (last `⌈val-frac·n⌉` rows held out), score on
//!   the held-out part, refit on all rows
//! * `aic` / `bic` — information criteria with a refitted cross-validation
//!   noise variance
//! * `fixed` — fit exactly `--level` and `--lambda`
//! * `lambda-max` — fit `--level` at the smallest penalty that zeroes every
//!   coefficient
//!
//! Outputs: `beta_hat.hwv`, `eta_hat.csv` (nonzero wavelet coefficients as
//! `index,value`), `fit.json`, `score_table.csv` (tuned modes), and
//! `resolved_config.json`.

use std::path::{Path, PathBuf};

use clap::Args;
use hwfr::funreg::{build_design, fit_functional, FunctionalDataset, FunctionalFit};
use hwfr::lasso::lambda_max;
use hwfr::tuning::{select_sv, select_with, TuningResult};
use hwfr::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{self, merge_params};
use crate::error::{CliError, Result};
use crate::formats;

use super::{build_grid, parse_rule, prepare_out, resolve_levels, with_dataset};

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitParams {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Dataset directory (predictors/ + responses.csv).
    #[arg(long)]
    pub data: Option<String>,

    /// Tuning mode: cv, sv, aic, bic, fixed, or lambda-max (default cv).
    #[arg(long)]
    pub tune: Option<String>,

    /// Folds for cross-validation (default 5).
    #[arg(long)]
    pub k: Option<usize>,

    /// Held-out fraction for --tune sv (default 0.25).
    #[arg(long)]
    pub val_frac: Option<f64>,

    /// Decomposition levels to search, e.g. 1,2,3 (default: all admissible).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,

    /// Explicit penalty grid shared by every level, strictly decreasing
    /// (default: a data-derived logarithmic path per level).
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,

    /// Level for --tune fixed / lambda-max.
    #[arg(long)]
    pub level: Option<usize>,

    /// Penalty for --tune fixed.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Random seed for fold assignment and variance-estimation splits
    /// (default 0).
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

merge_params!(FitParams {
    data, tune, k, val_frac, levels, lambdas, level, lambda, seed, threads, out,
});

#[derive(Debug, Serialize)]
struct FitResolved {
    command: &'static str,
    data: String,
    tune: String,
    k: Option<usize>,
    val_frac: Option<f64>,
    levels: Option<Vec<usize>>,
    lambdas: Option<Vec<f64>>,
    level: Option<usize>,
    lambda: Option<f64>,
    seed: u64,
    threads: usize,
    out: String,
}

/// Metadata of the final model, written as `fit.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FitMeta {
    pub level: usize,
    pub lambda: f64,
    pub intercept: f64,
    pub df: usize,
    pub objective_value: f64,
    pub n_iter: usize,
    pub max_kkt_violation: f64,
    /// Name of the criterion that selected `(level, lambda)`, if any.
    pub criterion: Option<String>,
    pub seed: u64,
}

pub fn run(mut params: FitParams) -> Result<()> {
    let config_path = params.config.take();
    let p = config::merge_config(params, config_path.as_deref(), "fit")?;

    let data = config::require(p.data, "data")?;
    let tune = config::one_of(
        "tune",
        p.tune.unwrap_or_else(|| "cv".into()),
        &["cv", "sv", "aic", "bic", "fixed", "lambda-max"],
    )?;
    let seed = p.seed.unwrap_or(0);
    let threads = config::resolve_threads(p.threads)?;
    let out = config::require(p.out, "out")?;

    let loaded = formats::load_dataset(Path::new(&data))?;
    let tuned = matches!(tune.as_str(), "cv" | "sv" | "aic" | "bic");
    let mut resolved = FitResolved {
        command: "fit",
        data,
        tune: tune.clone(),
        k: None,
        val_frac: None,
        levels: None,
        lambdas: None,
        level: None,
        lambda: None,
        seed,
        threads,
        out,
    };
    if tuned {
        config::forbid(&p.level, "level", "to tuned modes (use --levels)")?;
        config::forbid(&p.lambda, "lambda", "to tuned modes (use --lambdas)")?;
        let dims = with_dataset!(&loaded, |ds| ds.dims());
        resolved.levels = Some(resolve_levels(p.levels, dims)?);
        resolved.lambdas = p.lambdas;
        match tune.as_str() {
            "cv" => resolved.k = Some(p.k.unwrap_or(5)),
            "sv" => {
                let f = p.val_frac.unwrap_or(0.25);
                if !(f > 0.0 && f < 1.0) {
                    return Err(CliError::config(format!(
                        "--val-frac must be inside (0, 1), got {f}"
                    )));
                }
                resolved.val_frac = Some(f);
            }
            _ => {}
        }
    } else {
        config::forbid(&p.levels, "levels", "to fixed modes (use --level)")?;
        config::forbid(&p.k, "k", "to fixed modes")?;
        config::forbid(&p.val_frac, "val-frac", "to fixed modes")?;
        resolved.level = Some(config::require(p.level, "level")?);
        if tune == "fixed" {
            resolved.lambda = Some(config::require(p.lambda, "lambda")?);
        } else {
            config::forbid(&p.lambda, "lambda", "to lambda-max mode")?;
        }
    }

    config::init_threads(resolved.threads)?;
    let out_dir = prepare_out(&resolved.out)?;
    formats::write_json(&out_dir.join("resolved_config.json"), &resolved)?;

    with_dataset!(loaded, |ds| run_typed(&ds, &resolved, &out_dir))
}

fn run_typed<G: Grid>(
    dataset: &FunctionalDataset<G>,
    resolved: &FitResolved,
    out_dir: &Path,
) -> Result<()> {
    let (fit, tuning): (FunctionalFit<G>, Option<TuningResult>) = match resolved.tune.as_str() {
        "fixed" => {
            let level = resolved.level.expect("resolved fixed config has level");
            let lambda = resolved.lambda.expect("resolved fixed config has lambda");
            (fit_functional(dataset, level, lambda)?, None)
        }
        "lambda-max" => {
            let level = resolved.level.expect("resolved lambda-max config has level");
            let design = build_design(dataset, level)?;
            let lm = lambda_max(design.matrix(), dataset.responses(), true);
            (fit_functional(dataset, level, lm)?, None)
        }
        "sv" => {
            let levels = resolved.levels.as_ref().expect("resolved sv config has levels");
            let grid = build_grid(levels, resolved.lambdas.as_ref())?;
            let n = dataset.len();
            let f = resolved.val_frac.expect("resolved sv config has val_frac");
            let n_val = ((f * n as f64).ceil() as usize).clamp(1, n.saturating_sub(1).max(1));
            if n_val >= n {
                return Err(CliError::config(format!(
                    "validation split of {n_val} rows leaves no training data (n = {n})"
                )));
            }
            let train_idx: Vec<usize> = (0..n - n_val).collect();
            let val_idx: Vec<usize> = (n - n_val..n).collect();
            let train = dataset.subset(&train_idx)?;
            let validation = dataset.subset(&val_idx)?;
            let result = select_sv(&train, &validation, &grid)?;
            (result.fit_selected(dataset)?, Some(result))
        }
        name => {
            let levels = resolved.levels.as_ref().expect("resolved tuned config has levels");
            let grid = build_grid(levels, resolved.lambdas.as_ref())?;
            let rule = parse_rule(name, resolved.k.unwrap_or(5))?;
            let result = select_with(dataset, rule, &grid, resolved.seed)?;
            (result.fit_selected(dataset)?, Some(result))
        }
    };

    write_fit_outputs(&fit, tuning.as_ref(), resolved.seed, out_dir)
}

/// Writes `beta_hat.hwv`, `eta_hat.csv`, `fit.json`, and (when tuning ran)
/// `score_table.csv`. Shared with other commands that emit fitted models.
pub(crate) fn write_fit_outputs<G: Grid>(
    fit: &FunctionalFit<G>,
    tuning: Option<&TuningResult>,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    formats::write_grid(&out_dir.join("beta_hat.hwv"), fit.beta().grid())?;
    write_eta(&out_dir.join("eta_hat.csv"), fit)?;
    formats::write_json(
        &out_dir.join("fit.json"),
        &FitMeta {
            level: fit.level(),
            lambda: fit.lambda(),
            intercept: fit.intercept(),
            df: fit.lasso_fit.df(),
            objective_value: fit.lasso_fit.objective_value,
            n_iter: fit.lasso_fit.n_iter,
            max_kkt_violation: fit.lasso_fit.max_kkt_violation,
            criterion: tuning.map(|t| t.criterion.to_string()),
            seed,
        },
    )?;
    if let Some(result) = tuning {
        write_score_table(&out_dir.join("score_table.csv"), result)?;
    }
    Ok(())
}

/// Nonzero wavelet coefficients in the flat layout, as `index,value`.
fn write_eta<G: Grid>(path: &Path, fit: &FunctionalFit<G>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    w.write_record(["index", "value"])?;
    for (index, value) in fit.kept_columns().iter().zip(&fit.lasso_fit.coefficients) {
        if *value != 0.0 {
            w.write_record([index.to_string(), format!("{value}")])?;
        }
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn write_score_table(path: &Path, result: &TuningResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    w.write_record(["level", "lambda", "score", "df"])?;
    for entry in &result.score_table {
        w.write_record([
            entry.level.to_string(),
            format!("{}", entry.lambda),
            format!("{}", entry.score),
            format!("{}", entry.df),
        ])?;
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
