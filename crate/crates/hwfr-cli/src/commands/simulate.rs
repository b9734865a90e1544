//! `hwfr simulate`: generate a synthetic dataset with known ground truth.
//!
//! Output directory layout:
//! * `predictors/x_00000.hwv` …      observed (noisy) predictor grids
//! * `predictors_noiseless/…`        the same curves before measurement noise
//! * `responses.csv`                 columns `id,y`
//! * `beta_true.hwv`                 the generating coefficient function
//! * `truth.json`                    noise variances and the noiseless
//!   linear-functional values `g`
//! * `resolved_config.json`          the exact configuration executed

use std::path::PathBuf;

use clap::Args;
use hwfr::simgen::{
    gen_1d, gen_3d, BetaCase, NoiseVarianceMode, PredictorFamily, SimDesign1D, SimDesign3D,
};
use hwfr::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{self, merge_params};
use crate::error::{CliError, Result};
use crate::formats;

use super::prepare_out;

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Grid family: "1d" curves or "3d" volumes.
    #[arg(long)]
    pub design: Option<String>,

    /// 1D predictor family: "fourier" or "bspline" (default bspline).
    #[arg(long)]
    pub x_type: Option<String>,

    /// 1D coefficient shape: 1 (localized sinusoid) or 2 (piecewise
    /// constant, the default).
    #[arg(long)]
    pub beta_case: Option<u8>,

    /// Number of observations.
    #[arg(long)]
    pub n: Option<usize>,

    /// 1D grid length; must be a power of two.
    #[arg(long)]
    pub p: Option<usize>,

    /// 3D cubic edge length; must be a power of two.
    #[arg(long)]
    pub dims: Option<usize>,

    /// Signal-to-noise ratio var(g)/σ² (default 9).
    #[arg(long)]
    pub snr: Option<f64>,

    /// Predictor noise variance convention: "across-sample-mean" (default)
    /// or "per-curve".
    #[arg(long)]
    pub noise_mode: Option<String>,

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

merge_params!(SimulateParams {
    design, x_type, beta_case, n, p, dims, snr, noise_mode, seed, threads, out,
});

#[derive(Debug, Serialize)]
struct SimulateResolved {
    command: &'static str,
    design: String,
    x_type: Option<String>,
    beta_case: Option<u8>,
    n: usize,
    p: Option<usize>,
    dims: Option<usize>,
    snr: f64,
    noise_mode: String,
    seed: u64,
    threads: usize,
    out: String,
}

#[derive(Debug, Serialize)]
struct TruthFile<'a> {
    sigma2: f64,
    sigma_e2: f64,
    sigma_g2: f64,
    g: &'a [f64],
}

pub fn run(mut params: SimulateParams) -> Result<()> {
    let config_path = params.config.take();
    let p = config::merge_config(params, config_path.as_deref(), "simulate")?;

    let design = config::one_of("design", config::require(p.design, "design")?, &["1d", "3d"])?;
    let n = config::require(p.n, "n")?;
    let snr = p.snr.unwrap_or(9.0);
    if !(snr.is_finite() && snr > 0.0) {
        return Err(CliError::config(format!(
            "--snr must be a positive finite number, got {snr}"
        )));
    }
    let noise_mode_name = config::one_of(
        "noise-mode",
        p.noise_mode.unwrap_or_else(|| "across-sample-mean".into()),
        &["across-sample-mean", "per-curve"],
    )?;
    let noise_mode = match noise_mode_name.as_str() {
        "across-sample-mean" => NoiseVarianceMode::AcrossSampleMean,
        _ => NoiseVarianceMode::PerCurve,
    };
    let seed = p.seed.unwrap_or(0);
    let threads = config::resolve_threads(p.threads)?;
    let out = config::require(p.out, "out")?;

    let resolved = match design.as_str() {
        "1d" => {
            config::forbid(&p.dims, "dims", "to 1d designs (use --p)")?;
            let x_type = config::one_of(
                "x-type",
                p.x_type.unwrap_or_else(|| "bspline".into()),
                &["fourier", "bspline"],
            )?;
            let beta_case = p.beta_case.unwrap_or(2);
            if !(beta_case == 1 || beta_case == 2) {
                return Err(CliError::config(format!(
                    "--beta-case must be 1 or 2, got {beta_case}"
                )));
            }
            SimulateResolved {
                command: "simulate",
                design,
                x_type: Some(x_type),
                beta_case: Some(beta_case),
                n,
                p: Some(config::require(p.p, "p")?),
                dims: None,
                snr,
                noise_mode: noise_mode_name,
                seed,
                threads,
                out,
            }
        }
        _ => {
            config::forbid(&p.p, "p", "to 3d designs (use --dims)")?;
            config::forbid(&p.x_type, "x-type", "to 3d designs")?;
            config::forbid(&p.beta_case, "beta-case", "to 3d designs")?;
            SimulateResolved {
                command: "simulate",
                design,
                x_type: None,
                beta_case: None,
                n,
                p: None,
                dims: Some(config::require(p.dims, "dims")?),
                snr,
                noise_mode: noise_mode_name,
                seed,
                threads,
                out,
            }
        }
    };

    config::init_threads(resolved.threads)?;
    let out_dir = prepare_out(&resolved.out)?;
    formats::write_json(&out_dir.join("resolved_config.json"), &resolved)?;

    match resolved.design.as_str() {
        "1d" => {
            let (dataset, truth) = gen_1d(&SimDesign1D {
                x_type: match resolved.x_type.as_deref() {
                    Some("fourier") => PredictorFamily::Fourier,
                    _ => PredictorFamily::BSpline,
                },
                beta_case: match resolved.beta_case {
                    Some(1) => BetaCase::Smooth,
                    _ => BetaCase::PiecewiseConstant,
                },
                n: resolved.n,
                p: resolved.p.expect("resolved 1d config has p"),
                snr: resolved.snr,
                seed: resolved.seed,
                noise_mode,
            })?;
            write_outputs(&out_dir, dataset.predictors(), dataset.responses(), &truth)
        }
        _ => {
            let (dataset, truth) = gen_3d(&SimDesign3D {
                n: resolved.n,
                dim: resolved.dims.expect("resolved 3d config has dims"),
                snr: resolved.snr,
                seed: resolved.seed,
                noise_mode,
            })?;
            write_outputs(&out_dir, dataset.predictors(), dataset.responses(), &truth)
        }
    }
}

fn write_outputs<G: Grid>(
    out_dir: &std::path::Path,
    predictors: &[G],
    responses: &[f64],
    truth: &hwfr::simgen::GroundTruth<G>,
) -> Result<()> {
    let noisy_dir = out_dir.join("predictors");
    let clean_dir = out_dir.join("predictors_noiseless");
    formats::ensure_dir(&noisy_dir)?;
    formats::ensure_dir(&clean_dir)?;
    for (i, x) in predictors.iter().enumerate() {
        formats::write_grid(&formats::predictor_path(&noisy_dir, i), x)?;
    }
    for (i, x) in truth.x_star.iter().enumerate() {
        formats::write_grid(&formats::predictor_path(&clean_dir, i), x)?;
    }
    formats::write_responses(&out_dir.join("responses.csv"), responses)?;
    formats::write_grid(&out_dir.join("beta_true.hwv"), truth.beta_field.grid())?;
    formats::write_json(
        &out_dir.join("truth.json"),
        &TruthFile {
            sigma2: truth.sigma2,
            sigma_e2: truth.sigma_e2,
            sigma_g2: truth.sigma_g2(),
            g: &truth.g_values,
        },
    )
}
