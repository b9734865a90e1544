//! Deterministic generators for the simulation designs used throughout the
//! test suite: smooth and localized coefficient functions, Fourier- and
//! B-spline-type predictor processes, and SNR-controlled noise.
//!
//! Curves are sampled at cell midpoints `t_j = (j + 1/2)/p` (volumes at the
//! tensor-product midpoints), so the rectangle rule used for the model
//! integral is exact for the Haar basis and the true responses are defined
//! *as* their rectangle-rule values on the noiseless fine grid.
//!
//! # Noise conventions
//!
//! Measurement noise for predictors is i.i.d. `N(0, σ_Ε²)` added at every
//! grid value. `σ_Ε²` is derived from the noiseless curves; the exact
//! convention is selectable via [`NoiseVarianceMode`] (see its docs — the
//! default pools squared deviations from the across-sample mean curve).
//!
//! Response noise is `N(0, σ²)` with `σ² = var(g)/snr`, where `g_i` is the
//! noiseless integral `(1/p)Σ_j X*_i(t_j)β(t_j)` and `var` is the unbiased
//! sample variance. `g` is always computed from the noiseless predictors,
//! so the signal-to-noise ratio refers to regression noise only.
//!
//! # Reproducibility
//!
//! Given a seed, generation is fully deterministic. RNG streams are fixed:
//! stream 0 draws predictor-process coefficients (curve by curve), stream 1
//! draws measurement noise (curve by curve, point by point), and stream 2
//! draws response noise (observation by observation).

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::funreg::CoefficientField;
use crate::grid::{cell_midpoints, Grid, GridDims, SignalGrid, VolumeGrid};
use crate::util::{dot, rng_for, sample_var};

/// The predictor process family for 1D designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorFamily {
    /// `X*(t) = a₀ + a₁sin(2πt) + a₂cos(2πt) + a₃sin(4πt) + a₄cos(4πt)`.
    Fourier,
    /// A linear combination of the 10 cubic B-splines with interior knots
    /// at `1/7, …, 6/7`.
    BSpline,
}

/// Which true coefficient function a 1D design uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaCase {
    /// Case 1: a smooth bump, `0.5(sin(20t − π) + 1)` on `[π/8, 9π/40)`.
    Smooth,
    /// Case 2: piecewise constant, `1` on `[0.2, 0.3)` and `0.5` on `[0.5, 0.7)`.
    PiecewiseConstant,
}

/// How `σ_Ε²` is derived from the noiseless curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseVarianceMode {
    /// Pool squared deviations from the across-sample mean curve:
    /// `σ_Ε² = (1/(p−1)) Σ_j avg_i (X*_i(t_j) − X̄*(t_j))²`. This treats
    /// `X̄*(t_j)` as the mean over samples at each grid point.
    #[default]
    AcrossSampleMean,
    /// Average the per-curve variance over its own grid points:
    /// `σ_Ε² = avg_i (1/(p−1)) Σ_j (X*_i(t_j) − mean_j X*_i)²`. This treats
    /// `X̄*` as each curve's own mean level.
    PerCurve,
}

/// Parameters of a 1D simulation run.
#[derive(Debug, Clone, Copy)]
pub struct SimDesign1D {
    pub x_type: PredictorFamily,
    pub beta_case: BetaCase,
    pub n: usize,
    pub p: usize,
    pub snr: f64,
    pub seed: u64,
    pub noise_mode: NoiseVarianceMode,
}

/// Parameters of a 3D simulation run on a cubic `dim³` grid.
#[derive(Debug, Clone, Copy)]
pub struct SimDesign3D {
    pub n: usize,
    pub dim: usize,
    pub snr: f64,
    pub seed: u64,
    pub noise_mode: NoiseVarianceMode,
}

/// Everything needed to score an estimator against the generating truth.
#[derive(Debug, Clone)]
pub struct GroundTruth<G: Grid> {
    /// The true coefficient function sampled on the grid.
    pub beta_field: CoefficientField<G>,
    /// The noiseless predictors (the observed ones carry measurement noise).
    pub x_star: Vec<G>,
    /// Noiseless linear functional values `g_i = (1/p) Σ X*_i β`.
    pub g_values: Vec<f64>,
    /// Response noise variance `var(g)/snr`.
    pub sigma2: f64,
    /// Predictor measurement-noise variance.
    pub sigma_e2: f64,
}

impl<G: Grid> GroundTruth<G> {
    /// Unbiased sample variance of the `g` values.
    pub fn sigma_g2(&self) -> f64 {
        sample_var(&self.g_values)
    }
}

/// The smooth case-1 coefficient function.
pub fn beta_case1(t: f64) -> f64 {
    if (PI / 8.0..9.0 * PI / 40.0).contains(&t) {
        0.5 * ((20.0 * t - PI).sin() + 1.0)
    } else {
        0.0
    }
}

/// The piecewise-constant case-2 coefficient function.
pub fn beta_case2(t: f64) -> f64 {
    if (0.2..0.3).contains(&t) {
        1.0
    } else if (0.5..0.7).contains(&t) {
        0.5
    } else {
        0.0
    }
}

/// The 3D coefficient function: a separable sinusoid product supported on
/// the ball of radius `3π/40` centered at `(7π/40, 7π/40, 7π/40)`; exactly
/// 1 at the center.
pub fn beta_ball(u: f64, v: f64, w: f64) -> f64 {
    const CENTER: f64 = 7.0 * PI / 40.0;
    const RADIUS: f64 = 3.0 * PI / 40.0;
    let d2 = (u - CENTER).powi(2) + (v - CENTER).powi(2) + (w - CENTER).powi(2);
    if d2 <= RADIUS * RADIUS {
        let (a, b, c) = (1.0 / 8.0, 40.0 / 3.0, PI / 6.0);
        a * ((b * u + c).sin() + 1.0) * ((b * v + c).sin() + 1.0) * ((b * w + c).sin() + 1.0)
    } else {
        0.0
    }
}

/// All cubic B-spline basis values at `t` for the given interior knots
/// (clamped ends at 0 and 1), by the Cox–de Boor recursion. Returns
/// `interior_knots.len() + degree + 1` values forming a partition of unity
/// on `[0, 1]`.
pub fn bspline_basis(t: f64, interior_knots: &[f64], degree: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "B-spline evaluation point {t} outside [0, 1]"
        )));
    }
    if interior_knots
        .windows(2)
        .any(|w| w[0] > w[1])
        || interior_knots.iter().any(|k| !(0.0..=1.0).contains(k))
    {
        return Err(Error::InvalidArgument(
            "interior knots must be sorted within [0, 1]".into(),
        ));
    }
    let n_basis = interior_knots.len() + degree + 1;
    let mut knots = Vec::with_capacity(n_basis + degree + 1);
    knots.extend(std::iter::repeat(0.0).take(degree + 1));
    knots.extend_from_slice(interior_knots);
    knots.extend(std::iter::repeat(1.0).take(degree + 1));

    // Degree-0 indicators; t = 1 is closed into the last nonempty span.
    let spans = knots.len() - 1;
    let mut values = vec![0.0; spans];
    if t < 1.0 {
        for i in 0..spans {
            if knots[i] <= t && t < knots[i + 1] {
                values[i] = 1.0;
            }
        }
    } else {
        let last = (0..spans)
            .rev()
            .find(|&i| knots[i] < knots[i + 1])
            .expect("knot vector has a nonempty span");
        values[last] = 1.0;
    }
    // Cox–de Boor elevation, with 0/0 treated as 0.
    for d in 1..=degree {
        for i in 0..spans - d {
            let left_den = knots[i + d] - knots[i];
            let right_den = knots[i + d + 1] - knots[i + 1];
            let left = if left_den > 0.0 {
                (t - knots[i]) / left_den * values[i]
            } else {
                0.0
            };
            let right = if right_den > 0.0 {
                (knots[i + d + 1] - t) / right_den * values[i + 1]
            } else {
                0.0
            };
            values[i] = left + right;
        }
    }
    values.truncate(n_basis);
    Ok(values)
}

/// The model's linear functional by the rectangle rule:
/// `(1/|grid|) Σ_j x(t_j) β(t_j)`. Exactly the reduction used when
/// generating responses, so stored `g` values can be re-derived bit for bit.
pub fn linear_functional<G: Grid>(x: &G, beta: &G) -> Result<f64> {
    if x.dims() != beta.dims() {
        return Err(Error::DimensionMismatch(
            "predictor and coefficient grids differ".into(),
        ));
    }
    let measure = 1.0 / beta.dims().cell_count() as f64;
    Ok(measure * dot(x.values(), beta.values()))
}

/// Output of [`apply_noise`]: observed data plus the exact truth.
#[derive(Debug, Clone)]
pub struct NoisyData<G: Grid> {
    pub predictors: Vec<G>,
    pub responses: Vec<f64>,
    pub g_values: Vec<f64>,
    pub sigma2: f64,
    pub sigma_e2: f64,
}

/// Adds measurement noise to noiseless predictors and draws responses
/// `Y_i = g_i + ε_i` with `ε ~ N(0, var(g)/snr)`.
///
/// `g` is computed from the *noiseless* curves by the rectangle rule.
/// `snr` may be `f64::INFINITY` for noiseless responses. Errors when
/// `var(g) = 0` with a finite `snr` (the ratio would be undefined).
pub fn apply_noise<G: Grid>(
    x_star: &[G],
    beta: &G,
    snr: f64,
    mode: NoiseVarianceMode,
    seed: u64,
) -> Result<NoisyData<G>> {
    if snr <= 0.0 || snr.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "signal-to-noise ratio must be positive, got {snr}"
        )));
    }
    if x_star.is_empty() {
        return Err(Error::InvalidArgument("no curves to add noise to".into()));
    }
    let dims = beta.dims();
    if let Some(bad) = x_star.iter().position(|x| x.dims() != dims) {
        return Err(Error::DimensionMismatch(format!(
            "curve {bad} dims do not match the coefficient grid"
        )));
    }
    let g_values: Vec<f64> = x_star
        .iter()
        .map(|x| linear_functional(x, beta))
        .collect::<Result<_>>()?;
    let sigma_g2 = sample_var(&g_values);
    let sigma2 = if snr.is_infinite() {
        0.0
    } else {
        if sigma_g2 == 0.0 {
            return Err(Error::Degenerate(
                "var(g) = 0: signal-to-noise ratio is undefined".into(),
            ));
        }
        sigma_g2 / snr
    };
    let sigma_e2 = noise_variance(x_star, mode);
    let sigma_e = sigma_e2.sqrt();
    let mut curve_rng = rng_for(seed, 1);
    let predictors: Vec<G> = x_star
        .iter()
        .map(|x| {
            let noisy: Vec<f64> = x
                .values()
                .iter()
                .map(|v| v + sigma_e * curve_rng.sample::<f64, _>(StandardNormal))
                .collect();
            G::from_values(dims, noisy)
        })
        .collect::<Result<_>>()?;
    let sigma = sigma2.sqrt();
    let mut resp_rng = rng_for(seed, 2);
    let responses: Vec<f64> = g_values
        .iter()
        .map(|g| g + sigma * resp_rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(NoisyData {
        predictors,
        responses,
        g_values,
        sigma2,
        sigma_e2,
    })
}

/// `σ_Ε²` under the chosen convention.
fn noise_variance<G: Grid>(x_star: &[G], mode: NoiseVarianceMode) -> f64 {
    let n = x_star.len();
    let p = x_star[0].dims().cell_count();
    if p < 2 {
        return 0.0;
    }
    match mode {
        NoiseVarianceMode::AcrossSampleMean => {
            let mut mean_curve = vec![0.0; p];
            for x in x_star {
                for (m, v) in mean_curve.iter_mut().zip(x.values()) {
                    *m += v;
                }
            }
            for m in mean_curve.iter_mut() {
                *m /= n as f64;
            }
            let mut pooled = 0.0;
            for (j, m) in mean_curve.iter().enumerate() {
                let avg_sq: f64 = x_star
                    .iter()
                    .map(|x| (x.values()[j] - m).powi(2))
                    .sum::<f64>()
                    / n as f64;
                pooled += avg_sq;
            }
            pooled / (p - 1) as f64
        }
        NoiseVarianceMode::PerCurve => {
            x_star
                .iter()
                .map(|x| sample_var(x.values()))
                .sum::<f64>()
                / n as f64
        }
    }
}

/// Generates a 1D dataset and its ground truth.
pub fn gen_1d(design: &SimDesign1D) -> Result<(crate::funreg::FunctionalDataset<SignalGrid>, GroundTruth<SignalGrid>)> {
    GridDims::OneD(design.p).validate_dyadic()?;
    if design.n < 2 {
        return Err(Error::InvalidArgument("need at least 2 curves".into()));
    }
    let p = design.p;
    let t: Vec<f64> = cell_midpoints(p).collect();
    let interior: Vec<f64> = (1..=6).map(|k| k as f64 / 7.0).collect();
    // Per-point basis values, precomputed once.
    let basis_rows: Vec<Vec<f64>> = match design.x_type {
        PredictorFamily::Fourier => t
            .iter()
            .map(|&t| {
                vec![
                    1.0,
                    (2.0 * PI * t).sin(),
                    (2.0 * PI * t).cos(),
                    (4.0 * PI * t).sin(),
                    (4.0 * PI * t).cos(),
                ]
            })
            .collect(),
        PredictorFamily::BSpline => t
            .iter()
            .map(|&t| bspline_basis(t, &interior, 3))
            .collect::<Result<_>>()?,
    };
    let n_coef = basis_rows[0].len();
    let mut coef_rng = rng_for(design.seed, 0);
    let x_star: Vec<SignalGrid> = (0..design.n)
        .map(|_| {
            let coefs: Vec<f64> = (0..n_coef)
                .map(|_| coef_rng.sample::<f64, _>(StandardNormal))
                .collect();
            let values: Vec<f64> = basis_rows.iter().map(|row| dot(row, &coefs)).collect();
            SignalGrid::new(values)
        })
        .collect::<Result<_>>()?;
    let beta_fn: fn(f64) -> f64 = match design.beta_case {
        BetaCase::Smooth => beta_case1,
        BetaCase::PiecewiseConstant => beta_case2,
    };
    let beta = SignalGrid::new(t.iter().map(|&t| beta_fn(t)).collect())?;
    let noisy = apply_noise(&x_star, &beta, design.snr, design.noise_mode, design.seed)?;
    package(noisy, beta, x_star)
}

/// Generates a 3D dataset and its ground truth on a `dim³` grid.
pub fn gen_3d(design: &SimDesign3D) -> Result<(crate::funreg::FunctionalDataset<VolumeGrid>, GroundTruth<VolumeGrid>)> {
    let d = design.dim;
    GridDims::ThreeD(d, d, d).validate_dyadic()?;
    if design.n < 2 {
        return Err(Error::InvalidArgument("need at least 2 volumes".into()));
    }
    let t: Vec<f64> = cell_midpoints(d).collect();
    let sin_t: Vec<f64> = t.iter().map(|&t| (2.0 * PI * t).sin()).collect();
    let cos_t: Vec<f64> = t.iter().map(|&t| (2.0 * PI * t).cos()).collect();
    let mut coef_rng = rng_for(design.seed, 0);
    let x_star: Vec<VolumeGrid> = (0..design.n)
        .map(|_| {
            let a: Vec<f64> = (0..7)
                .map(|_| coef_rng.sample::<f64, _>(StandardNormal))
                .collect();
            let mut values = Vec::with_capacity(d * d * d);
            for w in 0..d {
                let w_term = a[5] * sin_t[w] + a[6] * cos_t[w];
                for v in 0..d {
                    let vw_term = a[3] * sin_t[v] + a[4] * cos_t[v] + w_term;
                    for u in 0..d {
                        values.push(a[0] + a[1] * sin_t[u] + a[2] * cos_t[u] + vw_term);
                    }
                }
            }
            VolumeGrid::new((d, d, d), values)
        })
        .collect::<Result<_>>()?;
    let mut beta_values = Vec::with_capacity(d * d * d);
    for w in 0..d {
        for v in 0..d {
            for u in 0..d {
                beta_values.push(beta_ball(t[u], t[v], t[w]));
            }
        }
    }
    let beta = VolumeGrid::new((d, d, d), beta_values)?;
    let noisy = apply_noise(&x_star, &beta, design.snr, design.noise_mode, design.seed)?;
    package(noisy, beta, x_star)
}

fn package<G: Grid>(
    noisy: NoisyData<G>,
    beta: G,
    x_star: Vec<G>,
) -> Result<(crate::funreg::FunctionalDataset<G>, GroundTruth<G>)> {
    let dataset = crate::funreg::FunctionalDataset::new(noisy.predictors, noisy.responses)?;
    let truth = GroundTruth {
        beta_field: CoefficientField::from_grid(beta),
        x_star,
        g_values: noisy.g_values,
        sigma2: noisy.sigma2,
        sigma_e2: noisy.sigma_e2,
    };
    Ok((dataset, truth))
}
