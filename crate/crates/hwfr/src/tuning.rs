//! Joint selection of the decomposition level `L` and the penalty `λ`.
//!
//! Four selectors are provided: separate-validation ([`select_sv`]), k-fold
//! cross-validation ([`select_cv`]), and the information criteria
//! [`select_aic`]/[`select_bic`] whose noise variance comes from the
//! refitted cross-validation estimator ([`refitted_cv_sigma2`]).
//!
//! All selectors return a [`TuningResult`] whose score table covers the full
//! `(L, λ)` grid; the best pair attains the minimum of that table under the
//! documented tie-break (smaller df, then larger `λ`, then smaller `L` —
//! sparser and smoother models win ties).
//!
//! Randomized pieces (fold assignment, half-sample splits) derive all
//! randomness from an explicit seed, and parallel evaluation accumulates
//! results in a fixed order, so every selector is bit-reproducible and
//! independent of the worker-thread count.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::funreg::{
    build_design, fit_from_parts, fit_functional, predict, DesignMatrix, FunctionalDataset,
    FunctionalFit,
};
use crate::grid::Grid;
use crate::lasso::{
    default_lambda_grid, default_min_ratio, fit_path, DEFAULT_MAX_SWEEPS, DEFAULT_PATH_LEN,
    DEFAULT_TOL,
};
use crate::util::{dot, mean, rng_for, sum_sq};

/// RNG stream used for fold shuffling (streams 0–2 belong to data
/// generation; keeping the namespaces apart makes reusing one seed safe).
const FOLD_STREAM: u64 = 3;
/// RNG stream used for the refitted-CV half-sample split.
const HALF_STREAM: u64 = 4;

/// The `(L, λ)` search space. `lambdas`, when present, holds one strictly
/// decreasing penalty grid per level; otherwise each level gets the default
/// data-driven path (log-spaced down from `λ_max`).
#[derive(Debug, Clone)]
pub struct TuningGrid {
    pub levels: Vec<usize>,
    pub lambdas: Option<Vec<Vec<f64>>>,
}

impl TuningGrid {
    /// A grid over the given levels with default penalty paths.
    pub fn new(levels: Vec<usize>) -> Result<TuningGrid> {
        let grid = TuningGrid {
            levels,
            lambdas: None,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// A grid with an explicit penalty list per level.
    pub fn with_lambdas(levels: Vec<usize>, lambdas: Vec<Vec<f64>>) -> Result<TuningGrid> {
        let grid = TuningGrid {
            levels,
            lambdas: Some(lambdas),
        };
        grid.validate()?;
        Ok(grid)
    }

    /// All admissible levels for the given grid dimensions, shallowest first.
    pub fn all_levels(dims: crate::grid::GridDims) -> Result<TuningGrid> {
        TuningGrid::new((1..=dims.max_level()).collect())
    }

    fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::InvalidArgument("empty level grid".into()));
        }
        for (i, l) in self.levels.iter().enumerate() {
            if self.levels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!("duplicate level {l}")));
            }
        }
        if let Some(lambdas) = &self.lambdas {
            if lambdas.len() != self.levels.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} penalty grids for {} levels",
                    lambdas.len(),
                    self.levels.len()
                )));
            }
            if lambdas.iter().any(|g| g.is_empty()) {
                return Err(Error::InvalidArgument("empty penalty grid".into()));
            }
        }
        Ok(())
    }
}

/// Which score a [`TuningResult`] minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Mean squared prediction error on a held-out validation set.
    SeparateValidation,
    /// Mean over folds of the held-out mean squared error.
    CrossValidation,
    Aic,
    Bic,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::SeparateValidation => "separate-validation",
            Criterion::CrossValidation => "cross-validation",
            Criterion::Aic => "aic",
            Criterion::Bic => "bic",
        })
    }
}

/// A data-driven selection recipe (the selectors that need only one
/// dataset; separate validation requires its own held-out data and is a
/// benchmark-only method).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    CrossValidation { k: usize },
    Aic,
    Bic,
}

impl SelectionRule {
    pub fn criterion(&self) -> Criterion {
        match self {
            SelectionRule::CrossValidation { .. } => Criterion::CrossValidation,
            SelectionRule::Aic => Criterion::Aic,
            SelectionRule::Bic => Criterion::Bic,
        }
    }
}

/// One `(L, λ)` grid point with its criterion value. `df` is the number of
/// nonzero coefficients of the evaluated fit — for cross-validation, the
/// mean over fold fits, hence a real number.
#[derive(Debug, Clone, Copy)]
pub struct ScoreEntry {
    pub level: usize,
    pub lambda: f64,
    pub score: f64,
    pub df: f64,
}

/// Outcome of a selection run: the winning pair plus the full score table
/// it was the minimum of (under the tie-break in [`self`](crate::tuning)).
#[derive(Debug, Clone)]
pub struct TuningResult {
    pub best_level: usize,
    pub best_lambda: f64,
    pub criterion: Criterion,
    pub score_table: Vec<ScoreEntry>,
    /// Seed that drove fold assignment / splits, recorded for reproducibility
    /// (`None` for separate validation, which draws nothing).
    pub seed: Option<u64>,
}

impl TuningResult {
    /// The table row the best pair came from.
    pub fn best_entry(&self) -> &ScoreEntry {
        self.score_table
            .iter()
            .find(|e| e.level == self.best_level && e.lambda == self.best_lambda)
            .expect("best pair is drawn from the table")
    }

    /// Fits the selected model on `dataset`.
    pub fn fit_selected<G: Grid>(&self, dataset: &FunctionalDataset<G>) -> Result<FunctionalFit<G>> {
        fit_functional(dataset, self.best_level, self.best_lambda)
    }
}

/// `true` when `a` beats `b`: smaller score, then smaller df, then larger
/// `λ`, then smaller level. Comparisons are exact so the winner is
/// insensitive to evaluation order.
fn better(a: &ScoreEntry, b: &ScoreEntry) -> bool {
    if a.score != b.score {
        return a.score < b.score;
    }
    if a.df != b.df {
        return a.df < b.df;
    }
    if a.lambda != b.lambda {
        return a.lambda > b.lambda;
    }
    a.level < b.level
}

fn pick_best(table: &[ScoreEntry]) -> Result<ScoreEntry> {
    if table.is_empty() {
        return Err(Error::InvalidArgument("empty score table".into()));
    }
    if let Some(bad) = table.iter().position(|e| !e.score.is_finite()) {
        return Err(Error::NonFinite {
            context: "selection score",
            index: bad,
        });
    }
    let mut best = &table[0];
    for entry in &table[1..] {
        if better(entry, best) {
            best = entry;
        }
    }
    Ok(*best)
}

fn finish(
    criterion: Criterion,
    score_table: Vec<ScoreEntry>,
    seed: Option<u64>,
) -> Result<TuningResult> {
    let best = pick_best(&score_table)?;
    Ok(TuningResult {
        best_level: best.level,
        best_lambda: best.lambda,
        criterion,
        score_table,
        seed,
    })
}

/// Splits `0..n` into `k` disjoint folds: a seeded shuffle followed by
/// contiguous blocks, the first `n mod k` folds one element larger. Fold
/// contents keep their shuffled order; every index appears exactly once.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} folds exceed {n} observations"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng_for(seed, FOLD_STREAM));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(indices[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// Builds one design per grid level (shared by the selectors and by
/// resampling procedures that must reuse identical designs).
pub(crate) fn prepare_designs<G: Grid>(
    dataset: &FunctionalDataset<G>,
    levels: &[usize],
) -> Result<Vec<DesignMatrix>> {
    levels.iter().map(|&l| build_design(dataset, l)).collect()
}

/// Solves the penalized problem at one prepared grid point.
pub(crate) fn fit_prepared<G: Grid>(
    designs: &[DesignMatrix],
    responses: &[f64],
    level: usize,
    lambda: f64,
) -> Result<FunctionalFit<G>> {
    let design = designs
        .iter()
        .find(|d| d.basis().level() == level)
        .ok_or_else(|| Error::InvalidArgument(format!("no prepared design for level {level}")))?;
    crate::funreg::fit_design(design, responses, lambda, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)
}

/// Resolves the per-level penalty grids: explicit ones when given, the
/// default data-driven path otherwise. `min_train_rows` is the smallest
/// subset the grids will be fitted on (the floor of a default path depends
/// on whether that subset keeps the problem overdetermined).
fn resolve_lambdas(
    designs: &[DesignMatrix],
    responses: &[f64],
    lambdas: Option<&[Vec<f64>]>,
    min_train_rows: usize,
) -> Vec<Vec<f64>> {
    match lambdas {
        Some(grids) => grids.to_vec(),
        None => designs
            .iter()
            .map(|d| {
                default_lambda_grid(
                    d.matrix(),
                    responses,
                    true,
                    DEFAULT_PATH_LEN,
                    default_min_ratio(min_train_rows, d.matrix().ncols(), true),
                )
            })
            .collect(),
    }
}

/// Picks `(L, λ)` by mean squared prediction error on a separate validation
/// set. This is a benchmark-only selector: it spends a second dataset that
/// practical analyses rarely have.
pub fn select_sv<G: Grid>(
    train: &FunctionalDataset<G>,
    validation: &FunctionalDataset<G>,
    grid: &TuningGrid,
) -> Result<TuningResult> {
    grid.validate()?;
    if train.dims() != validation.dims() {
        return Err(Error::DimensionMismatch(
            "training and validation grids differ".into(),
        ));
    }
    let designs = prepare_designs(train, &grid.levels)?;
    let lambda_grids = resolve_lambdas(
        &designs,
        train.responses(),
        grid.lambdas.as_deref(),
        train.len(),
    );
    let measure = 1.0 / validation.dims().cell_count() as f64;
    let mut table = Vec::new();
    for (design, lambdas) in designs.iter().zip(&lambda_grids) {
        let path = fit_path(
            design.matrix(),
            train.responses(),
            Some(lambdas),
            true,
            DEFAULT_TOL,
            DEFAULT_MAX_SWEEPS,
        )?;
        for (fit, &lambda) in path.fits.into_iter().zip(&path.lambdas) {
            let df = fit.df() as f64;
            let full: FunctionalFit<G> = fit_from_parts(design, fit)?;
            let beta = full.beta().values();
            let mut sse = 0.0;
            for (x, y) in validation.predictors().iter().zip(validation.responses()) {
                let pred = full.intercept() + measure * dot(x.values(), beta);
                sse += (pred - y) * (pred - y);
            }
            table.push(ScoreEntry {
                level: design.basis().level(),
                lambda,
                score: sse / validation.len() as f64,
                df,
            });
        }
    }
    finish(Criterion::SeparateValidation, table, None)
}

/// Picks `(L, λ)` by `k`-fold cross-validation: seeded-shuffle folds, one
/// warm-started path per (level, fold), score = mean over folds of the
/// held-out mean squared error.
pub fn select_cv<G: Grid>(
    dataset: &FunctionalDataset<G>,
    k: usize,
    grid: &TuningGrid,
    seed: u64,
) -> Result<TuningResult> {
    grid.validate()?;
    let designs = prepare_designs(dataset, &grid.levels)?;
    select_cv_prepared(&designs, dataset.responses(), grid.lambdas.as_deref(), k, seed)
}

/// Cross-validation against already-built full-data designs. Fold models
/// use row subsets of those designs, so the coefficient layout is identical
/// across folds; default penalty grids are derived from the responses given
/// here (they are part of the selection pipeline and must track permuted or
/// resampled responses).
pub(crate) fn select_cv_prepared(
    designs: &[DesignMatrix],
    responses: &[f64],
    lambdas: Option<&[Vec<f64>]>,
    k: usize,
    seed: u64,
) -> Result<TuningResult> {
    let n = responses.len();
    if designs.is_empty() {
        return Err(Error::InvalidArgument("no designs to tune over".into()));
    }
    if let Some(bad) = designs.iter().position(|d| d.n_rows() != n) {
        return Err(Error::DimensionMismatch(format!(
            "design {bad} has {} rows for {n} responses",
            designs[bad].n_rows()
        )));
    }
    let folds = make_folds(n, k, seed)?;
    // The smallest training subset a fold path sees: n minus the largest fold.
    let min_train_rows = n - folds.iter().map(Vec::len).max().unwrap_or(0);
    let lambda_grids = resolve_lambdas(designs, responses, lambdas, min_train_rows);

    // (level, fold) jobs are independent; results are collected in job order
    // so the combined table never depends on scheduling.
    let jobs: Vec<(usize, usize)> = (0..designs.len())
        .flat_map(|li| (0..folds.len()).map(move |fi| (li, fi)))
        .collect();
    let outcomes: Vec<Result<(Vec<f64>, Vec<f64>)>> = jobs
        .par_iter()
        .map(|&(li, fi)| {
            let test = &folds[fi];
            let mut in_test = vec![false; n];
            for &i in test {
                in_test[i] = true;
            }
            let train: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
            let train_design = designs[li].row_subset(&train)?;
            let y_train: Vec<f64> = train.iter().map(|&i| responses[i]).collect();
            let path = fit_path(
                train_design.matrix(),
                &y_train,
                Some(&lambda_grids[li]),
                true,
                DEFAULT_TOL,
                DEFAULT_MAX_SWEEPS,
            )?;
            let test_design = designs[li].row_subset(test)?;
            let y_test: Vec<f64> = test.iter().map(|&i| responses[i]).collect();
            let mut fold_mse = Vec::with_capacity(path.fits.len());
            let mut fold_df = Vec::with_capacity(path.fits.len());
            for fit in &path.fits {
                let preds = fit.predict(test_design.matrix());
                let sse: f64 = preds
                    .iter()
                    .zip(&y_test)
                    .map(|(p, y)| (p - y) * (p - y))
                    .sum();
                fold_mse.push(sse / test.len() as f64);
                fold_df.push(fit.df() as f64);
            }
            Ok((fold_mse, fold_df))
        })
        .collect();
    // Surface the first failure in job order, independent of scheduling.
    let mut per_job = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        per_job.push(outcome?);
    }

    let mut table = Vec::new();
    for (li, design) in designs.iter().enumerate() {
        let n_lambda = lambda_grids[li].len();
        let mut score_sum = vec![0.0; n_lambda];
        let mut df_sum = vec![0.0; n_lambda];
        for fi in 0..folds.len() {
            let (fold_mse, fold_df) = &per_job[li * folds.len() + fi];
            for g in 0..n_lambda {
                score_sum[g] += fold_mse[g];
                df_sum[g] += fold_df[g];
            }
        }
        for (g, &lambda) in lambda_grids[li].iter().enumerate() {
            table.push(ScoreEntry {
                level: design.basis().level(),
                lambda,
                score: score_sum[g] / folds.len() as f64,
                df: df_sum[g] / folds.len() as f64,
            });
        }
    }
    finish(Criterion::CrossValidation, table, Some(seed))
}

/// `‖Y − ĝ(X)‖² / (n σ̂²) + (2/n)·df`, where df counts the nonzero
/// penalized coefficients (the intercept is excluded).
pub fn score_aic<G: Grid>(
    fit: &FunctionalFit<G>,
    dataset: &FunctionalDataset<G>,
    sigma2_hat: f64,
) -> Result<f64> {
    ic_score(fit, dataset, sigma2_hat, 2.0)
}

/// Same as [`score_aic`] with the `df` weight `2` replaced by `ln n`.
pub fn score_bic<G: Grid>(
    fit: &FunctionalFit<G>,
    dataset: &FunctionalDataset<G>,
    sigma2_hat: f64,
) -> Result<f64> {
    ic_score(fit, dataset, sigma2_hat, (dataset.len() as f64).ln())
}

fn ic_score<G: Grid>(
    fit: &FunctionalFit<G>,
    dataset: &FunctionalDataset<G>,
    sigma2_hat: f64,
    df_weight: f64,
) -> Result<f64> {
    if sigma2_hat <= 0.0 || !sigma2_hat.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise variance estimate must be positive and finite, got {sigma2_hat}"
        )));
    }
    let preds = predict(fit, dataset.predictors())?;
    let n = dataset.len() as f64;
    let rss: f64 = preds
        .iter()
        .zip(dataset.responses())
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    Ok(rss / (n * sigma2_hat) + df_weight / n * fit.lasso_fit.df() as f64)
}

/// Picks `(L, λ)` by AIC, estimating `σ²` once per level via
/// [`refitted_cv_sigma2`] (the design changes with the level, so the noise
/// floor is estimated under the matching design).
pub fn select_aic<G: Grid>(
    dataset: &FunctionalDataset<G>,
    grid: &TuningGrid,
    seed: u64,
) -> Result<TuningResult> {
    select_ic(dataset, grid, seed, Criterion::Aic)
}

/// Picks `(L, λ)` by BIC; see [`select_aic`].
pub fn select_bic<G: Grid>(
    dataset: &FunctionalDataset<G>,
    grid: &TuningGrid,
    seed: u64,
) -> Result<TuningResult> {
    select_ic(dataset, grid, seed, Criterion::Bic)
}

fn select_ic<G: Grid>(
    dataset: &FunctionalDataset<G>,
    grid: &TuningGrid,
    seed: u64,
    criterion: Criterion,
) -> Result<TuningResult> {
    grid.validate()?;
    let designs = prepare_designs(dataset, &grid.levels)?;
    let lambda_grids = resolve_lambdas(
        &designs,
        dataset.responses(),
        grid.lambdas.as_deref(),
        dataset.len(),
    );
    let mut table = Vec::new();
    for (design, lambdas) in designs.iter().zip(&lambda_grids) {
        let level = design.basis().level();
        let sigma2 = refitted_cv_sigma2(dataset, level, seed)?;
        let path = fit_path(
            design.matrix(),
            dataset.responses(),
            Some(lambdas),
            true,
            DEFAULT_TOL,
            DEFAULT_MAX_SWEEPS,
        )?;
        for (fit, &lambda) in path.fits.into_iter().zip(&path.lambdas) {
            let full: FunctionalFit<G> = fit_from_parts(design, fit)?;
            let score = match criterion {
                Criterion::Aic => score_aic(&full, dataset, sigma2.value)?,
                Criterion::Bic => score_bic(&full, dataset, sigma2.value)?,
                _ => unreachable!("select_ic only handles information criteria"),
            };
            table.push(ScoreEntry {
                level,
                lambda,
                score,
                df: full.lasso_fit.df() as f64,
            });
        }
    }
    finish(criterion, table, Some(seed))
}

/// Dispatches to the selector named by `rule`.
pub fn select_with<G: Grid>(
    dataset: &FunctionalDataset<G>,
    rule: SelectionRule,
    grid: &TuningGrid,
    seed: u64,
) -> Result<TuningResult> {
    match rule {
        SelectionRule::CrossValidation { k } => select_cv(dataset, k, grid, seed),
        SelectionRule::Aic => select_aic(dataset, grid, seed),
        SelectionRule::Bic => select_bic(dataset, grid, seed),
    }
}

/// A refitted-cross-validation noise variance estimate. `truncated` flags
/// that at least one half's selected support exceeded what the other half
/// could refit and was cut back to the largest-magnitude coefficients.
#[derive(Debug, Clone, Copy)]
pub struct Sigma2Estimate {
    pub value: f64,
    pub truncated: bool,
}

/// Estimates `σ²` by refitted cross-validation: split the sample into
/// halves, select a support on one half (5-fold-CV-tuned penalized fit at
/// the given level), refit that support by unpenalized least squares on the
/// other half, and take `RSS / (n_half − |support|)`; average over both
/// directions of one symmetric split.
///
/// The refit stays overdetermined by construction: a support larger than
/// `n_half − 1` is truncated to the largest-`|η̂|` coefficients and flagged.
/// Very small halves can make the inner cross-validation infeasible; the
/// resulting error propagates.
pub fn refitted_cv_sigma2<G: Grid>(
    dataset: &FunctionalDataset<G>,
    level: usize,
    seed: u64,
) -> Result<Sigma2Estimate> {
    let n = dataset.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "refitted cross-validation needs at least 4 observations, got {n}"
        )));
    }
    let mut rng = rng_for(seed, HALF_STREAM);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let (first, second) = indices.split_at(n / 2);
    let fold_seed_a: u64 = rng.gen();
    let fold_seed_b: u64 = rng.gen();
    let (v1, t1) = refit_direction(dataset, level, first, second, fold_seed_a)?;
    let (v2, t2) = refit_direction(dataset, level, second, first, fold_seed_b)?;
    Ok(Sigma2Estimate {
        value: 0.5 * (v1 + v2),
        truncated: t1 || t2,
    })
}

/// One direction of the refitted-CV estimator: select on `select_idx`,
/// refit and measure residual variance on `fit_idx`.
fn refit_direction<G: Grid>(
    dataset: &FunctionalDataset<G>,
    level: usize,
    select_idx: &[usize],
    fit_idx: &[usize],
    fold_seed: u64,
) -> Result<(f64, bool)> {
    let d_select = dataset.subset(select_idx)?;
    let grid = TuningGrid::new(vec![level])?;
    let k = 5.min(d_select.len());
    let selection = select_cv(&d_select, k, &grid, fold_seed)?;
    let fit = fit_functional(&d_select, level, selection.best_lambda)?;
    // Support in the full coefficient layout, ranked by |η̂| descending
    // (basis index breaks exact magnitude ties deterministically).
    let mut ranked: Vec<(usize, f64)> = fit
        .kept_columns()
        .iter()
        .zip(&fit.lasso_fit.coefficients)
        .filter(|(_, c)| **c != 0.0)
        .map(|(&j, c)| (j, c.abs()))
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let support: Vec<usize> = ranked.into_iter().map(|(j, _)| j).collect();
    let d_fit = dataset.subset(fit_idx)?;
    refit_sigma2(&d_fit, level, &support)
}

/// Unpenalized least-squares refit of `support` (full-layout coefficient
/// indices, ordered by decreasing selection magnitude) on `dataset`;
/// returns the residual variance `RSS / (n − |support|)` and whether the
/// support had to be truncated to keep the refit overdetermined.
fn refit_sigma2<G: Grid>(
    dataset: &FunctionalDataset<G>,
    level: usize,
    support: &[usize],
) -> Result<(f64, bool)> {
    let n = dataset.len();
    let cap = n - 1;
    let truncated = support.len() > cap;
    let used = if truncated { &support[..cap] } else { support };
    let design = build_design(dataset, level)?;
    // Columns of this half's design matching the support; a coefficient
    // screened out here has an identically zero column and is skipped (it
    // could not change the fit), but it still counts toward model size.
    let positions: Vec<usize> = used
        .iter()
        .filter_map(|j| design.kept_columns().binary_search(j).ok())
        .collect();
    let y = dataset.responses();
    let y_bar = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_bar).collect();
    let rss = if positions.is_empty() {
        sum_sq(&yc)
    } else {
        let m = positions.len();
        let mut xc = DMatrix::from_fn(n, m, |i, j| design.matrix()[(i, positions[j])]);
        for j in 0..m {
            let col_mean = xc.column(j).mean();
            for i in 0..n {
                xc[(i, j)] -= col_mean;
            }
        }
        let rhs = DVector::from_column_slice(&yc);
        let svd = xc.clone().svd(true, true);
        let theta = svd
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::Degenerate(format!("least-squares refit failed: {e}")))?;
        let residual = rhs - xc * theta;
        residual.iter().map(|r| r * r).sum()
    };
    Ok((rss / (n - used.len()) as f64, truncated))
}
