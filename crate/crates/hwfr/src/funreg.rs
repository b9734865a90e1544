//! The bridge between sampled functional data and the penalized linear model.
//!
//! For predictors sampled on a `p`-cell grid, the functional model
//! `Y = β₀ + ∫ X β + ε` becomes `Y = β₀ + C η + ε`, where row `i` of `C`
//! holds the wavelet coefficients of `X_i` scaled by the cell measure
//! (`1/p` in 1D, `1/(n_u n_v n_w)` in 3D) and `η` holds the wavelet
//! coefficients of the grid samples of `β`. With this scaling, midpoint
//! quadrature of `∫ X β` is exact for the piecewise-constant Haar basis, and
//! the fitted `η̂` inverse-transforms directly to `β̂` on the grid.
//!
//! Columns that are identically zero across the dataset (common under
//! zero-padding) are screened out of the design and restored as exact zeros
//! at reconstruction.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{ensure_finite, Error, Result};
use crate::grid::{Grid, GridDims, VolumeGrid};
use crate::haar::{BasisSpec, WaveletCoefficients};
use crate::lasso::{self, LassoFit, LassoProblem};
use crate::util::dot;

/// Paired functional predictors and scalar responses.
#[derive(Debug, Clone)]
pub struct FunctionalDataset<G: Grid> {
    predictors: Vec<G>,
    responses: Vec<f64>,
}

impl<G: Grid> FunctionalDataset<G> {
    /// Validates matching counts, common dims, and `n ≥ 2`.
    pub fn new(predictors: Vec<G>, responses: Vec<f64>) -> Result<Self> {
        if predictors.len() != responses.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} predictors vs {} responses",
                predictors.len(),
                responses.len()
            )));
        }
        if predictors.len() < 2 {
            return Err(Error::InvalidArgument(
                "need at least 2 observations".into(),
            ));
        }
        let dims = predictors[0].dims();
        if let Some(bad) = predictors.iter().position(|x| x.dims() != dims) {
            return Err(Error::DimensionMismatch(format!(
                "predictor {bad} has dims {:?}, expected {dims:?}",
                predictors[bad].dims()
            )));
        }
        ensure_finite(&responses, "responses")?;
        Ok(FunctionalDataset {
            predictors,
            responses,
        })
    }

    pub fn len(&self) -> usize {
        self.predictors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictors.is_empty()
    }

    pub fn dims(&self) -> GridDims {
        self.predictors[0].dims()
    }

    pub fn predictors(&self) -> &[G] {
        &self.predictors
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// A dataset holding the rows at `indices` (duplicates allowed, as in
    /// bootstrap resampling).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::InvalidArgument(format!(
                "subset index {bad} out of range for {} observations",
                self.len()
            )));
        }
        FunctionalDataset::new(
            indices.iter().map(|&i| self.predictors[i].clone()).collect(),
            indices.iter().map(|&i| self.responses[i]).collect(),
        )
    }

    /// The same predictors with different responses (e.g. permuted).
    pub fn with_responses(&self, responses: Vec<f64>) -> Result<Self> {
        FunctionalDataset::new(self.predictors.clone(), responses)
    }
}

/// The screened wavelet-domain design matrix for one decomposition level.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    matrix: DMatrix<f64>,
    kept_columns: Vec<usize>,
    basis: BasisSpec,
    grid_measure: f64,
}

impl DesignMatrix {
    /// The `n × p_kept` matrix (kept columns only).
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Indices of the kept columns in the full coefficient layout.
    pub fn kept_columns(&self) -> &[usize] {
        &self.kept_columns
    }

    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    /// The quadrature cell measure baked into every row.
    pub fn grid_measure(&self) -> f64 {
        self.grid_measure
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// A design holding the given rows (duplicates allowed). The parent's
    /// column screening is kept as-is so coefficient layouts stay aligned
    /// across folds and resamples; a column that happens to vanish on the
    /// subset is harmless (the penalty pins its coefficient at zero).
    pub fn row_subset(&self, indices: &[usize]) -> Result<DesignMatrix> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n_rows()) {
            return Err(Error::InvalidArgument(format!(
                "row index {bad} out of range for {} rows",
                self.n_rows()
            )));
        }
        let matrix = DMatrix::from_fn(indices.len(), self.matrix.ncols(), |i, j| {
            self.matrix[(indices[i], j)]
        });
        Ok(DesignMatrix {
            matrix,
            kept_columns: self.kept_columns.clone(),
            basis: self.basis,
            grid_measure: self.grid_measure,
        })
    }
}

/// Builds the level-`level` design matrix: row `i` is
/// `grid_measure · dwt(X_i, level)`, with all-zero columns screened out.
pub fn build_design<G: Grid>(dataset: &FunctionalDataset<G>, level: usize) -> Result<DesignMatrix> {
    let basis = BasisSpec::new(dataset.dims(), level)?;
    let p = basis.coefficient_len();
    let measure = 1.0 / p as f64;
    let rows: Vec<Vec<f64>> = dataset
        .predictors
        .par_iter()
        .map(|x| {
            x.dwt(level).map(|c| {
                let mut v = c.into_values();
                for value in v.iter_mut() {
                    *value *= measure;
                }
                v
            })
        })
        .collect::<Result<_>>()?;
    let kept_columns: Vec<usize> = (0..p)
        .filter(|&j| rows.iter().any(|r| r[j] != 0.0))
        .collect();
    let n = rows.len();
    let matrix = DMatrix::from_fn(n, kept_columns.len(), |i, j| rows[i][kept_columns[j]]);
    Ok(DesignMatrix {
        matrix,
        kept_columns,
        basis,
        grid_measure: measure,
    })
}

/// How a non-dyadic volume was zero-padded: per-axis `(low, high)` margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadRecord {
    pub original_dims: (usize, usize, usize),
    pub offsets: [(usize, usize); 3],
}

impl PadRecord {
    /// Extracts the original voxels from a padded (or equal-shape derived)
    /// volume.
    pub fn crop(&self, padded: &VolumeGrid) -> Result<Vec<f64>> {
        let (du, dv, dw) = self.original_dims;
        let expected = (
            du + self.offsets[0].0 + self.offsets[0].1,
            dv + self.offsets[1].0 + self.offsets[1].1,
            dw + self.offsets[2].0 + self.offsets[2].1,
        );
        if padded.shape() != expected {
            return Err(Error::DimensionMismatch(format!(
                "padded shape {:?} does not match pad record (expected {expected:?})",
                padded.shape()
            )));
        }
        let mut out = Vec::with_capacity(du * dv * dw);
        for w in 0..dw {
            for v in 0..dv {
                for u in 0..du {
                    out.push(padded.at(
                        u + self.offsets[0].0,
                        v + self.offsets[1].0,
                        w + self.offsets[2].0,
                    ));
                }
            }
        }
        Ok(out)
    }
}

/// Zero-pads a 3D array (u-fastest flat order) so each axis becomes the next
/// power of two, centering the original data (extra cell goes to the high
/// side). Dyadic input passes through with zero offsets.
pub fn pad_to_dyadic(
    dims: (usize, usize, usize),
    values: &[f64],
) -> Result<(VolumeGrid, PadRecord)> {
    let (du, dv, dw) = dims;
    if du == 0 || dv == 0 || dw == 0 {
        return Err(Error::InvalidArgument("volume dims must be nonzero".into()));
    }
    if values.len() != du * dv * dw {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} need {} values, got {}",
            du * dv * dw,
            values.len()
        )));
    }
    ensure_finite(values, "volume values")?;
    let pad_axis = |d: usize| -> (usize, usize, usize) {
        let target = d.next_power_of_two();
        let total = target - d;
        (target, total / 2, total - total / 2)
    };
    let (nu, lo_u, _) = pad_axis(du);
    let (nv, lo_v, _) = pad_axis(dv);
    let (nw, lo_w, _) = pad_axis(dw);
    let mut padded = vec![0.0; nu * nv * nw];
    for w in 0..dw {
        for v in 0..dv {
            for u in 0..du {
                padded[(u + lo_u) + nu * ((v + lo_v) + nv * (w + lo_w))] =
                    values[u + du * (v + dv * w)];
            }
        }
    }
    let record = PadRecord {
        original_dims: dims,
        offsets: [
            (lo_u, nu - du - lo_u),
            (lo_v, nv - dv - lo_v),
            (lo_w, nw - dw - lo_w),
        ],
    };
    Ok((VolumeGrid::new((nu, nv, nw), padded)?, record))
}

/// The estimated coefficient function sampled on the grid, with its exact
/// zero/nonzero support mask.
#[derive(Debug, Clone)]
pub struct CoefficientField<G: Grid> {
    field: G,
    support_mask: Vec<bool>,
}

impl<G: Grid> CoefficientField<G> {
    /// Wraps a sampled coefficient grid, deriving the support mask from its
    /// exact zeros.
    pub fn from_grid(field: G) -> Self {
        let support_mask = field.values().iter().map(|v| *v != 0.0).collect();
        CoefficientField {
            field,
            support_mask,
        }
    }

    /// The sampled `β̂` values.
    pub fn grid(&self) -> &G {
        &self.field
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    /// `true` where `β̂` is exactly nonzero.
    pub fn support_mask(&self) -> &[bool] {
        &self.support_mask
    }

    /// Number of grid cells with nonzero `β̂`.
    pub fn support_size(&self) -> usize {
        self.support_mask.iter().filter(|m| **m).count()
    }
}

/// A fitted functional regression: solver output in kept-column coordinates
/// plus the reconstructed coefficient field.
#[derive(Debug, Clone)]
pub struct FunctionalFit<G: Grid> {
    pub lasso_fit: LassoFit,
    basis: BasisSpec,
    kept_columns: Vec<usize>,
    beta_field: CoefficientField<G>,
}

impl<G: Grid> FunctionalFit<G> {
    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    /// Decomposition level the model was fitted at.
    pub fn level(&self) -> usize {
        self.basis.level()
    }

    /// Penalty the model was fitted at.
    pub fn lambda(&self) -> f64 {
        self.lasso_fit.lambda
    }

    pub fn intercept(&self) -> f64 {
        self.lasso_fit.intercept
    }

    pub fn kept_columns(&self) -> &[usize] {
        &self.kept_columns
    }

    /// The estimated coefficient function on the grid.
    pub fn beta(&self) -> &CoefficientField<G> {
        &self.beta_field
    }

    /// `η̂` zero-expanded to the full coefficient layout.
    pub fn full_coefficients(&self) -> Vec<f64> {
        let mut full = vec![0.0; self.basis.coefficient_len()];
        for (k, &j) in self.kept_columns.iter().enumerate() {
            full[j] = self.lasso_fit.coefficients[k];
        }
        full
    }
}

/// Packages an already-solved penalized fit with its reconstructed field;
/// used by selection code that solves whole paths at once.
pub(crate) fn fit_from_parts<G: Grid>(
    design: &DesignMatrix,
    lasso_fit: LassoFit,
) -> Result<FunctionalFit<G>> {
    let beta_field =
        reconstruct_beta::<G>(&lasso_fit.coefficients, design.kept_columns(), design.basis())?;
    Ok(FunctionalFit {
        lasso_fit,
        basis: design.basis(),
        kept_columns: design.kept_columns().to_vec(),
        beta_field,
    })
}

/// Zero-expands `eta_hat` (given on `kept_columns`) and inverse-transforms
/// it into the grid samples of `β̂`.
pub fn reconstruct_beta<G: Grid>(
    eta_hat: &[f64],
    kept_columns: &[usize],
    basis: BasisSpec,
) -> Result<CoefficientField<G>> {
    if eta_hat.len() != kept_columns.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients vs {} kept columns",
            eta_hat.len(),
            kept_columns.len()
        )));
    }
    let p = basis.coefficient_len();
    let mut full = vec![0.0; p];
    for (value, &j) in eta_hat.iter().zip(kept_columns) {
        if j >= p {
            return Err(Error::InvalidArgument(format!(
                "kept column {j} out of range for {p} coefficients"
            )));
        }
        full[j] = *value;
    }
    let coeffs = WaveletCoefficients::new(basis, full)?;
    Ok(CoefficientField::from_grid(G::idwt(&coeffs)?))
}

/// Fits the lasso on an already-built design and reconstructs `β̂`.
pub(crate) fn fit_design<G: Grid>(
    design: &DesignMatrix,
    responses: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<FunctionalFit<G>> {
    let problem =
        LassoProblem::new(design.matrix().clone(), responses.to_vec(), lambda)?;
    let lasso_fit = lasso::fit(&problem, None, tol, max_sweeps)?;
    let beta_field = reconstruct_beta::<G>(
        &lasso_fit.coefficients,
        design.kept_columns(),
        design.basis(),
    )?;
    Ok(FunctionalFit {
        lasso_fit,
        basis: design.basis(),
        kept_columns: design.kept_columns().to_vec(),
        beta_field,
    })
}

/// End-to-end fit at a fixed `(level, lambda)`: build the design, solve the
/// penalized problem, reconstruct the coefficient field.
pub fn fit_functional<G: Grid>(
    dataset: &FunctionalDataset<G>,
    level: usize,
    lambda: f64,
) -> Result<FunctionalFit<G>> {
    let design = build_design(dataset, level)?;
    fit_design(
        &design,
        dataset.responses(),
        lambda,
        lasso::DEFAULT_TOL,
        lasso::DEFAULT_MAX_SWEEPS,
    )
}

/// Predicted responses for new predictors on the training grid:
/// `Ŷ = β̂₀ + grid_measure · ⟨X, β̂⟩` (equal to the wavelet-domain inner
/// product by orthonormality).
pub fn predict<G: Grid>(fit: &FunctionalFit<G>, new_predictors: &[G]) -> Result<Vec<f64>> {
    let dims = fit.basis.dims();
    let measure = 1.0 / dims.cell_count() as f64;
    let beta = fit.beta_field.values();
    new_predictors
        .iter()
        .map(|x| {
            if x.dims() != dims {
                return Err(Error::DimensionMismatch(format!(
                    "predictor dims {:?} do not match training dims {dims:?}",
                    x.dims()
                )));
            }
            Ok(fit.lasso_fit.intercept + measure * dot(x.values(), beta))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SignalGrid;
    use crate::util::rng_for;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_signals(n: usize, p: usize, seed: u64) -> Vec<SignalGrid> {
        let mut rng = rng_for(seed, 0);
        (0..n)
            .map(|_| SignalGrid::new((0..p).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap())
            .collect()
    }

    #[test]
    fn dataset_validation() {
        let xs = random_signals(3, 8, 1);
        assert!(FunctionalDataset::new(xs.clone(), vec![1.0, 2.0]).is_err());
        assert!(FunctionalDataset::new(xs[..1].to_vec(), vec![1.0]).is_err());
        let mut mixed = random_signals(2, 8, 2);
        mixed.push(SignalGrid::new(vec![0.0; 16]).unwrap());
        assert!(FunctionalDataset::new(mixed, vec![0.0; 3]).is_err());
    }

    #[test]
    fn constant_predictors_keep_only_the_approximation_column() {
        let p = 8;
        let xs: Vec<SignalGrid> = (0..4)
            .map(|_| SignalGrid::new(vec![1.0; p]).unwrap())
            .collect();
        let ds = FunctionalDataset::new(xs, vec![0.0; 4]).unwrap();
        for level in 1..=3 {
            let design = build_design(&ds, level).unwrap();
            // Constant curves have zero detail everywhere; only A-band
            // columns survive screening.
            let approx_len = p >> level;
            assert_eq!(design.kept_columns(), &(0..approx_len).collect::<Vec<_>>()[..]);
            for j in 0..approx_len {
                for i in 0..4 {
                    // Each A coefficient of the constant-1 curve is √(2^level),
                    // scaled by 1/p.
                    let expected = (1u64 << level) as f64;
                    assert_abs_diff_eq!(
                        design.matrix()[(i, j)],
                        expected.sqrt() / p as f64,
                        epsilon = 1e-12
                    );
                }
            }
        }
        // At the deepest level the single kept entry is 1/√p per row.
        let design = build_design(&ds, 3).unwrap();
        assert_abs_diff_eq!(
            design.matrix()[(0, 0)],
            1.0 / (p as f64).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn half_supported_curves_screen_second_half_columns() {
        let mut rng = rng_for(3, 0);
        let xs: Vec<SignalGrid> = (0..5)
            .map(|_| {
                let mut v: Vec<f64> = (0..4).map(|_| rng.gen_range(0.5..1.0)).collect();
                v.extend([0.0; 4]);
                SignalGrid::new(v).unwrap()
            })
            .collect();
        let ds = FunctionalDataset::new(xs, vec![0.0; 5]).unwrap();
        let design = build_design(&ds, 1).unwrap();
        // Level 1 on p=8: A entries 0..4 (cells 2k..2k+2), D entries 4..8.
        // Basis functions supported on cells 4..8 must be screened.
        assert_eq!(design.kept_columns(), &[0, 1, 4, 5]);
    }

    #[test]
    fn padding_is_centered_and_crops_back_exactly() {
        // 96 → 128 gets 16 cells on each side.
        let vals: Vec<f64> = (0..96 * 4 * 2).map(|i| i as f64).collect();
        let (padded, record) = pad_to_dyadic((96, 4, 2), &vals).unwrap();
        assert_eq!(padded.shape(), (128, 4, 2));
        assert_eq!(record.offsets[0], (16, 16));
        assert_eq!(record.offsets[1], (0, 0));
        assert_eq!(record.offsets[2], (0, 0));
        assert_eq!(record.crop(&padded).unwrap(), vals);

        // Odd leftover goes to the high side; dyadic input is untouched.
        let vals: Vec<f64> = (0..6 * 3 * 4).map(|i| i as f64 - 10.0).collect();
        let (padded, record) = pad_to_dyadic((6, 3, 4), &vals).unwrap();
        assert_eq!(padded.shape(), (8, 4, 4));
        assert_eq!(record.offsets, [(1, 1), (0, 1), (0, 0)]);
        assert_eq!(record.crop(&padded).unwrap(), vals);
    }

    #[test]
    fn full_shrinkage_gives_zero_field_and_mean_intercept() {
        let xs = random_signals(10, 16, 5);
        let ys: Vec<f64> = (0..10).map(|i| i as f64 * 0.3 - 1.0).collect();
        let ds = FunctionalDataset::new(xs, ys.clone()).unwrap();
        let fit = fit_functional(&ds, 2, 1e6).unwrap();
        assert!(fit.beta().values().iter().all(|v| *v == 0.0));
        assert_eq!(fit.beta().support_size(), 0);
        let mean_y = ys.iter().sum::<f64>() / 10.0;
        assert_abs_diff_eq!(fit.intercept(), mean_y, epsilon = 1e-12);
        let preds = predict(&fit, ds.predictors()).unwrap();
        for p in preds {
            assert_abs_diff_eq!(p, mean_y, epsilon = 1e-12);
        }
    }

    #[test]
    fn noiseless_representable_beta_is_recovered() {
        // β constant on blocks of 4 cells is exactly representable at level 2.
        let p = 16;
        let beta: Vec<f64> = (0..p)
            .map(|j| match j / 4 {
                0 => 0.0,
                1 => 2.0,
                2 => -1.0,
                _ => 0.0,
            })
            .collect();
        let xs = random_signals(48, p, 7);
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                x.values()
                    .iter()
                    .zip(&beta)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / p as f64
            })
            .collect();
        let ds = FunctionalDataset::new(xs, ys).unwrap();
        let fit = fit_functional(&ds, 2, 1e-10).unwrap();
        for (got, want) in fit.beta().values().iter().zip(&beta) {
            assert!(
                (got - want).abs() <= 1e-6,
                "recovered {got} but expected {want}"
            );
        }
    }

    #[test]
    fn reconstruction_edge_cases() {
        let basis = BasisSpec::new(GridDims::OneD(16), 4).unwrap();
        let zero = reconstruct_beta::<SignalGrid>(&[], &[], basis).unwrap();
        assert!(zero.values().iter().all(|v| *v == 0.0));

        let unit = reconstruct_beta::<SignalGrid>(&[1.0], &[0], basis).unwrap();
        for &v in unit.values() {
            assert_abs_diff_eq!(v, 0.25, epsilon = 1e-14);
        }

        assert!(reconstruct_beta::<SignalGrid>(&[1.0], &[99], basis).is_err());
        assert!(reconstruct_beta::<SignalGrid>(&[1.0, 2.0], &[0], basis).is_err());
    }

    #[test]
    fn design_and_reconstruction_are_adjoint() {
        let p = 32;
        let xs = random_signals(6, p, 11);
        let ds = FunctionalDataset::new(xs.clone(), vec![0.0; 6]).unwrap();
        let design = build_design(&ds, 3).unwrap();
        let mut rng = rng_for(12, 0);
        let eta: Vec<f64> = (0..design.kept_columns().len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let field =
            reconstruct_beta::<SignalGrid>(&eta, design.kept_columns(), design.basis()).unwrap();
        for (i, x) in xs.iter().enumerate() {
            let via_design: f64 = (0..eta.len())
                .map(|j| design.matrix()[(i, j)] * eta[j])
                .sum();
            let via_grid = x
                .values()
                .iter()
                .zip(field.values())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / p as f64;
            assert_abs_diff_eq!(via_design, via_grid, epsilon = 1e-10);
        }
    }

    #[test]
    fn training_predictions_match_solver_fitted_values() {
        let xs = random_signals(20, 16, 13);
        let mut rng = rng_for(14, 0);
        let ys: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ds = FunctionalDataset::new(xs, ys).unwrap();
        let design = build_design(&ds, 2).unwrap();
        let fit = fit_functional(&ds, 2, 0.001).unwrap();
        let grid_preds = predict(&fit, ds.predictors()).unwrap();
        let design_preds = fit.lasso_fit.predict(design.matrix());
        for (a, b) in grid_preds.iter().zip(&design_preds) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn sparsity_transfers_from_coefficients_to_the_field() {
        // Keep only basis functions supported on the first half of the grid.
        let basis = BasisSpec::new(GridDims::OneD(16), 1).unwrap();
        // Level 1: A indices 0..8 cover cells 2k..2k+2; details 8..16 likewise.
        let kept = vec![0usize, 1, 2, 3, 8, 9, 10, 11];
        let eta = vec![0.7, -0.2, 0.4, 1.1, -0.6, 0.3, 0.9, -1.2];
        let field = reconstruct_beta::<SignalGrid>(&eta, &kept, basis).unwrap();
        for j in 8..16 {
            assert_eq!(field.values()[j], 0.0, "cell {j} should be exactly zero");
            assert!(!field.support_mask()[j]);
        }
        assert!(field.support_mask()[..8].iter().any(|m| *m));
    }

    #[test]
    fn constant_response_shift_moves_only_the_intercept() {
        let xs = random_signals(25, 16, 17);
        let mut rng = rng_for(18, 0);
        let ys: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shifted: Vec<f64> = ys.iter().map(|y| y + 5.0).collect();
        let ds = FunctionalDataset::new(xs.clone(), ys).unwrap();
        let ds_shift = FunctionalDataset::new(xs, shifted).unwrap();
        let fit = fit_functional(&ds, 2, 0.01).unwrap();
        let fit_shift = fit_functional(&ds_shift, 2, 0.01).unwrap();
        assert_abs_diff_eq!(
            fit_shift.intercept() - fit.intercept(),
            5.0,
            epsilon = 1e-10
        );
        for (a, b) in fit
            .lasso_fit
            .coefficients
            .iter()
            .zip(&fit_shift.lasso_fit.coefficients)
        {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }
}
