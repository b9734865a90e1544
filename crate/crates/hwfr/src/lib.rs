//! Functional linear regression with Haar wavelet domain selection.
//!
//! This crate estimates the coefficient function of a scalar-on-function
//! linear model, `Y = β₀ + ∫ X(t) β(t) dt + ε`, for predictors sampled on
//! regular dyadic grids in one or three dimensions. The estimator expands
//! β in an orthonormal Haar wavelet basis, which turns the functional model
//! into a finite linear model in wavelet coefficients; an ℓ₁ penalty then
//! selects a sparse set of coefficients, producing estimates that are exactly
//! zero outside a data-chosen region. Piecewise-constant and localized
//! coefficient functions — signals influencing the response only on part of
//! their domain — are the target use case.
//!
//! Modules:
//! * [`grid`] / [`haar`] — dyadic grids and the orthonormal Haar transform
//!   (1D and tensor-product 3D with directional detail subbands).
//! * [`lasso`] — ℓ₁-penalized least squares by cyclic coordinate descent
//!   with warm-started penalty paths.
//! * [`funreg`] — the bridge from sampled curves/volumes to the penalized
//!   linear model and back to a coefficient field on the grid.
//! * [`tuning`] — decomposition level and penalty selection by validation,
//!   cross-validation, or information criteria with a refitted
//!   cross-validation variance estimate.
//! * [`inference`] — permutation significance bands, a max-statistic global
//!   test, bootstrap inclusion frequencies, and nested predictive R².
//! * [`simgen`] — deterministic generators for the simulation designs used
//!   by the integration and acceptance tests.
//!
//! All randomized procedures take explicit seeds and produce results that
//! are independent of thread count.

pub mod error;
pub mod funreg;
pub mod grid;
pub mod haar;
pub mod inference;
pub mod lasso;
pub mod simgen;
pub mod tuning;

mod util;

pub use error::{Error, Result};
pub use grid::{cell_midpoints, Grid, GridDims, SignalGrid, VolumeGrid};
pub use haar::{
    coefficient_support, dwt1d, dwt3d, idwt1d, idwt3d, BasisSpec, GridRegion, Subband,
    WaveletCoefficients,
};
