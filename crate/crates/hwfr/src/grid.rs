//! Sampled functional data on regular dyadic grids.
//!
//! A predictor is observed on a regular grid over the unit interval (1D) or
//! unit cube (3D). Grid cells are indexed from 0 and associated with their
//! midpoints: cell `j` of a length-`p` grid sits at `t = (j + 1/2) / p`. The
//! Haar basis is constant on these cells, so midpoint quadrature is exact for
//! every function reconstructed from the basis.

use crate::error::{ensure_finite, Error, Result};

/// Dimensions of a sampled grid: a 1D signal of length `p` or a 3D volume of
/// shape `(n_u, n_v, n_w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridDims {
    OneD(usize),
    ThreeD(usize, usize, usize),
}

impl GridDims {
    /// Total number of grid cells.
    pub fn cell_count(&self) -> usize {
        match *self {
            GridDims::OneD(p) => p,
            GridDims::ThreeD(nu, nv, nw) => nu * nv * nw,
        }
    }

    /// 1 for signals, 3 for volumes.
    pub fn dimensionality(&self) -> usize {
        match self {
            GridDims::OneD(_) => 1,
            GridDims::ThreeD(..) => 3,
        }
    }

    /// The deepest admissible decomposition level, `log2` of the smallest
    /// dimension.
    pub fn max_level(&self) -> usize {
        let min_dim = match *self {
            GridDims::OneD(p) => p,
            GridDims::ThreeD(nu, nv, nw) => nu.min(nv).min(nw),
        };
        min_dim.trailing_zeros() as usize
    }

    /// Checks that every dimension is a nonzero power of two.
    pub fn validate_dyadic(&self) -> Result<()> {
        let ok = |n: usize| n > 0 && n.is_power_of_two();
        match *self {
            GridDims::OneD(p) if !ok(p) => Err(Error::NonDyadicLength(p)),
            GridDims::ThreeD(nu, nv, nw) if !(ok(nu) && ok(nv) && ok(nw)) => {
                Err(Error::NonDyadicDims(nu, nv, nw))
            }
            _ => Ok(()),
        }
    }

    /// Checks `1 <= level <= max_level`.
    pub fn validate_level(&self, level: usize) -> Result<()> {
        let max = self.max_level();
        if level == 0 || level > max {
            Err(Error::LevelOutOfRange { level, max })
        } else {
            Ok(())
        }
    }
}

/// Midpoints of `n` equal cells covering `[0, 1]`: `(j + 1/2) / n`.
pub fn cell_midpoints(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| (j as f64 + 0.5) / n as f64)
}

/// A function sampled on a dyadic grid. Implemented by [`SignalGrid`] and
/// [`VolumeGrid`]; lets regression and simulation code treat both uniformly.
pub trait Grid: Clone + Send + Sync + Sized {
    /// Grid shape.
    fn dims(&self) -> GridDims;

    /// Flat sample values (3D: `u` fastest, then `v`, then `w`).
    fn values(&self) -> &[f64];

    /// Consumes the grid, returning its values.
    fn into_values(self) -> Vec<f64>;

    /// Builds a grid from flat values, validating shape and finiteness.
    fn from_values(dims: GridDims, values: Vec<f64>) -> Result<Self>;

    /// Forward wavelet analysis at `level`.
    fn dwt(&self, level: usize) -> Result<crate::haar::WaveletCoefficients>;

    /// Wavelet synthesis back to a grid.
    fn idwt(coeffs: &crate::haar::WaveletCoefficients) -> Result<Self>;
}

/// A 1D signal sampled at `p = 2^J` midpoints of the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalGrid {
    values: Vec<f64>,
}

impl SignalGrid {
    /// Creates a signal, validating the dyadic length and finiteness.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let dims = GridDims::OneD(values.len());
        dims.validate_dyadic()?;
        ensure_finite(&values, "signal values")?;
        Ok(SignalGrid { values })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: zero-length signals are rejected at construction.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Grid for SignalGrid {
    fn dims(&self) -> GridDims {
        GridDims::OneD(self.values.len())
    }

    fn values(&self) -> &[f64] {
        &self.values
    }

    fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn from_values(dims: GridDims, values: Vec<f64>) -> Result<Self> {
        match dims {
            GridDims::OneD(p) if p == values.len() => SignalGrid::new(values),
            GridDims::OneD(p) => Err(Error::DimensionMismatch(format!(
                "expected {p} samples, got {}",
                values.len()
            ))),
            GridDims::ThreeD(..) => Err(Error::DimensionMismatch(
                "3D dims passed to a 1D signal".into(),
            )),
        }
    }

    fn dwt(&self, level: usize) -> Result<crate::haar::WaveletCoefficients> {
        crate::haar::dwt1d(self, level)
    }

    fn idwt(coeffs: &crate::haar::WaveletCoefficients) -> Result<Self> {
        crate::haar::idwt1d(coeffs)
    }
}

/// A 3D volume sampled on an `n_u × n_v × n_w` midpoint grid of the unit
/// cube, stored flat with `u` fastest: `idx = u + n_u · (v + n_v · w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeGrid {
    values: Vec<f64>,
    dims: (usize, usize, usize),
}

impl VolumeGrid {
    /// Creates a volume, validating dyadic dims, length, and finiteness.
    pub fn new(dims: (usize, usize, usize), values: Vec<f64>) -> Result<Self> {
        let gd = GridDims::ThreeD(dims.0, dims.1, dims.2);
        gd.validate_dyadic()?;
        if values.len() != gd.cell_count() {
            return Err(Error::DimensionMismatch(format!(
                "volume dims {dims:?} need {} values, got {}",
                gd.cell_count(),
                values.len()
            )));
        }
        ensure_finite(&values, "volume values")?;
        Ok(VolumeGrid { values, dims })
    }

    /// Shape as `(n_u, n_v, n_w)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        self.dims
    }

    /// Flat index of voxel `(u, v, w)`.
    #[inline]
    pub fn index(&self, u: usize, v: usize, w: usize) -> usize {
        u + self.dims.0 * (v + self.dims.1 * w)
    }

    /// Value at voxel `(u, v, w)`.
    #[inline]
    pub fn at(&self, u: usize, v: usize, w: usize) -> f64 {
        self.values[self.index(u, v, w)]
    }
}

impl Grid for VolumeGrid {
    fn dims(&self) -> GridDims {
        GridDims::ThreeD(self.dims.0, self.dims.1, self.dims.2)
    }

    fn values(&self) -> &[f64] {
        &self.values
    }

    fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn from_values(dims: GridDims, values: Vec<f64>) -> Result<Self> {
        match dims {
            GridDims::ThreeD(nu, nv, nw) => VolumeGrid::new((nu, nv, nw), values),
            GridDims::OneD(_) => Err(Error::DimensionMismatch(
                "1D dims passed to a 3D volume".into(),
            )),
        }
    }

    fn dwt(&self, level: usize) -> Result<crate::haar::WaveletCoefficients> {
        crate::haar::dwt3d(self, level)
    }

    fn idwt(coeffs: &crate::haar::WaveletCoefficients) -> Result<Self> {
        crate::haar::idwt3d(coeffs)
    }
}
