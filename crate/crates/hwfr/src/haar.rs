//! Orthonormal discrete Haar analysis and synthesis on dyadic grids.
//!
//! The forward transform maps each consecutive pair `(a, b)` to the scaled
//! average and difference `((a + b)/√2, (a − b)/√2)` and recurses on the
//! averages. With the `√2` scaling every discrete basis vector has unit
//! Euclidean norm, so the transform is orthonormal: norms are preserved and
//! the inverse is the transpose.
//!
//! Three-dimensional volumes use the tensor-product construction: at each
//! level the pairwise step runs along `u`, then `v`, then `w`, restricted to
//! the current approximation block. Besides the approximation this yields
//! seven directional detail subbands per level, one for each nonempty choice
//! of axes that receive the differencing step.
//!
//! # Coefficient layout
//!
//! Coefficients are stored flat so files and tests can be bit-exact:
//!
//! * 1D: `[A_L | D_L | … | D_1]` — approximation first, then detail levels
//!   from coarsest to finest, each in ascending translation order.
//! * 3D: `[A_L | level-L blocks q=1…7 | … | level-1 blocks q=1…7]`, where
//!   direction `q = 4·a_u + 2·a_v + a_w` and `a_axis = 1` marks the axes
//!   that were differenced. Within a block of shape `(b_u, b_v, b_w)` entry
//!   `(k, l, m)` sits at offset `k·b_v·b_w + l·b_w + m`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use crate::error::{ensure_finite, Error, Result};
use crate::grid::{Grid, GridDims, SignalGrid, VolumeGrid};

/// Identifies one subband of a level-`L` decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subband {
    /// The coarse approximation band `A_L`.
    Approx,
    /// 1D detail band `D_level`; `level` runs from 1 (finest) to `L`.
    Detail { level: usize },
    /// 3D directional detail band at `level` with direction `q ∈ 1..=7`,
    /// `q = 4·a_u + 2·a_v + a_w` marking the differenced axes.
    DirectionalDetail { level: usize, direction: u8 },
}

/// The basis underlying a coefficient vector: grid shape plus decomposition
/// level. Two coefficient vectors are comparable exactly when their
/// `BasisSpec`s are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    dims: GridDims,
    level: usize,
}

impl BasisSpec {
    /// Validates dims and level range (`1 ..= log2(min dimension)`).
    pub fn new(dims: GridDims, level: usize) -> Result<Self> {
        dims.validate_dyadic()?;
        dims.validate_level(level)?;
        Ok(BasisSpec { dims, level })
    }

    /// Grid shape this basis spans.
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    /// Decomposition level `L`.
    pub fn level(&self) -> usize {
        self.level
    }

    /// 1 for signals, 3 for volumes.
    pub fn dimensionality(&self) -> usize {
        self.dims.dimensionality()
    }

    /// Number of coefficients — always equals the grid cell count.
    pub fn coefficient_len(&self) -> usize {
        self.dims.cell_count()
    }

    /// The ordered subband layout: disjoint ranges that partition
    /// `0..coefficient_len()`.
    pub fn subband_layout(&self) -> Vec<(Subband, Range<usize>)> {
        match self.dims {
            GridDims::OneD(p) => {
                let mut map = vec![(Subband::Approx, 0..p >> self.level)];
                for level in (1..=self.level).rev() {
                    map.push((Subband::Detail { level }, (p >> level)..(p >> (level - 1))));
                }
                map
            }
            GridDims::ThreeD(nu, nv, nw) => {
                let approx_len = (nu >> self.level) * (nv >> self.level) * (nw >> self.level);
                let mut map = vec![(Subband::Approx, 0..approx_len)];
                let mut cursor = approx_len;
                for level in (1..=self.level).rev() {
                    let block = (nu >> level) * (nv >> level) * (nw >> level);
                    for direction in 1..=7u8 {
                        map.push((
                            Subband::DirectionalDetail { level, direction },
                            cursor..cursor + block,
                        ));
                        cursor += block;
                    }
                }
                map
            }
        }
    }
}

/// A level-`L` coefficient vector together with its basis and subband map.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients {
    values: Vec<f64>,
    basis: BasisSpec,
    subbands: Vec<(Subband, Range<usize>)>,
}

impl WaveletCoefficients {
    /// Wraps a coefficient vector, validating length and finiteness.
    pub fn new(basis: BasisSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis.coefficient_len() {
            return Err(Error::DimensionMismatch(format!(
                "basis needs {} coefficients, got {}",
                basis.coefficient_len(),
                values.len()
            )));
        }
        ensure_finite(&values, "wavelet coefficients")?;
        let subbands = basis.subband_layout();
        Ok(WaveletCoefficients {
            values,
            basis,
            subbands,
        })
    }

    /// An all-zero coefficient vector for `basis`.
    pub fn zeroed(basis: BasisSpec) -> Self {
        let subbands = basis.subband_layout();
        WaveletCoefficients {
            values: vec![0.0; basis.coefficient_len()],
            basis,
            subbands,
        }
    }

    /// Flat coefficient values in the documented layout.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Consumes self, returning the flat values.
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The basis (dims + level) of this vector.
    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    /// Decomposition level `L`.
    pub fn level(&self) -> usize {
        self.basis.level
    }

    /// Ordered `(subband, index range)` map partitioning the vector.
    pub fn subband_map(&self) -> &[(Subband, Range<usize>)] {
        &self.subbands
    }

    /// The coefficients of one subband, or `None` if it does not exist at
    /// this level/dimensionality.
    pub fn subband(&self, which: Subband) -> Option<&[f64]> {
        self.subbands
            .iter()
            .find(|(s, _)| *s == which)
            .map(|(_, r)| &self.values[r.clone()])
    }

    /// The approximation band `A_L`.
    pub fn approximation(&self) -> &[f64] {
        self.subband(Subband::Approx).expect("A band always exists")
    }
}

/// The grid cells a single basis function is supported on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridRegion {
    OneD(Range<usize>),
    ThreeD {
        u: Range<usize>,
        v: Range<usize>,
        w: Range<usize>,
    },
}

/// Maps a flat coefficient index to the grid cells its basis function
/// touches. Errors if `index` is out of range.
pub fn coefficient_support(basis: &BasisSpec, index: usize) -> Result<GridRegion> {
    if index >= basis.coefficient_len() {
        return Err(Error::InvalidArgument(format!(
            "coefficient index {index} out of range for {} coefficients",
            basis.coefficient_len()
        )));
    }
    let (subband, range) = basis
        .subband_layout()
        .into_iter()
        .find(|(_, r)| r.contains(&index))
        .expect("subband layout partitions the index range");
    let offset = index - range.start;
    let width_level = match subband {
        Subband::Approx => basis.level,
        Subband::Detail { level } | Subband::DirectionalDetail { level, .. } => level,
    };
    let cells = 1usize << width_level;
    match basis.dims {
        GridDims::OneD(_) => Ok(GridRegion::OneD(offset * cells..(offset + 1) * cells)),
        GridDims::ThreeD(nu, nv, nw) => {
            let shift = width_level;
            let (bv, bw) = (nv >> shift, nw >> shift);
            debug_assert!(bv > 0 && bw > 0 && nu >> shift > 0);
            let k = offset / (bv * bw);
            let l = (offset / bw) % bv;
            let m = offset % bw;
            Ok(GridRegion::ThreeD {
                u: k * cells..(k + 1) * cells,
                v: l * cells..(l + 1) * cells,
                w: m * cells..(m + 1) * cells,
            })
        }
    }
}

/// One forward pairwise step on the strided line starting at `base`:
/// averages land in the first half, differences in the second.
fn forward_pairs_strided(buf: &mut [f64], base: usize, stride: usize, len: usize, tmp: &mut [f64]) {
    let half = len / 2;
    for i in 0..half {
        let a = buf[base + 2 * i * stride];
        let b = buf[base + (2 * i + 1) * stride];
        tmp[i] = (a + b) * FRAC_1_SQRT_2;
        tmp[half + i] = (a - b) * FRAC_1_SQRT_2;
    }
    for (i, v) in tmp.iter().enumerate().take(len) {
        buf[base + i * stride] = *v;
    }
}

/// Inverse of [`forward_pairs_strided`].
fn inverse_pairs_strided(buf: &mut [f64], base: usize, stride: usize, len: usize, tmp: &mut [f64]) {
    let half = len / 2;
    for i in 0..half {
        let s = buf[base + i * stride];
        let d = buf[base + (half + i) * stride];
        tmp[2 * i] = (s + d) * FRAC_1_SQRT_2;
        tmp[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
    }
    for (i, v) in tmp.iter().enumerate().take(len) {
        buf[base + i * stride] = *v;
    }
}

/// Forward 1D analysis at `level`.
pub fn dwt1d(signal: &SignalGrid, level: usize) -> Result<WaveletCoefficients> {
    let basis = BasisSpec::new(signal.dims(), level)?;
    let mut buf = signal.values().to_vec();
    let mut tmp = vec![0.0; buf.len()];
    let mut len = buf.len();
    for _ in 0..level {
        forward_pairs_strided(&mut buf, 0, 1, len, &mut tmp);
        len /= 2;
    }
    WaveletCoefficients::new(basis, buf)
}

/// 1D synthesis: exact inverse of [`dwt1d`] up to round-off.
pub fn idwt1d(coeffs: &WaveletCoefficients) -> Result<SignalGrid> {
    let p = match coeffs.basis.dims() {
        GridDims::OneD(p) => p,
        GridDims::ThreeD(..) => {
            return Err(Error::DimensionMismatch(
                "3D coefficients passed to 1D synthesis".into(),
            ))
        }
    };
    let mut buf = coeffs.values.clone();
    let mut tmp = vec![0.0; p];
    let mut len = p >> coeffs.level();
    for _ in 0..coeffs.level() {
        len *= 2;
        inverse_pairs_strided(&mut buf, 0, 1, len, &mut tmp);
    }
    SignalGrid::new(buf)
}

/// For each flat coefficient position (documented layout), the index of the
/// same coefficient in the in-place interleaved volume buffer.
fn interleaved_index_map(dims: (usize, usize, usize), level: usize) -> Vec<usize> {
    let (nu, nv, nw) = dims;
    let mut map = Vec::with_capacity(nu * nv * nw);
    let push_block =
        |map: &mut Vec<usize>, origin: (usize, usize, usize), shape: (usize, usize, usize)| {
            for k in 0..shape.0 {
                for l in 0..shape.1 {
                    for m in 0..shape.2 {
                        let (u, v, w) = (origin.0 + k, origin.1 + l, origin.2 + m);
                        map.push(u + nu * (v + nv * w));
                    }
                }
            }
        };
    push_block(&mut map, (0, 0, 0), (nu >> level, nv >> level, nw >> level));
    for l in (1..=level).rev() {
        let (bu, bv, bw) = (nu >> l, nv >> l, nw >> l);
        for q in 1..=7usize {
            let (au, av, aw) = ((q >> 2) & 1, (q >> 1) & 1, q & 1);
            push_block(&mut map, (au * bu, av * bv, aw * bw), (bu, bv, bw));
        }
    }
    map
}

/// Forward 3D analysis at `level`: the pairwise step along `u`, then `v`,
/// then `w`, recursing on the approximation block.
pub fn dwt3d(volume: &VolumeGrid, level: usize) -> Result<WaveletCoefficients> {
    let basis = BasisSpec::new(volume.dims(), level)?;
    let (nu, nv, nw) = volume.shape();
    let mut buf = volume.values().to_vec();
    let mut tmp = vec![0.0; nu.max(nv).max(nw)];
    let (mut cu, mut cv, mut cw) = (nu, nv, nw);
    for _ in 0..level {
        for w in 0..cw {
            for v in 0..cv {
                forward_pairs_strided(&mut buf, nu * (v + nv * w), 1, cu, &mut tmp);
            }
        }
        for w in 0..cw {
            for u in 0..cu {
                forward_pairs_strided(&mut buf, u + nu * nv * w, nu, cv, &mut tmp);
            }
        }
        for v in 0..cv {
            for u in 0..cu {
                forward_pairs_strided(&mut buf, u + nu * v, nu * nv, cw, &mut tmp);
            }
        }
        cu /= 2;
        cv /= 2;
        cw /= 2;
    }
    let map = interleaved_index_map((nu, nv, nw), level);
    let values = map.iter().map(|&b| buf[b]).collect();
    WaveletCoefficients::new(basis, values)
}

/// 3D synthesis: exact inverse of [`dwt3d`] up to round-off.
pub fn idwt3d(coeffs: &WaveletCoefficients) -> Result<VolumeGrid> {
    let (nu, nv, nw) = match coeffs.basis.dims() {
        GridDims::ThreeD(nu, nv, nw) => (nu, nv, nw),
        GridDims::OneD(_) => {
            return Err(Error::DimensionMismatch(
                "1D coefficients passed to 3D synthesis".into(),
            ))
        }
    };
    let level = coeffs.level();
    let map = interleaved_index_map((nu, nv, nw), level);
    let mut buf = vec![0.0; nu * nv * nw];
    for (flat, &interleaved) in map.iter().enumerate() {
        buf[interleaved] = coeffs.values[flat];
    }
    let mut tmp = vec![0.0; nu.max(nv).max(nw)];
    for step in (0..level).rev() {
        let (cu, cv, cw) = (nu >> step, nv >> step, nw >> step);
        for v in 0..cv {
            for u in 0..cu {
                inverse_pairs_strided(&mut buf, u + nu * v, nu * nv, cw, &mut tmp);
            }
        }
        for w in 0..cw {
            for u in 0..cu {
                inverse_pairs_strided(&mut buf, u + nu * nv * w, nu, cv, &mut tmp);
            }
        }
        for w in 0..cw {
            for v in 0..cv {
                inverse_pairs_strided(&mut buf, nu * (v + nv * w), 1, cu, &mut tmp);
            }
        }
    }
    VolumeGrid::new((nu, nv, nw), buf)
}
