//! Shared oracles for integration tests.
//!
//! Everything here is built independently of the library's transform and
//! solver code: basis matrices come from the continuous scaling/wavelet
//! definitions sampled on the grid, and the reference lasso solver is
//! proximal-gradient (FISTA), not coordinate descent.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Continuous Haar scaling function φ_{j,k} evaluated at `t`.
pub fn scaling_fn(j: u32, k: usize, t: f64) -> f64 {
    let scale = 2f64.powi(j as i32);
    let x = scale * t - k as f64;
    if (0.0..1.0).contains(&x) {
        scale.sqrt()
    } else {
        0.0f64
    }
}

/// Continuous Haar wavelet ψ_{j,k} evaluated at `t`.
pub fn wavelet_fn(j: u32, k: usize, t: f64) -> f64 {
    let scale = 2f64.powi(j as i32);
    let x = scale * t - k as f64;
    if (0.0..0.5).contains(&x) {
        scale.sqrt()
    } else if (0.5..1.0).contains(&x) {
        -scale.sqrt()
    } else {
        0.0
    }
}

/// Midpoint of cell `i` in an `n`-cell grid over [0, 1].
pub fn midpoint(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

/// The p×p analysis matrix of the level-`level` 1D transform, built from the
/// continuous basis sampled at cell midpoints and scaled by 1/√p. Row order
/// matches the documented flat layout `[A_L | D_L | … | D_1]`.
pub fn haar_matrix_1d(p: usize, level: usize) -> DMatrix<f64> {
    assert!(p.is_power_of_two());
    let j_max = p.trailing_zeros();
    assert!(level >= 1 && level <= j_max as usize);
    let j0 = j_max - level as u32;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(p);
    let sample_row = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        (0..p)
            .map(|m| f(midpoint(m, p)) / (p as f64).sqrt())
            .collect()
    };
    for k in 0..(1usize << j0) {
        rows.push(sample_row(&|t| scaling_fn(j0, k, t)));
    }
    for l in (1..=level).rev() {
        let j = j_max - l as u32;
        for k in 0..(1usize << j) {
            rows.push(sample_row(&|t| wavelet_fn(j, k, t)));
        }
    }
    DMatrix::from_fn(p, p, |r, c| rows[r][c])
}

/// The N×N analysis matrix of the level-`level` 3D tensor-product transform
/// on a `dims` grid, rows ordered as the documented flat layout, columns in
/// u-fastest volume order.
pub fn haar_matrix_3d(dims: (usize, usize, usize), level: usize) -> DMatrix<f64> {
    let (nu, nv, nw) = dims;
    let n = nu * nv * nw;
    let (ju, jv, jw) = (
        nu.trailing_zeros(),
        nv.trailing_zeros(),
        nw.trailing_zeros(),
    );
    let norm = (n as f64).sqrt();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    // factor-select: 0 → scaling, 1 → wavelet, at depth `l` on an axis with
    // total dyadic depth `j_axis`.
    let factor = |kind: usize, j_axis: u32, l: usize, k: usize, t: f64| -> f64 {
        let j = j_axis - l as u32;
        if kind == 0 {
            scaling_fn(j, k, t)
        } else {
            wavelet_fn(j, k, t)
        }
    };
    let mut push_block = |kinds: (usize, usize, usize), l: usize| {
        let (bu, bv, bw) = (nu >> l, nv >> l, nw >> l);
        for k in 0..bu {
            for lv in 0..bv {
                for m in 0..bw {
                    let mut row = vec![0.0; n];
                    for w in 0..nw {
                        for v in 0..nv {
                            for u in 0..nu {
                                let val = factor(kinds.0, ju, l, k, midpoint(u, nu))
                                    * factor(kinds.1, jv, l, lv, midpoint(v, nv))
                                    * factor(kinds.2, jw, l, m, midpoint(w, nw));
                                row[u + nu * (v + nv * w)] = val / norm;
                            }
                        }
                    }
                    rows.push(row);
                }
            }
        }
    };
    push_block((0, 0, 0), level);
    for l in (1..=level).rev() {
        for q in 1..=7usize {
            push_block(((q >> 2) & 1, (q >> 1) & 1, q & 1), l);
        }
    }
    DMatrix::from_fn(n, n, |r, c| rows[r][c])
}

/// Deterministic uniform(-1, 1) vector.
pub fn random_vector(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Solution of the penalized least-squares problem
/// `min (1/n)‖y − b0·1 − C η‖² + 2λ‖η‖₁` by FISTA with adaptive restart —
/// an oracle independent of the coordinate-descent path.
///
/// Returns `(b0, eta)`. `kkt_tol` is the stationarity tolerance on the
/// subgradient conditions; panics if it is not reached (oracles must not
/// silently return junk).
pub fn fista_lasso(
    design: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    intercept: bool,
    kkt_tol: f64,
) -> (f64, Vec<f64>) {
    let n = design.nrows();
    let p = design.ncols();
    assert_eq!(y.len(), n);
    // Center once; the intercept is profiled out exactly.
    let y_mean = if intercept {
        y.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    let col_means: Vec<f64> = (0..p)
        .map(|j| {
            if intercept {
                design.column(j).iter().sum::<f64>() / n as f64
            } else {
                0.0
            }
        })
        .collect();
    let xc = DMatrix::from_fn(n, p, |i, j| design[(i, j)] - col_means[j]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));

    // Lipschitz constant of the gradient: (2/n)·σ_max(Xc)² via power iteration.
    let gram_apply = |v: &DVector<f64>| -> DVector<f64> { xc.tr_mul(&(&xc * v)) };
    let mut v = DVector::from_element(p, 1.0 / (p as f64).sqrt());
    let mut sigma2 = 0.0;
    for _ in 0..500 {
        let w = gram_apply(&v);
        let norm = w.norm();
        if norm == 0.0 {
            sigma2 = 0.0;
            break;
        }
        sigma2 = norm;
        v = w / norm;
    }
    if sigma2 == 0.0 {
        // Design is identically zero after centering; solution is all zeros.
        return (y_mean, vec![0.0; p]);
    }
    let lip = 2.0 * sigma2 / n as f64;
    let step = 1.0 / lip;

    let soft = |z: f64, t: f64| -> f64 {
        if z > t {
            z - t
        } else if z < -t {
            z + t
        } else {
            0.0
        }
    };
    let kkt_violation = |eta: &DVector<f64>| -> f64 {
        let r = &yc - &xc * eta;
        let g = xc.tr_mul(&r) / n as f64;
        (0..p)
            .map(|j| {
                if eta[j] != 0.0 {
                    (g[j] - lambda * eta[j].signum()).abs()
                } else {
                    (g[j].abs() - lambda).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    };

    let mut eta: DVector<f64> = DVector::zeros(p);
    let mut z = eta.clone();
    let mut t: f64 = 1.0;
    let mut last_obj = f64::INFINITY;
    for iter in 0..500_000usize {
        let r = &yc - &xc * &z;
        let grad = xc.tr_mul(&r) * (-2.0 / n as f64);
        let mut eta_next = DVector::zeros(p);
        for j in 0..p {
            eta_next[j] = soft(z[j] - step * grad[j], step * 2.0 * lambda);
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        z = &eta_next + (&eta_next - &eta) * momentum;
        eta = eta_next;
        t = t_next;
        if iter % 10 == 0 {
            let resid = &yc - &xc * &eta;
            let obj = resid.norm_squared() / n as f64 + 2.0 * lambda * eta.abs().sum();
            // Adaptive restart on objective increase.
            if obj > last_obj {
                z = eta.clone();
                t = 1.0;
            }
            last_obj = obj;
            if kkt_violation(&eta) <= kkt_tol {
                break;
            }
        }
    }
    let final_kkt = kkt_violation(&eta);
    assert!(
        final_kkt <= kkt_tol,
        "FISTA oracle did not converge: kkt violation {final_kkt:.3e} > {kkt_tol:.1e}"
    );
    let b0 = y_mean
        - col_means
            .iter()
            .zip(eta.iter())
            .map(|(m, e)| m * e)
            .sum::<f64>();
    (b0, eta.iter().copied().collect())
}
