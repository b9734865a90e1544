//! Small numeric helpers shared across modules.
//!
//! Reductions are written with fixed four-lane accumulators so results are
//! bit-for-bit reproducible across runs and thread counts while still
//! vectorizing well.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dot product with a fixed summation order.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let chunks = n / 4;
    let mut acc = [0.0f64; 4];
    for i in 0..chunks {
        let k = 4 * i;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..n {
        sum += a[k] * b[k];
    }
    sum
}

/// Sum of squares with the same fixed order as [`dot`].
#[inline]
pub(crate) fn sum_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Arithmetic mean; 0.0 for an empty slice.
#[inline]
pub(crate) fn mean(a: &[f64]) -> f64 {
    if a.is_empty() {
        0.0
    } else {
        sum(a) / a.len() as f64
    }
}

/// Sum with a fixed four-lane order.
#[inline]
pub(crate) fn sum(a: &[f64]) -> f64 {
    let n = a.len();
    let chunks = n / 4;
    let mut acc = [0.0f64; 4];
    for i in 0..chunks {
        let k = 4 * i;
        acc[0] += a[k];
        acc[1] += a[k + 1];
        acc[2] += a[k + 2];
        acc[3] += a[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for v in &a[4 * chunks..] {
        s += v;
    }
    s
}

/// Unbiased sample variance (denominator `n - 1`); 0.0 when `n < 2`.
pub(crate) fn sample_var(a: &[f64]) -> f64 {
    if a.len() < 2 {
        return 0.0;
    }
    let m = mean(a);
    let ss: f64 = a.iter().map(|v| (v - m) * (v - m)).sum();
    ss / (a.len() - 1) as f64
}

/// `count` points log-spaced from `hi` down to `lo` inclusive (strictly
/// decreasing). Requires `hi > lo > 0` and `count >= 2`.
pub(crate) fn log_space_desc(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    debug_assert!(hi > lo && lo > 0.0 && count >= 2);
    let (lh, ll) = (hi.ln(), lo.ln());
    (0..count)
        .map(|i| {
            let frac = i as f64 / (count - 1) as f64;
            (lh + frac * (ll - lh)).exp()
        })
        .collect()
}

/// The `k`-th smallest value of `values`, 1-indexed (`k = 1` is the minimum).
/// Panics if `k` is 0 or exceeds the length.
pub(crate) fn kth_smallest(values: &[f64], k: usize) -> f64 {
    assert!(k >= 1 && k <= values.len(), "order statistic out of range");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite order statistic"));
    sorted[k - 1]
}

/// The `k`-th largest value of `values`, 1-indexed (`k = 1` is the maximum).
pub(crate) fn kth_largest(values: &[f64], k: usize) -> f64 {
    assert!(k >= 1 && k <= values.len(), "order statistic out of range");
    kth_smallest(values, values.len() + 1 - k)
}

/// A deterministic RNG for (`seed`, `stream`). Streams let independent
/// replicates draw from non-overlapping sequences, so running replicates in
/// parallel or serially yields identical results.
pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive_order_free_sum() {
        let a: Vec<f64> = (0..13).map(|i| i as f64 * 0.25 - 1.0).collect();
        let b: Vec<f64> = (0..13).map(|i| (i as f64).sin()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }

    #[test]
    fn log_space_endpoints_and_monotonicity() {
        let g = log_space_desc(2.0, 2e-4, 100);
        assert_eq!(g.len(), 100);
        assert!((g[0] - 2.0).abs() < 1e-12);
        assert!((g[99] - 2e-4).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn order_statistics_are_nearest_rank() {
        let v = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.0];
        assert_eq!(kth_smallest(&v, 1), 1.0);
        assert_eq!(kth_smallest(&v, 3), 2.6);
        assert_eq!(kth_largest(&v, 1), 9.0);
        assert_eq!(kth_largest(&v, 2), 5.0);
    }

    #[test]
    fn rng_streams_are_independent_of_each_other() {
        use rand::RngCore;
        let a = rng_for(7, 0).next_u64();
        let b = rng_for(7, 1).next_u64();
        let a2 = rng_for(7, 0).next_u64();
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }
}
