//! Non-uniform skill buckets.
//!
//! Bucket widths follow an inverted normal density: narrow near the middle
//! of the rating range where most players sit, wide at the extremes. Bucket
//! `i` is placed at the proxy position `z_i = 6 * ((i + 0.5) / n - 0.5)`,
//! i.e. uniform bucket centers spanning three standard deviations either side
//! of the mean. Its deficit `phi(0) - phi(z_i)` decides how much of the range
//! left over after reserving `w_min` per bucket it receives:
//!
//! ```text
//! W_i = w_min + d_i * (R_total - n * w_min) / sum_j d_j
//! ```
//!
//! Buckets are left-closed and right-open, except the last, which also
//! contains the upper cap.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Lobby, RatingConfig};
use crate::scalar::Scalar;

/// Standard normal density.
pub fn standard_normal_pdf<T: Scalar>(z: T) -> T {
    let norm = T::of(1.0 / (2.0 * PI).sqrt());
    norm * (-(z * z) / T::of(2.0)).exp()
}

/// Position of bucket `index` on the standard normal axis.
pub fn proxy_position<T: Scalar>(index: usize, n_bucket: usize) -> T {
    let frac = (T::of_usize(index) + T::of(0.5)) / T::of_usize(n_bucket);
    T::of(6.0) * (frac - T::of(0.5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketScheme<T> {
    boundaries: Vec<T>,
    widths: Vec<T>,
}

impl<T: Scalar> BucketScheme<T> {
    /// `n_bucket + 1` ascending boundaries from `x_lcap` to `x_ucap`.
    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    /// Lower and upper boundary of bucket `index`.
    pub fn bounds(&self, index: usize) -> (T, T) {
        (self.boundaries[index], self.boundaries[index + 1])
    }

    pub fn bucket_of(&self, rank: T) -> usize {
        rank_to_bucket(rank, self)
    }

    pub fn sorted_indices(&self, ranks: &[T]) -> Vec<usize> {
        let mut idx: Vec<usize> = ranks.iter().map(|&r| self.bucket_of(r)).collect();
        idx.sort_unstable();
        idx
    }
}

pub fn build_bucket_scheme<T: Scalar>(config: &RatingConfig<T>) -> Result<BucketScheme<T>> {
    let n = config.n_bucket;
    let range = config.range();
    if n == 0 || !(range > T::zero()) || !(config.w_min > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "cannot bucket range [{}, {}] into {} buckets of minimum width {}",
            config.x_lcap, config.x_ucap, n, config.w_min
        )));
    }
    let reserved = T::of_usize(n) * config.w_min;
    if reserved > range {
        return Err(Error::InfeasibleBuckets {
            n_bucket: n,
            w_min: config.w_min.to_f64_lossy(),
            range: range.to_f64_lossy(),
        });
    }
    if n == 1 {
        return Ok(BucketScheme {
            boundaries: vec![config.x_lcap, config.x_ucap],
            widths: vec![range],
        });
    }

    let phi_max = standard_normal_pdf(T::zero());
    let deficits: Vec<T> = (0..n)
        .map(|i| phi_max - standard_normal_pdf(proxy_position::<T>(i, n)))
        .collect();
    let total_deficit = deficits.iter().fold(T::zero(), |acc, &d| acc + d);
    let scale = (range - reserved) / total_deficit;
    let widths: Vec<T> = deficits.iter().map(|&d| config.w_min + d * scale).collect();

    let mut boundaries = Vec::with_capacity(n + 1);
    let mut edge = config.x_lcap;
    boundaries.push(edge);
    for &w in &widths[..n - 1] {
        edge = edge + w;
        boundaries.push(edge);
    }
    boundaries.push(config.x_ucap);

    Ok(BucketScheme { boundaries, widths })
}

/// Index of the bucket containing `rank`. Ranks at or above the upper cap
/// map to the last bucket; ranks below the lower cap map to the first.
pub fn rank_to_bucket<T: Scalar>(rank: T, scheme: &BucketScheme<T>) -> usize {
    let n = scheme.len();
    let interior = &scheme.boundaries[1..n];
    interior.partition_point(|&b| b <= rank)
}

pub fn lobby_to_sorted_indices<T: Scalar>(lobby: &Lobby<T>, scheme: &BucketScheme<T>) -> Vec<usize> {
    scheme.sorted_indices(&lobby.ranks)
}
