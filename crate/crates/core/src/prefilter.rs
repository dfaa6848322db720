//! Stage one: cheap rejection of pairings whose core skill ranges barely
//! overlap.
//!
//! Each lobby is summarized by its non-outlier range, `mean ± spread`, where
//! the spread is the population standard deviation floored at
//! `(x_ucap - x_lcap) / n_bucket`. Two ranges are compared with the
//! continuous Ruzicka index (intersection length over union length).

use crate::model::{Interval, Lobby, RatingConfig};
use crate::scalar::Scalar;

/// Intermediate statistics behind a non-outlier range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeStats<T> {
    pub mean: T,
    /// Population standard deviation.
    pub std_dev: T,
    /// Standard deviation floored at the minimum half-width.
    pub spread: T,
}

impl<T: Scalar> RangeStats<T> {
    /// `[mean - spread, mean + spread]` before clamping to the caps.
    pub fn unclamped(&self) -> Interval<T> {
        Interval {
            lower: self.mean - self.spread,
            upper: self.mean + self.spread,
        }
    }
}

/// Mean, population standard deviation and floored spread of `ranks`.
/// `ranks` must be nonempty.
pub fn range_stats<T: Scalar>(ranks: &[T], config: &RatingConfig<T>) -> RangeStats<T> {
    let n = T::of_usize(ranks.len());
    let mean = ranks.iter().fold(T::zero(), |acc, &r| acc + r) / n;
    let var = ranks
        .iter()
        .map(|&r| (r - mean) * (r - mean))
        .fold(T::zero(), |acc, x| acc + x)
        / n;
    let std_dev = var.sqrt();
    let floor = config.range() / T::of_usize(config.n_bucket);
    RangeStats {
        mean,
        std_dev,
        spread: std_dev.max(floor),
    }
}

/// The lobby's non-outlier range, clamped to the rating caps.
pub fn non_outlier_range<T: Scalar>(lobby: &Lobby<T>, config: &RatingConfig<T>) -> Interval<T> {
    let raw = range_stats(&lobby.ranks, config).unclamped();
    Interval {
        lower: raw.lower.max(config.x_lcap),
        upper: raw.upper.min(config.x_ucap),
    }
}

/// Continuous Ruzicka similarity of two intervals, in `[0, 1]`.
pub fn ruzicka_overlap<T: Scalar>(a: &Interval<T>, b: &Interval<T>) -> T {
    let inter = (a.upper.min(b.upper) - a.lower.max(b.lower)).max(T::zero());
    let union = a.length() + b.length() - inter;
    if union > T::zero() {
        // Rounding in `union` can leave the ratio a hair above one.
        (inter / union).min(T::one())
    } else if a == b {
        T::one()
    } else {
        T::zero()
    }
}

pub fn passes_prefilter<T: Scalar>(a: &Lobby<T>, b: &Lobby<T>, config: &RatingConfig<T>) -> bool {
    let ra = non_outlier_range(a, config);
    let rb = non_outlier_range(b, config);
    ruzicka_overlap(&ra, &rb) >= config.theta_r
}
