//! Two-stage lobby matchmaking.
//!
//! Stage one compares each lobby's non-outlier rating range (mean plus or
//! minus a floored standard deviation) using the continuous Ruzicka index and
//! discards pairings that barely overlap. Stage two maps every player onto
//! non-uniform skill buckets, narrow near the middle of the rating range, and
//! scores the pairing with the 1D Wasserstein distance between the two
//! lobbies' sorted bucket indices: the *sanction score*.
//!
//! All rating math is generic over [`Scalar`] (`f32` or `f64`). Concrete
//! aliases for both are exported at the crate root.
//!
//! ```
//! use cinder_core::{build_bucket_scheme, sanction_score_lobbies, LobbyF64, RatingConfigF64};
//!
//! let config = RatingConfigF64::default();
//! let scheme = build_bucket_scheme(&config).unwrap();
//! let a = LobbyF64::new("a", vec![1200.0, 1350.0, 1500.0, 1600.0, 2900.0], 0);
//! let b = LobbyF64::new("b", vec![1250.0, 1300.0, 1550.0, 1700.0, 1800.0], 1);
//! assert_eq!(sanction_score_lobbies(&a, &b, &scheme).unwrap(), 9);
//! ```

// Negated float comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bucketing;
pub mod error;
pub mod fairness;
pub mod matchmaker;
pub mod model;
pub mod prefilter;
pub mod scalar;
pub mod simulator;

pub use bucketing::{build_bucket_scheme, lobby_to_sorted_indices, rank_to_bucket, BucketScheme};
pub use error::{Error, Result};
pub use fairness::{assignment_oracle, sanction_score, sanction_score_lobbies};
pub use matchmaker::{Counters, MatchQueue, MatchResult, Strategy};
pub use model::{
    clamp_rating, parse_config, parse_lobby_file, parse_lobby_records, serialize_lobbies, Interval,
    Lobby, RatingConfig,
};
pub use prefilter::{non_outlier_range, passes_prefilter, range_stats, ruzicka_overlap, RangeStats};
pub use scalar::Scalar;
pub use simulator::{
    generate_lobby, run_simulation, run_simulation_with_workers, summarize, ScoreHistogram,
    SimParams, Summary,
};

pub type RatingConfigF64 = RatingConfig<f64>;
pub type RatingConfigF32 = RatingConfig<f32>;
pub type LobbyF64 = Lobby<f64>;
pub type LobbyF32 = Lobby<f32>;
pub type IntervalF64 = Interval<f64>;
pub type IntervalF32 = Interval<f32>;
pub type BucketSchemeF64 = BucketScheme<f64>;
pub type BucketSchemeF32 = BucketScheme<f32>;
pub type MatchQueueF64 = MatchQueue<f64>;
pub type MatchQueueF32 = MatchQueue<f32>;
pub type MatchResultF64 = MatchResult<f64>;
pub type MatchResultF32 = MatchResult<f32>;
pub type SimParamsF64 = SimParams<f64>;
pub type SimParamsF32 = SimParams<f32>;
