//! Monte-Carlo distribution of sanction scores over random lobby pairings.
//!
//! Each lobby's ratings are independent normal draws, clamped to the caps.
//! The pairing range is cut into fixed partitions of [`PARTITION_SIZE`]
//! pairings. Partition `p` draws from a ChaCha8 generator seeded with
//! `seed_from_u64(seed)` on stream `p`, so every partition's stream is fixed
//! by `(seed, p)` alone. Partial histograms are merged by addition, so the
//! result does not depend on how many workers run the partitions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bucketing::{build_bucket_scheme, BucketScheme};
use crate::error::{Error, Result};
use crate::fairness::sorted_distance;
use crate::model::{clamp_rating, Lobby, RatingConfig};
use crate::scalar::Scalar;

/// Pairings per rng stream.
pub const PARTITION_SIZE: u64 = 16_384;

/// Pairing count used when none is given.
pub const DEFAULT_PAIRINGS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams<T> {
    pub n_pairings: u64,
    pub seed: u64,
    /// Mean of the rating generator.
    pub gen_mu: T,
    /// Standard deviation of the rating generator.
    pub gen_sigma: T,
    pub config: RatingConfig<T>,
}

impl<T: Scalar> SimParams<T> {
    /// Generator centred on the rating range with `sigma = range / 6`.
    pub fn with_default_generator(config: RatingConfig<T>, n_pairings: u64, seed: u64) -> Self {
        Self {
            n_pairings,
            seed,
            gen_mu: (config.x_lcap + config.x_ucap) / T::of(2.0),
            gen_sigma: config.range() / T::of(6.0),
            config,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if !self.gen_mu.is_finite() {
            return Err(Error::InvalidParams(format!("gen_mu ({}) must be finite", self.gen_mu)));
        }
        if !(self.gen_sigma >= T::zero() && self.gen_sigma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gen_sigma ({}) must be finite and nonnegative",
                self.gen_sigma
            )));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let z: f64 = rng.sample(StandardNormal);
        clamp_rating(self.gen_mu + self.gen_sigma * T::of(z), &self.config)
    }
}

/// Draws one lobby of `lobby_size` clamped normal ratings.
pub fn generate_lobby<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    params: &SimParams<T>,
    id: impl Into<String>,
) -> Lobby<T> {
    let ranks = (0..params.config.lobby_size).map(|_| params.draw(rng)).collect();
    Lobby::new(id, ranks, 0)
}

/// Rng for partition `partition` of a run seeded with `seed`.
pub fn partition_rng(seed: u64, partition: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(partition);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub median: u64,
    pub mode: u64,
    /// Moment coefficient of skewness; `None` when the variance is zero.
    pub skewness: Option<f64>,
}

/// Counts of integer sanction scores.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScoreHistogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl ScoreHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Self {
        let counts: BTreeMap<u64, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let total = counts.values().sum();
        Self { counts, total }
    }

    pub fn record(&mut self, score: u64) {
        *self.counts.entry(score).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &ScoreHistogram) {
        for (&score, &count) in &other.counts {
            *self.counts.entry(score).or_insert(0) += count;
        }
        self.total += other.total;
    }

    /// Nonzero counts keyed by score, ascending.
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn summary(&self) -> Result<Summary> {
        summarize(&self.counts)
    }

    /// `score,count` rows followed by `# key=value` summary comments.
    /// Statistics that are undefined for this histogram print as `undefined`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("score,count\n");
        for (score, count) in &self.counts {
            let _ = writeln!(out, "{score},{count}");
        }
        let _ = writeln!(out, "# total={}", self.total);
        match self.summary() {
            Ok(s) => {
                let _ = writeln!(out, "# mean={:?}", s.mean);
                let _ = writeln!(out, "# median={}", s.median);
                let _ = writeln!(out, "# mode={}", s.mode);
                match s.skewness {
                    Some(g1) => {
                        let _ = writeln!(out, "# skewness={g1:?}");
                    }
                    None => out.push_str("# skewness=undefined\n"),
                }
            }
            Err(_) => {
                for key in ["mean", "median", "mode", "skewness"] {
                    let _ = writeln!(out, "# {key}=undefined");
                }
            }
        }
        out
    }
}

/// Mean, median, mode and skewness of a score histogram.
///
/// The median is the smallest score whose cumulative count reaches
/// `ceil(total / 2)`; the mode is the smallest score with the highest count.
pub fn summarize(counts: &BTreeMap<u64, u64>) -> Result<Summary> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::UndefinedStatistic("mean"));
    }
    let n = total as f64;
    let weighted: u128 = counts.iter().map(|(&s, &c)| s as u128 * c as u128).sum();
    let mean = weighted as f64 / n;

    let half = total.div_ceil(2);
    let mut cumulative = 0;
    let mut median = 0;
    for (&s, &c) in counts {
        cumulative += c;
        if cumulative >= half {
            median = s;
            break;
        }
    }

    let mut mode = 0;
    let mut best = 0;
    for (&s, &c) in counts {
        if c > best {
            best = c;
            mode = s;
        }
    }

    let (mut m2, mut m3) = (0.0, 0.0);
    for (&s, &c) in counts {
        let d = s as f64 - mean;
        m2 += c as f64 * d * d;
        m3 += c as f64 * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    let skewness = (total >= 2 && m2 > 0.0).then(|| m3 / m2.powf(1.5));

    Ok(Summary {
        mean,
        median,
        mode,
        skewness,
    })
}

fn run_partition<T: Scalar>(
    params: &SimParams<T>,
    scheme: &BucketScheme<T>,
    partition: u64,
    pairings: u64,
) -> Vec<u64> {
    let size = params.config.lobby_size;
    let max_score = size * (params.config.n_bucket - 1);
    let mut counts = vec![0u64; max_score + 1];
    let mut rng = partition_rng(params.seed, partition);
    let mut a = vec![0usize; size];
    let mut b = vec![0usize; size];
    for _ in 0..pairings {
        for slot in a.iter_mut().chain(b.iter_mut()) {
            *slot = scheme.bucket_of(params.draw(&mut rng));
        }
        a.sort_unstable();
        b.sort_unstable();
        counts[sorted_distance(&a, &b) as usize] += 1;
    }
    counts
}

/// Runs the simulation on rayon's global pool.
pub fn run_simulation<T: Scalar>(params: &SimParams<T>) -> Result<ScoreHistogram> {
    params.validate()?;
    let scheme = build_bucket_scheme(&params.config)?;
    let partitions = params.n_pairings.div_ceil(PARTITION_SIZE);
    let max_score = params.config.lobby_size * (params.config.n_bucket - 1);

    let merged = (0..partitions)
        .into_par_iter()
        .map(|p| {
            let start = p * PARTITION_SIZE;
            let len = PARTITION_SIZE.min(params.n_pairings - start);
            run_partition(params, &scheme, p, len)
        })
        .reduce(
            || vec![0u64; max_score + 1],
            |mut acc, part| {
                for (a, c) in acc.iter_mut().zip(part) {
                    *a += c;
                }
                acc
            },
        );

    let counts = merged
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(s, c)| (s as u64, c))
        .collect();
    Ok(ScoreHistogram::from_counts(counts))
}

/// Runs the simulation on a dedicated pool of `workers` threads.
pub fn run_simulation_with_workers<T: Scalar>(
    params: &SimParams<T>,
    workers: usize,
) -> Result<ScoreHistogram> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    pool.install(|| run_simulation(params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u64, seed: u64) -> SimParams<f64> {
        SimParams::with_default_generator(RatingConfig::default(), n, seed)
    }

    #[test]
    fn zero_sigma_lobby_is_constant() {
        let p = SimParams {
            gen_sigma: 0.0,
            gen_mu: 1234.5,
            ..params(1, 0)
        };
        let l = generate_lobby(&mut partition_rng(0, 0), &p, "g");
        assert_eq!(l.ranks, vec![1234.5; 5]);
    }

    #[test]
    fn generation_is_seeded() {
        let p = params(1, 42);
        let a = generate_lobby(&mut partition_rng(42, 3), &p, "a");
        let b = generate_lobby(&mut partition_rng(42, 3), &p, "a");
        assert_eq!(a, b);
        let c = generate_lobby(&mut partition_rng(42, 4), &p, "a");
        assert_ne!(a, c);
    }

    #[test]
    fn far_mean_clamps_to_cap() {
        let p = SimParams {
            gen_sigma: 0.0,
            gen_mu: 6000.0,
            ..params(1, 0)
        };
        let l = generate_lobby(&mut partition_rng(0, 0), &p, "g");
        assert_eq!(l.ranks, vec![3000.0; 5]);
    }

    #[test]
    fn empty_run() {
        let h = run_simulation(&params(0, 1)).unwrap();
        assert_eq!(h.total(), 0);
        assert!(h.counts().is_empty());
        assert!(h.summary().is_err());
    }

    #[test]
    fn zero_sigma_run_is_all_zero() {
        let p = SimParams {
            gen_sigma: 0.0,
            ..params(40_000, 9)
        };
        let h = run_simulation(&p).unwrap();
        assert_eq!(h.counts(), &BTreeMap::from([(0, 40_000)]));
    }

    #[test]
    fn repeat_runs_match() {
        let a = run_simulation(&params(1000, 5)).unwrap();
        let b = run_simulation(&params(1000, 5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 1000);
    }

    #[test]
    fn negative_sigma_rejected() {
        let p = SimParams {
            gen_sigma: -1.0,
            ..params(10, 0)
        };
        assert!(matches!(run_simulation(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn summarize_constant() {
        let s = summarize(&BTreeMap::from([(0, 10)])).unwrap();
        assert_eq!((s.mean, s.median, s.mode, s.skewness), (0.0, 0, 0, None));
    }

    #[test]
    fn summarize_symmetric() {
        let s = summarize(&BTreeMap::from([(0, 1), (1, 1), (2, 1)])).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.median, 1);
        assert_eq!(s.skewness, Some(0.0));
    }

    #[test]
    fn summarize_skewed() {
        // m2 = 0.1875, m3 = 0.09375, g1 = 0.09375 / 0.1875^1.5
        let s = summarize(&BTreeMap::from([(0, 3), (1, 1)])).unwrap();
        assert_eq!(s.mean, 0.25);
        assert_eq!(s.median, 0);
        assert_eq!(s.mode, 0);
        assert!((s.skewness.unwrap() - 1.1547005383792515).abs() < 1e-12);
    }

    #[test]
    fn summarize_empty_is_undefined() {
        assert!(summarize(&BTreeMap::new()).is_err());
    }

    #[test]
    fn mode_prefers_smallest_on_ties() {
        let s = summarize(&BTreeMap::from([(3, 2), (7, 2), (9, 1)])).unwrap();
        assert_eq!(s.mode, 3);
    }

    #[test]
    fn csv_layout() {
        let h = ScoreHistogram::from_counts(BTreeMap::from([(0, 3), (1, 1), (5, 0)]));
        assert_eq!(
            h.to_csv(),
            "score,count\n0,3\n1,1\n# total=4\n# mean=0.25\n# median=0\n# mode=0\n# skewness=1.1547005383792515\n"
        );
        let empty = ScoreHistogram::new().to_csv();
        assert!(empty.starts_with("score,count\n# total=0\n"));
    }

    #[test]
    fn record_and_merge() {
        let mut a = ScoreHistogram::new();
        a.record(3);
        a.record(3);
        let mut b = ScoreHistogram::new();
        b.record(1);
        a.merge(&b);
        assert_eq!(a.counts(), &BTreeMap::from([(1, 1), (3, 2)]));
        assert_eq!(a.total(), 3);
    }
}
