//! FIFO lobby queue running the two-stage pipeline.
//!
//! Each queued lobby carries its non-outlier range and sorted bucket indices,
//! both computed once at enqueue. Matching a candidate first checks range
//! overlap against every entry it visits; only entries that pass go on to the
//! sanction score. The queue counts both kinds of evaluation.
//!
//! Two strategies are supported:
//!
//! - [`Strategy::Threshold`] takes the first entry in queue order whose score
//!   is within `theta_s`.
//! - [`Strategy::Argmin`] scores every passing entry and takes the lowest,
//!   preferring the longest-waiting entry on ties.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::bucketing::{build_bucket_scheme, BucketScheme};
use crate::error::{Error, Result};
use crate::fairness::sorted_distance;
use crate::model::{Interval, Lobby, RatingConfig};
use crate::prefilter::{non_outlier_range, ruzicka_overlap};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    #[default]
    Threshold,
    Argmin,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "threshold" => Ok(Self::Threshold),
            "argmin" => Ok(Self::Argmin),
            other => Err(format!("unknown strategy `{other}` (expected threshold or argmin)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Threshold => "threshold",
            Self::Argmin => "argmin",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult<T> {
    /// The candidate.
    pub lobby_a: String,
    /// The queued lobby it was paired with.
    pub lobby_b: String,
    pub ruzicka: T,
    pub sanction: u64,
}

/// Evaluation counts, for checking how much work the prefilter saves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub prefilter: u64,
    pub sanction: u64,
}

#[derive(Debug, Clone)]
struct Entry<T> {
    lobby: Lobby<T>,
    range: Interval<T>,
    indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MatchQueue<T> {
    entries: VecDeque<Entry<T>>,
    ids: HashSet<String>,
    config: RatingConfig<T>,
    scheme: BucketScheme<T>,
    strategy: Strategy,
    counters: Counters,
}

impl<T: Scalar> MatchQueue<T> {
    pub fn new(config: RatingConfig<T>, strategy: Strategy) -> Result<Self> {
        config.validate()?;
        let scheme = build_bucket_scheme(&config)?;
        Ok(Self {
            entries: VecDeque::new(),
            ids: HashSet::new(),
            config,
            scheme,
            strategy,
            counters: Counters::default(),
        })
    }

    pub fn config(&self) -> &RatingConfig<T> {
        &self.config
    }

    pub fn scheme(&self) -> &BucketScheme<T> {
        &self.scheme
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    /// Queued lobbies with their cached non-outlier ranges, in queue order.
    pub fn iter(&self) -> impl Iterator<Item = (&Lobby<T>, &Interval<T>)> {
        self.entries.iter().map(|e| (&e.lobby, &e.range))
    }

    fn prepare(&self, lobby: Lobby<T>) -> Result<Entry<T>> {
        if lobby.len() != self.config.lobby_size {
            return Err(Error::LobbySize {
                expected: self.config.lobby_size,
                found: lobby.len(),
                id: lobby.id,
            });
        }
        let lobby = lobby.clamped(&self.config);
        let range = non_outlier_range(&lobby, &self.config);
        let indices = self.scheme.sorted_indices(&lobby.ranks);
        Ok(Entry {
            lobby,
            range,
            indices,
        })
    }

    /// Adds a lobby behind every entry enqueued at or before its tick.
    pub fn enqueue(&mut self, lobby: Lobby<T>) -> Result<()> {
        if self.ids.contains(&lobby.id) {
            return Err(Error::DuplicateId(lobby.id));
        }
        let entry = self.prepare(lobby)?;
        self.insert(entry);
        Ok(())
    }

    fn insert(&mut self, entry: Entry<T>) {
        self.ids.insert(entry.lobby.id.clone());
        let at = entry.lobby.enqueued_at;
        if self.entries.back().is_none_or(|e| e.lobby.enqueued_at <= at) {
            self.entries.push_back(entry);
        } else {
            let pos = self.entries.partition_point(|e| e.lobby.enqueued_at <= at);
            self.entries.insert(pos, entry);
        }
    }

    fn remove_at(&mut self, pos: usize) -> Entry<T> {
        let entry = self.entries.remove(pos).expect("position in range");
        self.ids.remove(&entry.lobby.id);
        entry
    }

    /// Pairs `candidate` with the first entry in queue order that passes the
    /// prefilter and scores within `theta_s`. The matched entry is removed.
    pub fn find_match_threshold(&mut self, candidate: Lobby<T>) -> Result<Option<MatchResult<T>>> {
        let candidate = self.prepare(candidate)?;
        Ok(self.match_entry(&candidate, Strategy::Threshold))
    }

    /// Pairs `candidate` with the lowest-scoring entry among those passing
    /// the prefilter. The matched entry is removed.
    pub fn find_match_argmin(&mut self, candidate: Lobby<T>) -> Result<Option<MatchResult<T>>> {
        let candidate = self.prepare(candidate)?;
        Ok(self.match_entry(&candidate, Strategy::Argmin))
    }

    /// Runs the queue's configured strategy for `candidate`.
    pub fn find_match(&mut self, candidate: Lobby<T>) -> Result<Option<MatchResult<T>>> {
        let candidate = self.prepare(candidate)?;
        Ok(self.match_entry(&candidate, self.strategy))
    }

    fn match_entry(&mut self, candidate: &Entry<T>, strategy: Strategy) -> Option<MatchResult<T>> {
        let theta_r = self.config.theta_r;
        let theta_s = self.config.theta_s;
        // (position, overlap, score) of the chosen entry
        let mut chosen: Option<(usize, T, u64)> = None;

        for (pos, entry) in self.entries.iter().enumerate() {
            self.counters.prefilter += 1;
            let overlap = ruzicka_overlap(&candidate.range, &entry.range);
            if overlap < theta_r {
                continue;
            }
            self.counters.sanction += 1;
            let score = sorted_distance(&candidate.indices, &entry.indices);
            match strategy {
                Strategy::Threshold => {
                    if T::from_u64(score).is_some_and(|s| s <= theta_s) {
                        chosen = Some((pos, overlap, score));
                        break;
                    }
                }
                Strategy::Argmin => {
                    if chosen.is_none_or(|(_, _, best)| score < best) {
                        chosen = Some((pos, overlap, score));
                    }
                }
            }
        }

        let (pos, ruzicka, sanction) = chosen?;
        let matched = self.remove_at(pos);
        Some(MatchResult {
            lobby_a: candidate.lobby.id.clone(),
            lobby_b: matched.lobby.id,
            ruzicka,
            sanction,
        })
    }

    /// Drains the queue once: each head in turn is matched against the rest
    /// under the configured strategy. Unmatched heads return to the queue
    /// afterwards in their original relative order.
    pub fn match_pass(&mut self) -> Vec<MatchResult<T>> {
        let mut matches = Vec::new();
        let mut unmatched = Vec::new();
        while !self.entries.is_empty() {
            let head = self.remove_at(0);
            match self.match_entry(&head, self.strategy) {
                Some(result) => matches.push(result),
                None => unmatched.push(head),
            }
        }
        for entry in unmatched {
            self.insert(entry);
        }
        matches
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> RatingConfig<f64> {
        RatingConfig {
            x_lcap: 0.0,
            x_ucap: 1000.0,
            n_bucket: 3,
            w_min: 100.0,
            theta_r: 0.5,
            theta_s: 10.0,
            lobby_size: 2,
        }
    }

    fn lobby(id: &str, ranks: [f64; 2], at: u64) -> Lobby<f64> {
        Lobby::new(id, ranks.to_vec(), at)
    }

    fn queue(strategy: Strategy) -> MatchQueue<f64> {
        MatchQueue::new(config(), strategy).unwrap()
    }

    #[test]
    fn strategy_parses() {
        assert_eq!("argmin".parse::<Strategy>().unwrap(), Strategy::Argmin);
        assert_eq!("threshold".parse::<Strategy>().unwrap(), Strategy::Threshold);
        assert!("best".parse::<Strategy>().is_err());
        assert_eq!(Strategy::Argmin.to_string(), "argmin");
    }

    #[test]
    fn enqueue_rules() {
        let mut q = queue(Strategy::Threshold);
        q.enqueue(lobby("a", [500.0, 500.0], 0)).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.counters(), Counters::default());
        assert_eq!(
            q.enqueue(lobby("a", [100.0, 100.0], 1)),
            Err(Error::DuplicateId("a".into()))
        );
        let short = Lobby::new("s", vec![1.0], 2);
        assert!(matches!(q.enqueue(short), Err(Error::LobbySize { .. })));
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn enqueue_clamps_and_caches_range() {
        let mut q = queue(Strategy::Threshold);
        q.enqueue(lobby("a", [2000.0, 1000.0], 0)).unwrap();
        let (l, r) = q.iter().next().unwrap();
        assert_eq!(l.ranks, vec![1000.0, 1000.0]);
        assert_eq!(*r, non_outlier_range(l, q.config()));
    }

    #[test]
    fn late_arrival_with_early_tick_is_ordered() {
        let mut q = queue(Strategy::Threshold);
        q.enqueue(lobby("a", [500.0, 500.0], 5)).unwrap();
        q.enqueue(lobby("b", [500.0, 500.0], 9)).unwrap();
        q.enqueue(lobby("c", [500.0, 500.0], 5)).unwrap();
        q.enqueue(lobby("d", [500.0, 500.0], 1)).unwrap();
        let ids: Vec<_> = q.iter().map(|(l, _)| l.id.as_str()).collect();
        assert_eq!(ids, ["d", "a", "c", "b"]);
    }

    #[test]
    fn threshold_on_empty_queue() {
        let mut q = queue(Strategy::Threshold);
        assert_eq!(q.find_match_threshold(lobby("c", [500.0, 500.0], 0)).unwrap(), None);
        assert_eq!(q.counters(), Counters::default());
    }

    #[test]
    fn threshold_identical_lobby() {
        let mut q = queue(Strategy::Threshold);
        q.enqueue(lobby("a", [480.0, 520.0], 0)).unwrap();
        let m = q.find_match_threshold(lobby("c", [480.0, 520.0], 1)).unwrap().unwrap();
        assert_eq!((m.lobby_a.as_str(), m.lobby_b.as_str()), ("c", "a"));
        assert_eq!(m.ruzicka, 1.0);
        assert_eq!(m.sanction, 0);
        assert!(q.is_empty());
    }

    #[test]
    fn threshold_skips_disjoint_without_scoring() {
        let mut q = queue(Strategy::Threshold);
        q.enqueue(lobby("far", [50.0, 50.0], 0)).unwrap();
        q.enqueue(lobby("same", [900.0, 900.0], 1)).unwrap();
        let m = q.find_match_threshold(lobby("c", [900.0, 900.0], 2)).unwrap().unwrap();
        assert_eq!(m.lobby_b, "same");
        assert_eq!(q.counters(), Counters { prefilter: 2, sanction: 1 });
        assert_eq!(q.len(), 1);
        assert!(q.contains("far"));
    }

    #[test]
    fn threshold_miss_leaves_queue_intact() {
        let mut q = MatchQueue::new(
            RatingConfig {
                theta_r: 0.0,
                theta_s: 1.0,
                ..config()
            },
            Strategy::Threshold,
        )
        .unwrap();
        q.enqueue(lobby("a", [0.0, 0.0], 0)).unwrap();
        assert_eq!(q.find_match_threshold(lobby("c", [1000.0, 1000.0], 1)).unwrap(), None);
        assert_eq!(q.len(), 1);
        assert_eq!(q.counters(), Counters { prefilter: 1, sanction: 1 });
    }

    #[test]
    fn argmin_prefers_lowest_score() {
        // Buckets [0,450) [450,550) [550,1000]: candidate sits in bucket 1.
        let mut q = MatchQueue::new(
            RatingConfig {
                theta_r: 0.0,
                ..config()
            },
            Strategy::Argmin,
        )
        .unwrap();
        q.enqueue(lobby("high", [600.0, 600.0], 0)).unwrap(); // [2,2], score 2
        q.enqueue(lobby("low", [440.0, 440.0], 1)).unwrap(); // [0,0], score 2
        q.enqueue(lobby("mid", [460.0, 540.0], 2)).unwrap(); // [1,1], score 0
        let m = q.find_match_argmin(lobby("c", [500.0, 500.0], 3)).unwrap().unwrap();
        assert_eq!(m.lobby_b, "mid");
        assert_eq!(m.sanction, 0);
        assert_eq!(q.counters(), Counters { prefilter: 3, sanction: 3 });
    }

    #[test]
    fn argmin_scores_two_and_four() {
        let mut q = MatchQueue::new(
            RatingConfig {
                theta_r: 0.0,
                ..config()
            },
            Strategy::Argmin,
        )
        .unwrap();
        q.enqueue(lobby("far", [900.0, 900.0], 0)).unwrap(); // [2,2] vs [0,0]: 4
        q.enqueue(lobby("near", [500.0, 500.0], 1)).unwrap(); // [1,1] vs [0,0]: 2
        let m = q.find_match_argmin(lobby("c", [10.0, 10.0], 2)).unwrap().unwrap();
        assert_eq!((m.lobby_b.as_str(), m.sanction), ("near", 2));
    }

    #[test]
    fn argmin_tie_goes_to_earliest() {
        let mut q = queue(Strategy::Argmin);
        q.enqueue(lobby("second", [500.0, 500.0], 4)).unwrap();
        q.enqueue(lobby("first", [500.0, 500.0], 2)).unwrap();
        let m = q.find_match_argmin(lobby("c", [500.0, 500.0], 5)).unwrap().unwrap();
        assert_eq!(m.lobby_b, "first");
    }

    #[test]
    fn argmin_with_no_passers() {
        let mut q = queue(Strategy::Argmin);
        assert_eq!(q.find_match_argmin(lobby("c", [500.0, 500.0], 0)).unwrap(), None);
        q.enqueue(lobby("far", [0.0, 0.0], 0)).unwrap();
        assert_eq!(q.find_match_argmin(lobby("c", [1000.0, 1000.0], 1)).unwrap(), None);
        assert_eq!(q.counters(), Counters { prefilter: 1, sanction: 0 });
    }

    #[test]
    fn pass_on_two_identical() {
        let mut q = queue(Strategy::Threshold);
        q.enqueue(lobby("a", [500.0, 500.0], 0)).unwrap();
        q.enqueue(lobby("b", [500.0, 500.0], 1)).unwrap();
        let m = q.match_pass();
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].lobby_a.as_str(), m[0].lobby_b.as_str()), ("a", "b"));
        assert!(q.is_empty());
    }

    #[test]
    fn pass_on_single_lobby() {
        let mut q = queue(Strategy::Argmin);
        q.enqueue(lobby("a", [500.0, 500.0], 0)).unwrap();
        assert!(q.match_pass().is_empty());
        assert_eq!(q.len(), 1);
        assert!(q.contains("a"));
    }

    #[test]
    fn pass_pairs_interleaved_clusters() {
        // Ranges: 1 and 3 sit at [0,300], 2 and 4 at [700,1000]; the floor
        // half-width is 1000/3, so low ranges are [0, 333.3] and high ones
        // [666.7, 1000]: disjoint.
        for strategy in [Strategy::Threshold, Strategy::Argmin] {
            let mut q = queue(strategy);
            q.enqueue(lobby("1", [0.0, 0.0], 0)).unwrap();
            q.enqueue(lobby("2", [1000.0, 1000.0], 1)).unwrap();
            q.enqueue(lobby("3", [0.0, 0.0], 2)).unwrap();
            q.enqueue(lobby("4", [1000.0, 1000.0], 3)).unwrap();
            let m = q.match_pass();
            let pairs: Vec<_> = m.iter().map(|r| (r.lobby_a.as_str(), r.lobby_b.as_str())).collect();
            assert_eq!(pairs, [("1", "3"), ("2", "4")]);
            assert!(q.is_empty());
            // 1 checks 2,3,4 stops at 3 (threshold) or scans all (argmin).
            let c = q.counters();
            assert!(c.sanction < c.prefilter);
        }
    }

    #[test]
    fn unmatched_heads_return_in_order() {
        let mut q = queue(Strategy::Threshold);
        q.enqueue(lobby("a", [0.0, 0.0], 0)).unwrap();
        q.enqueue(lobby("b", [1000.0, 1000.0], 1)).unwrap();
        q.enqueue(lobby("c", [500.0, 500.0], 2)).unwrap();
        assert!(q.match_pass().is_empty());
        let ids: Vec<_> = q.iter().map(|(l, _)| l.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
    }
}
