//! Shared domain types: the rating configuration, lobbies, and closed rating
//! intervals, plus the JSON formats they are read from.
//!
//! Config files hold one JSON object with the seven [`RatingConfig`] fields.
//! Lobby files are newline-delimited JSON, one `{"id", "ranks", "enqueued_at"}`
//! object per line. Ranks are clamped to the configured caps when a lobby
//! file is parsed, so everything downstream can assume in-range ratings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Global parameter block for the matchmaker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct RatingConfig<T> {
    /// Lower rating cap.
    pub x_lcap: T,
    /// Upper rating cap.
    pub x_ucap: T,
    /// Number of skill buckets.
    pub n_bucket: usize,
    /// Minimum bucket width, in rating points.
    pub w_min: T,
    /// Minimum range overlap for a pairing to pass the prefilter.
    pub theta_r: T,
    /// Maximum sanction score accepted by the threshold strategy.
    pub theta_s: T,
    /// Players per lobby.
    pub lobby_size: usize,
}

impl<T: Scalar> RatingConfig<T> {
    /// Width of the capped rating domain.
    pub fn range(&self) -> T {
        self.x_ucap - self.x_lcap
    }

    /// Checks every config invariant.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.x_lcap.is_finite() && self.x_ucap.is_finite()) {
            return invalid("rating caps must be finite".into());
        }
        if !(self.x_lcap < self.x_ucap) {
            return invalid(format!(
                "x_lcap ({}) must be below x_ucap ({})",
                self.x_lcap, self.x_ucap
            ));
        }
        if self.n_bucket == 0 {
            return invalid("n_bucket must be at least 1".into());
        }
        if !(self.w_min > T::zero() && self.w_min.is_finite()) {
            return invalid(format!("w_min ({}) must be positive", self.w_min));
        }
        if T::of_usize(self.n_bucket) * self.w_min > self.range() {
            return Err(Error::InfeasibleBuckets {
                n_bucket: self.n_bucket,
                w_min: self.w_min.to_f64_lossy(),
                range: self.range().to_f64_lossy(),
            });
        }
        if !(self.theta_r >= T::zero() && self.theta_r <= T::one()) {
            return invalid(format!("theta_r ({}) must lie in [0, 1]", self.theta_r));
        }
        if !(self.theta_s >= T::zero()) {
            return invalid(format!("theta_s ({}) must be nonnegative", self.theta_s));
        }
        if self.lobby_size == 0 {
            return invalid("lobby_size must be at least 1".into());
        }
        Ok(())
    }
}

impl<T: Scalar> Default for RatingConfig<T> {
    /// Caps [0, 3000], 20 buckets of at least 150 points, five-player lobbies.
    fn default() -> Self {
        Self {
            x_lcap: T::zero(),
            x_ucap: T::of(3000.0),
            n_bucket: 20,
            w_min: T::of(150.0),
            theta_r: T::of(0.5),
            theta_s: T::of(10.0),
            lobby_size: 5,
        }
    }
}

/// Parses and validates a JSON config object.
pub fn parse_config<T: Scalar>(bytes: &[u8]) -> Result<RatingConfig<T>> {
    let config: RatingConfig<T> = serde_json::from_slice(bytes).map_err(|e| Error::Malformed {
        line: e.line(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

/// A pre-made team waiting in the queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct Lobby<T> {
    pub id: String,
    pub ranks: Vec<T>,
    /// Caller-supplied monotonic tick, not wall-clock time.
    pub enqueued_at: u64,
}

impl<T: Scalar> Lobby<T> {
    pub fn new(id: impl Into<String>, ranks: Vec<T>, enqueued_at: u64) -> Self {
        Self {
            id: id.into(),
            ranks,
            enqueued_at,
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Clamps every rank into the configured caps.
    pub fn clamped(mut self, config: &RatingConfig<T>) -> Self {
        for r in &mut self.ranks {
            *r = clamp_rating(*r, config);
        }
        self
    }
}

/// Closed rating interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lower: T, upper: T) -> Result<Self> {
        if lower <= upper {
            Ok(Self { lower, upper })
        } else {
            Err(Error::InvalidInterval {
                lower: lower.to_f64_lossy(),
                upper: upper.to_f64_lossy(),
            })
        }
    }

    pub fn length(&self) -> T {
        self.upper - self.lower
    }
}

/// Pins a rating into `[x_lcap, x_ucap]`.
pub fn clamp_rating<T: Scalar>(rank: T, config: &RatingConfig<T>) -> T {
    rank.max(config.x_lcap).min(config.x_ucap)
}

/// Parses newline-delimited lobby records without size checks or clamping.
/// Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_lobby_records<T: Scalar>(bytes: &[u8]) -> Result<Vec<Lobby<T>>> {
    let mut lobbies = Vec::new();
    for (i, line) in bytes.split(|&b| b == b'\n').enumerate() {
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let lobby: Lobby<T> = serde_json::from_slice(line).map_err(|e| Error::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        lobbies.push(lobby);
    }
    Ok(lobbies)
}

/// Parses a lobby file, checks every lobby has `lobby_size` ranks, and
/// clamps ranks to the caps. Lobbies are returned in file order.
pub fn parse_lobby_file<T: Scalar>(bytes: &[u8], config: &RatingConfig<T>) -> Result<Vec<Lobby<T>>> {
    parse_lobby_records(bytes)?
        .into_iter()
        .map(|lobby| {
            if lobby.len() != config.lobby_size {
                return Err(Error::LobbySize {
                    expected: config.lobby_size,
                    found: lobby.len(),
                    id: lobby.id,
                });
            }
            Ok(lobby.clamped(config))
        })
        .collect()
}

/// Writes lobbies in the newline-delimited lobby file format.
pub fn serialize_lobbies<T: Scalar>(lobbies: &[Lobby<T>]) -> String {
    let mut out = String::new();
    for lobby in lobbies {
        out.push_str(&serde_json::to_string(lobby).expect("lobby serializes to JSON"));
        out.push('\n');
    }
    out
}
