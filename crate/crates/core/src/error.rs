use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("infeasible bucket config: {n_bucket} buckets of minimum width {w_min} exceed the rating range {range}")]
    InfeasibleBuckets {
        n_bucket: usize,
        w_min: f64,
        range: f64,
    },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("lobby `{id}` has {found} ranks, expected {expected}")]
    LobbySize {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("lobbies `{a}` ({a_len} players) and `{b}` ({b_len} players) differ in size")]
    SizeMismatch {
        a: String,
        a_len: usize,
        b: String,
        b_len: usize,
    },

    #[error("index lists differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("index lists must be nonempty")]
    EmptyInput,

    #[error("assignment oracle supports at most {max} elements, got {len}")]
    OracleTooLarge { len: usize, max: usize },

    #[error("invalid interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("lobby `{0}` is already queued")]
    DuplicateId(String),

    #[error("{0} is undefined for this histogram")]
    UndefinedStatistic(&'static str),

    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),

    #[error("worker pool: {0}")]
    WorkerPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
