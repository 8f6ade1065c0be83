use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid configuration `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error(
        "no overshoot n puts the trap frequency inside the window; nearest candidate \
         omega = {nearest_omega:.6e} rad/s at n = {nearest_n}"
    )]
    NoFeasibleFrequency { nearest_omega: f64, nearest_n: u64 },

    #[error("grid too coarse: pulse windows of batches {first} and {second} overlap")]
    GridTooCoarse { first: usize, second: usize },

    #[error("no closed kick sequence for N = {n_pulses} after {starts} starts")]
    NoClosedSolution { n_pulses: usize, starts: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("report has no `{0}` series")]
    MissingSeries(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for each error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } | Error::Contract(_) => 1,
            Error::InvalidConfig { .. } | Error::ConfigParse(_) => 2,
            Error::NoFeasibleFrequency { .. } => 3,
            Error::GridTooCoarse { .. } => 4,
            Error::Verification(_) => 5,
            Error::MissingSeries(_) => 6,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 7,
            Error::NoClosedSolution { .. } => 8,
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig { key: key.into(), reason: reason.into() }
    }
}
