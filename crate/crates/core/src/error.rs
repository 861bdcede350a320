use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} is not supported (maximum {max})")]
    UnsupportedIndex { index: usize, max: usize },

    #[error("requested {requested} digits exceeds the precision ceiling of {ceiling}")]
    PrecisionCeiling { requested: u32, ceiling: u32 },

    #[error("truncation underflow: {0}")]
    TruncationUnderflow(String),

    #[error("series is not invertible (zero series)")]
    NonInvertible,

    #[error("{what} index {index} outside table range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: i64,
        limit: i64,
    },

    #[error("{what} did not converge before k = {limit}")]
    NonConvergence { what: String, limit: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("table of {requested} bytes exceeds the memory budget of {budget} bytes")]
    Capacity { requested: u64, budget: u64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("accuracy target missed: estimated tail {tail:.3e} exceeds {target:.3e}")]
    Accuracy { tail: f64, target: f64 },

    #[error("Dirichlet expansion invalid: |zeta'/zeta / f| = {ratio:.4} >= 1")]
    ExpansionInvalid { ratio: f64 },

    #[error("singularity at s = {re} + {im}i")]
    Singularity { re: f64, im: f64 },

    #[error("missed zero in window [{t_lo}, {t_hi}]: found {found}, expected {expected}")]
    MissedZero {
        t_lo: f64,
        t_hi: f64,
        found: usize,
        expected: i64,
    },

    #[error("data integrity error at line {line}: {reason}")]
    DataIntegrity { line: usize, reason: String },

    #[error("no single interior maximum in gap ({gamma_lo}, {gamma_hi})")]
    MultimodalGap { gamma_lo: f64, gamma_hi: f64 },

    #[error("ordering error: {0}")]
    Ordering(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
