use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed case file: {0}")]
    Parse(#[from] serde_json::Error),

    /// A named case invariant does not hold; `path` points at the offending field.
    #[error("validation failed at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("chromosome has {got} bits but the case has {expected} candidate lines")]
    ChromosomeLength { expected: usize, got: usize },

    #[error("month {0} is outside 1..=12")]
    MonthOutOfRange(u32),

    #[error("injections do not balance: net {net} MW over a gross {gross} MW")]
    UnbalancedInjections { net: f64, gross: f64 },

    #[error("susceptance system is singular: bus {bus} carries injection but is not connected to the slack bus")]
    SingularSystem { bus: u32 },

    #[error("no online generators")]
    NoGenerators,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitiesNotNormalized(f64),

    #[error("no line has congestion probability above the threshold")]
    NoEligibleLines,

    #[error("network capacity did not change between sizing iterations")]
    ZeroCapacityChange,

    #[error("sizing trace needs at least two iterations")]
    TraceTooShort,

    #[error("resample budget of {budget} exhausted without an admissible contingency state")]
    ResampleExhausted { budget: usize },

    #[error("deterministic enumeration retained no admissible contingency state")]
    NoAdmissibleStates,
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
