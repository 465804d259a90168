use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix dimension {0} exceeds the supported maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("state vector has squared norm {0}; expected 1 within 1e-12")]
    NotUnitNorm(f64),

    #[error("cannot normalize a (near-)zero vector")]
    ZeroVector,

    #[error("outcome index {index} out of range for {count} outcomes")]
    OutcomeIndexOutOfRange { index: usize, count: usize },

    #[error("conditioning on an outcome of probability {0:.3e}")]
    ZeroProbabilityOutcome(f64),

    #[error("probability {0:.6e} lies outside [0, 1] beyond numerical tolerance")]
    ProbabilityOutOfRange(f64),

    #[error("angle settings must target particle 1 then particle 2: {0}")]
    LegMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no matched coincidences; correlation undefined")]
    NoMatchedPairs,

    #[error("missing correlation for setting pair ({0}, {1})")]
    MissingCorrelation(String, String),

    #[error("correlation value {0} has magnitude greater than 1")]
    CorrelationOutOfRange(f64),

    #[error("problem has {0} variables; the atom enumeration is capped at {1}")]
    TooManyVariables(usize, usize),

    #[error("malformed feasibility problem: {0}")]
    MalformedProblem(String),

    #[error("simplex iteration budget of {0} exhausted")]
    IterationBudget(usize),

    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
