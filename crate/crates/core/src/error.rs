use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid Young function: {0}")]
    InvalidYoung(String),

    #[error("complementary function is unbounded at y = {y}")]
    UnboundedConjugate { y: f64 },

    #[error("degenerate probe: phi({x}) = 0 above x0")]
    DegenerateProbe { x: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("absolute continuity violated: point {point:?} carries mass but is outside the dominating support")]
    NotAbsolutelyContinuous { point: Vec<f64> },

    #[error("unknown sampler `{0}`")]
    UnknownSampler(String),

    #[error("table has {found} rows but the measure has {expected} support points")]
    Misaligned { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gauge norm bracketing failed after {steps} steps (function not in the Orlicz class numerically)")]
    BracketFailure { steps: usize },

    #[error("invalid network: {0}")]
    Network(String),

    #[error("least-squares solver: {0}")]
    Solver(String),

    #[error("hypothesis `{name}` violated: {detail}")]
    Hypothesis { name: String, detail: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn hypothesis(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            name: name.into(),
            detail: detail.into(),
        }
    }

    /// True when the error reports a violated hypothesis rather than bad input.
    pub fn is_hypothesis(&self) -> bool {
        matches!(self, Error::Hypothesis { .. })
    }
}
