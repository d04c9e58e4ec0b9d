use thiserror::Error;

/// Failure classes for every operation in the crate.
///
/// The CLI maps these onto exit codes through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid diagram: {}", .0.join("; "))]
    InvalidDiagram(Vec<String>),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("level overflow: level {level} beyond materialized level {materialized}")]
    LevelOverflow { level: usize, materialized: usize },
    #[error("horizon exceeded: paths undecided through level {0}")]
    HorizonExceeded(usize),
    #[error("not properly ordered: {0}")]
    NotProperlyOrdered(String),
    #[error("cannot shift a non-stationary diagram with a single level")]
    CannotShift,
    #[error("unique ergodicity not certified: cone diameter {0:e}")]
    UniqueErgodicityNotCertified(f64),
    #[error("Lyapunov estimate unconverged: {estimate} +/- {error:e}")]
    LyapunovUnconverged { estimate: f64, error: f64 },
    #[error("gluing undefined: {0}")]
    GluingUndefined(String),
    #[error("stretch identity violated at level {level}, edge {edge}: error {error:e}")]
    StretchViolated { level: usize, edge: usize, error: f64 },
    #[error("upper bound violated for {0} pairs")]
    UpperBoundViolated(usize),
    #[error("bump smoothness exceeded: r = {0} > 3")]
    BumpSmoothness(usize),
    #[error("gluing/order inconsistency: {0}")]
    Descent(String),
    #[error("rank not stabilized up to level {max_level} (envelope {envelope:?})")]
    RankNotStabilized { max_level: usize, envelope: Vec<usize> },
    #[error("insufficient stabilization level: function level {level} > {stable}")]
    InsufficientLevel { level: usize, stable: usize },
    #[error("obstructed: distributions {0:?}")]
    Obstructed(Vec<String>),
    #[error("norm too large for Neumann regime: {0}")]
    NeumannRegime(f64),
    #[error("cylinder level {level} exceeds cap {cap}")]
    LevelCap { level: usize, cap: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for malformed input, 4 for numeric
    /// non-convergence, 3 for every other violated precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidDiagram(_) | Error::Io(_) => 2,
            Error::UniqueErgodicityNotCertified(_)
            | Error::LyapunovUnconverged { .. }
            | Error::RankNotStabilized { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
