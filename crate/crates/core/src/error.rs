use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("point ({x}, {y}, {z}) is behind the RIS (z must be > 0)")]
    BehindRis { x: f64, y: f64, z: f64 },

    #[error("element ({m}, {n}) is inactive (controller cutout or masked cell)")]
    InactiveElement { m: usize, n: usize },

    #[error("index ({m}, {n}) lies outside the {rows}x{cols} grid")]
    OutOfGrid {
        m: usize,
        n: usize,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported state count {0} (supported: 2, 4)")]
    UnsupportedStates(usize),

    /// Malformed configuration string; `offset` is the zero-based character position.
    #[error("invalid configuration at offset {offset}: {reason}")]
    ConfigFormat { offset: usize, reason: String },

    #[error("the 152-bit diode word is only defined for the 76-element prototype with 4 states")]
    NotPrototype,

    #[error("exhaustive search refused: {count} configurations exceed the cap of {cap}")]
    SearchCapExceeded { count: String, cap: u128 },

    #[error("evaluation failed at step {step}: {source}")]
    Evaluation {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trace replay exhausted after {0} readings")]
    TraceExhausted(usize),

    #[error("placement sampling failed after {attempts} attempts: {constraint}")]
    Placement { attempts: usize, constraint: String },

    #[error("campaign run {run} failed: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("ragged input: iteration count {got} differs from {expected} (run {run})")]
    Ragged {
        run: usize,
        expected: usize,
        got: usize,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("sample {value} at line {line} is outside the ADC range (-2047, 2048]")]
    SampleRange { line: usize, value: i64 },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("radiation field is identically zero")]
    ZeroField,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed user input rather than runtime failures.
    pub fn is_format(&self) -> bool {
        match self {
            Error::ConfigFormat { .. }
            | Error::Parse { .. }
            | Error::SampleRange { .. }
            | Error::UnsupportedStates(_)
            | Error::Domain(_)
            | Error::BehindRis { .. }
            | Error::NotPrototype => true,
            Error::Evaluation { source, .. } | Error::Run { source, .. } => source.is_format(),
            _ => false,
        }
    }

    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::BehindRis { .. } => "behind-ris",
            Error::InactiveElement { .. } => "inactive-element",
            Error::OutOfGrid { .. } => "out-of-grid",
            Error::Dimension { .. } => "dimension",
            Error::UnsupportedStates(_) => "states",
            Error::ConfigFormat { .. } => "config",
            Error::NotPrototype => "not-prototype",
            Error::SearchCapExceeded { .. } => "cap-exceeded",
            Error::Evaluation { .. } => "evaluation",
            Error::TraceExhausted(_) => "trace-exhausted",
            Error::Placement { .. } => "placement",
            Error::Run { .. } => "run",
            Error::Ragged { .. } => "ragged",
            Error::Parse { .. } => "parse",
            Error::SampleRange { .. } => "sample-range",
            Error::Empty(_) => "empty",
            Error::ZeroField => "zero-field",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
