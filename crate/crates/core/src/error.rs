use std::fmt;

/// Errors surfaced by the library. Out-of-range indices on the query
/// structures panic instead (they are programmer errors, not run-time
/// conditions a caller can recover from).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input file or generator produced no elements.
    EmptyInput,
    /// Malformed token in a text input file.
    Parse { line: usize, token: String },
    /// I/O failure while reading an input file.
    Io(String),
    /// An allocation would push the meter past its budget. Tests treat
    /// this as a failed space bound, not a recoverable condition.
    BudgetExceeded {
        label: String,
        requested_bits: u64,
        budget_bits: u64,
    },
    /// A region was released against a meter that did not allocate it.
    UnknownRegion,
    /// A survival mask with no set bits was pushed onto a wavelet stack.
    EmptyLevel,
    /// A caller-supplied parameter is outside the supported range.
    Parameter(String),
    /// An internal algorithmic invariant failed. Always a bug.
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty input"),
            Error::Parse { line, token } => {
                write!(f, "parse error at line {line}: invalid token {token:?}")
            }
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
            Error::BudgetExceeded {
                label,
                requested_bits,
                budget_bits,
            } => write!(
                f,
                "workspace budget exceeded ({label}, requested {requested_bits} bits, budget {budget_bits} bits)"
            ),
            Error::UnknownRegion => write!(f, "release of a region unknown to this meter"),
            Error::EmptyLevel => write!(f, "empty level refused"),
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::InvariantViolation(msg) => write!(f, "invariant violation: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
