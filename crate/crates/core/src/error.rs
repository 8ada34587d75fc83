use thiserror::Error;

/// Errors raised by the algebraic engines and the text grammars.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown decoration `{0}`")]
    UnknownDecoration(String),
    #[error("pole of order {order} exceeds the configured bound {bound}")]
    PoleOverflow { order: i32, bound: i32 },
    #[error("limit at z = 0 does not exist: pole of order {pole_order} remains")]
    LimitDoesNotExist { pole_order: i32 },
    #[error("series known only through z^{known}, z^{needed} required")]
    InsufficientPrecision { needed: i32, known: i32 },
    #[error("functional truncated at degree {available}, degree {needed} required")]
    InsufficientTruncation { needed: u32, available: u32 },
    #[error("expected a functional of kind {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("functionals are defined over different alphabets")]
    AlphabetMismatch,
    #[error("character is not local: pole of order {pole_order} survives on {tree}")]
    NonLocal { tree: String, pole_order: i32 },
    #[error("bidegree is undefined for elements with nonzero counit")]
    BidegreeUndefined,
    #[error("requested degree {requested} exceeds the safety bound {bound}")]
    SafetyBound { requested: u32, bound: u32 },
    #[error("{0} is not a member of the Hall set")]
    NotHallMember(String),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("t-degree {degree} exceeds the truncation order {order}")]
    TruncationOverflow { degree: u32, order: u32 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// Parse errors versus semantic failures; the CLI maps these to distinct exit codes.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::UnknownDecoration(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
