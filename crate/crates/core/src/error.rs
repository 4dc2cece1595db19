use alloc::string::String;
use core::fmt;

use crate::position::Position;

/// A resource limit that stopped a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cap {
    /// `size` saturates at `u64::MAX` for sizes that do not fit.
    TermSize {
        size: u64,
        cap: u64,
    },
    PathLength {
        length: usize,
        cap: usize,
    },
    PatternLength {
        k: usize,
        cap: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// The position does not address a subterm.
    InvalidPosition(Position),
    /// The position addresses a subterm that is not a β-redex.
    NotARedex(Position),
    ResourceCap(Cap),
    /// Chain link `index` does not relate its two terms by the stated step.
    LinkInvalid {
        index: usize,
    },
    /// Path step `index` does not continue from the previous term.
    BrokenPath {
        index: usize,
    },
    AppendMismatch,
    PeakMismatch,
    OrderViolation {
        left: u64,
        right: u64,
    },
    IndexOutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },
    /// A constructed object failed its own validation.
    Replay(String),
    /// A bound function was applied outside its domain.
    BoundDomain(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPosition(p) => write!(f, "invalid position {p}"),
            Error::NotARedex(p) => write!(f, "no redex at position {p}"),
            Error::ResourceCap(Cap::TermSize {
                size: u64::MAX,
                cap,
            }) => {
                write!(f, "term size beyond 2^64 exceeds cap {cap}")
            }
            Error::ResourceCap(Cap::TermSize { size, cap }) => {
                write!(f, "term size {size} exceeds cap {cap}")
            }
            Error::ResourceCap(Cap::PathLength { length, cap }) => {
                write!(f, "path length {length} exceeds cap {cap}")
            }
            Error::ResourceCap(Cap::PatternLength { k, cap }) => {
                write!(f, "pattern length {k} exceeds cap {cap}")
            }
            Error::LinkInvalid { index } => {
                write!(f, "link {index} is not a single β-step between its terms")
            }
            Error::BrokenPath { index } => write!(f, "path step {index} is not chained"),
            Error::AppendMismatch => f.write_str("chains do not meet at a common pivot term"),
            Error::PeakMismatch => f.write_str("peak paths do not start at the same term"),
            Error::OrderViolation { left, right } => {
                write!(f, "order violation: {left} > {right}")
            }
            Error::IndexOutOfRange { start, end, len } => {
                write!(
                    f,
                    "range [{start}, {end}] out of bounds for chain of length {len}"
                )
            }
            Error::Replay(msg) => write!(f, "replay failed: {msg}"),
            Error::BoundDomain(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParsePositionError;

impl fmt::Display for ParsePositionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected `root` or a dot-separated list of Fun/Arg/Body")
    }
}

impl core::error::Error for ParsePositionError {}

/// A syntax error in term text, with 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl core::error::Error for ParseError {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
