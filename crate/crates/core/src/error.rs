use std::fmt;

use crate::series::ConditionViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Arithmetic precondition failed (zero denominator and the like).
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller asked for something unsupported: bad base, empty formula, unknown name.
    #[error("usage error: {0}")]
    Usage(String),

    /// A descriptor could not be evaluated at all (q(j) = 0, b(i) = 0, ...).
    #[error("descriptor error: {0}")]
    Descriptor(String),

    /// The series does not satisfy the admissibility conditions on the planned range.
    #[error("series {series} rejected: {violation}")]
    Condition {
        series: String,
        violation: ConditionViolation,
    },

    /// Descriptor file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A Horner iterate escaped the magnitude bound. This is an implementation bug.
    #[error("{0}")]
    StateBound(StateBoundBreach),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateBoundBreach {
    pub series: String,
    pub step: u64,
    pub bound: String,
    pub observed_bits: u64,
}

impl fmt::Display for StateBoundBreach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "horner iterate {} of {} reached the bound (i+1)*r1*W = {} ({} mantissa bits)",
            self.step, self.series, self.bound, self.observed_bits
        )
    }
}
