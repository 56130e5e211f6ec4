use thiserror::Error;

pub type Result<T, E = HarosError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarosError {
    #[error("0 has no continued fraction expansion [a_1, ..., a_m]")]
    ZeroValue,
    #[error("{0} lies outside the unit interval")]
    OutsideUnitInterval(String),
    #[error("{left} and {right} are not Farey neighbours")]
    NotAdjacent { left: String, right: String },
    #[error("{0} is a root of the Farey tree and has no descent path")]
    NoDescentPath(String),
    #[error("invalid continued fraction terms: {0}")]
    InvalidTerms(String),
    #[error("degree {degree} is not supported here (expected {expected})")]
    UnsupportedDegree { degree: String, expected: &'static str },
    #[error("Farey order must be at least 1")]
    InvalidOrder,
    #[error("{what} of {requested} exceeds the cap of {cap}")]
    ResourceCap {
        what: &'static str,
        requested: String,
        cap: String,
    },
    #[error("the seed graph has no boundary node to identify")]
    SeedGraph,
    #[error("{x} is not a finite value in (0, 1)")]
    InvalidReal { x: String },
    #[error("{x} is within rounding distance of the breakpoint {breakpoint}")]
    AmbiguousBreakpoint { x: String, breakpoint: String },
}

impl HarosError {
    pub(crate) fn cap(what: &'static str, requested: impl ToString, cap: impl ToString) -> Self {
        HarosError::ResourceCap {
            what,
            requested: requested.to_string(),
            cap: cap.to_string(),
        }
    }

    /// True for the errors raised by size guards rather than invalid input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, HarosError::ResourceCap { .. })
    }
}
