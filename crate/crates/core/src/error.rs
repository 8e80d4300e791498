//! Error taxonomy shared by every module.
//!
//! The variants are grouped by how a caller should react: `InvalidSpec` means
//! the request itself is malformed, `Hypothesis` means a documented
//! precondition of the experiment fails (the message names it), and
//! `ToleranceNotMet` means the numerics ran out of budget before reaching the
//! requested accuracy.  `Overflow` is not a crash: evaluation returns it as a
//! tagged value and the norm scans treat it as evidence of unboundedness.

use thiserror::Error;

/// Magnitude ceiling above which evaluation reports a tagged overflow.
pub const OVERFLOW_CEILING: f64 = 1e300;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point outside the open unit disc: |z| = {modulus}")]
    OutsideDisc { modulus: f64 },

    #[error("evaluation overflow: magnitude exceeded {ceiling:e}")]
    Overflow { ceiling: f64 },

    #[error("tolerance not met: achieved {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    /// A hypothesis of the statement under test fails; the message names it.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("coefficient window is empty; increase the coefficient count past {0}")]
    NeedLargerN(usize),

    #[error("ill-conditioned growth fit: {0}")]
    IllConditionedFit(String),

    #[error("not subexponential on the test grid: log M(r)/r stays above {bound} up to r = {r_max:e}")]
    NotSubexponential { bound: f64, r_max: f64 },

    #[error("integration contour stays too close to a zero after {attempts} nudges")]
    ContourNearZero { attempts: u32 },

    #[error("winding number {value} is not within 0.25 of an integer")]
    NonIntegerWinding { value: f64 },

    #[error("cell budget of {budget} exhausted before all zeros were isolated")]
    CellBudgetExceeded { budget: usize },

    #[error("located multiplicities sum to {located} but the winding count is {counted}")]
    ZeroCountMismatch { counted: i64, located: i64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code contract used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidSpec(_) => 2,
            Error::ToleranceNotMet { .. }
            | Error::NonIntegerWinding { .. }
            | Error::CellBudgetExceeded { .. }
            | Error::ZeroCountMismatch { .. }
            | Error::ContourNearZero { .. } => 3,
            Error::Hypothesis(_)
            | Error::DegenerateInput(_)
            | Error::NeedLargerN(_)
            | Error::IllConditionedFit(_)
            | Error::NotSubexponential { .. }
            | Error::OutsideDisc { .. }
            | Error::Overflow { .. } => 4,
        }
    }
}
