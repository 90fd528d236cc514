use thiserror::Error;

use crate::lp::LpSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which strict payoff inequality a target violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// `reward > cost` fails.
    Defender,
    /// `att_reward > att_cost` fails.
    Attacker,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// `target` is a 0-based index.
    #[error("strict payoff ordering violated at target {} ({kind:?} payoffs)", target + 1)]
    StrictnessViolated { target: usize, kind: Strictness },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("set system has no pure strategies")]
    EmptySystem,

    #[error("search exceeded the node budget of {budget}")]
    ScaleExceeded { budget: u64 },

    #[error("fewer than {required} source-to-sink paths exist")]
    InfeasibleFlow { required: usize },

    #[error("game is not zero-sum")]
    NotZeroSum,

    #[error("target utility {requested} outside the equilibrium range [{worst}, {best}]")]
    UtilityOutOfRange { requested: f64, worst: f64, best: f64 },

    /// `residual` is `x - sum_e p_e e` at the phase-one optimum; a nonzero
    /// residual separates the point from the hull.
    #[error("point is not in the convex hull (phase-one residual {total:.3e})")]
    NotInHull { total: f64, residual: Vec<f64> },

    #[error("iteration limit {iterations} reached")]
    IterationLimit { iterations: usize, best: Option<Box<LpSolution>> },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("linear program is {0}")]
    LpStatus(&'static str),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("{field}: {source}")]
    Field {
        field: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }

    /// Strips `Field` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Field { source, .. } => source.root(),
            other => other,
        }
    }

    /// Model errors are problems with the input; everything else is a
    /// solver failure.
    pub fn is_numerical(&self) -> bool {
        matches!(self.root(), Error::NumericalBreakdown(_) | Error::IterationLimit { .. } | Error::LpStatus(_))
    }
}
