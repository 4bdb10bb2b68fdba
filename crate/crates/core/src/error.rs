use thiserror::Error;

use crate::annulus::NodeKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degree ≥ 1 required")]
    DegreeZero,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("value already at target (|t - f(v)| = {0:e})")]
    AtTarget(f64),
    #[error("all Taylor coefficients of positive order vanish")]
    DegenerateConstant,
    #[error("base point lies outside the radius cap")]
    OutsideRadiusCap,
    #[error("step at order {order} does not decrease the residual in floating point")]
    NoNumericalDecrease { order: usize },

    #[error("series must satisfy a00 = 0 and a01 != 0")]
    NotSolvable,
    #[error("no radii satisfy the contraction recipe")]
    NoConvergentRadii,
    #[error("contraction stalled: distance ratio {ratio}")]
    ContractionStall { ratio: f64 },

    #[error("no sign change bracketing {kind:?}-node {index}")]
    BracketFailure { kind: NodeKind, index: usize },
    #[error("boundary nodes do not interleave")]
    InterleavingViolation,

    #[error("tracer step underflow at ({x}, {y})")]
    StepUnderflow { x: f64, y: f64 },
    #[error("tracer exceeded its step budget")]
    TraceBudgetExceeded,
    #[error("no boundary node inside the snap window")]
    NodeSnapAmbiguity,
    #[error("matching inconsistency: {0}")]
    MatchingInconsistency(String),
    #[error("arcs {first} and {second} of the same field come within {distance:e}")]
    ArcMerge { first: usize, second: usize, distance: f64 },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("no Miranda box found for the crossing")]
    LocalizationFailure,

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Innermost error, with stage labels stripped.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root_cause(),
            e => e,
        }
    }
}
