use thiserror::Error;

use crate::map::{FactorId, ValidationReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(ValidationReport),

    #[error("unknown factor `{0}`")]
    UnknownFactor(FactorId),

    #[error("factor id collision: `{0}` already exists")]
    IdCollision(FactorId),

    #[error("aggregation weight {weight} for `{factor}` outside [−1,1]")]
    AggregationWeight { factor: FactorId, weight: f64 },

    #[error("vector length {got} does not match factor count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("schedule step {step} exceeds horizon {horizon}")]
    ScheduleBeyondHorizon { step: usize, horizon: usize },

    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),

    #[error("all edges locked and spectral radius {rho} ≥ 1")]
    AllEdgesLocked { rho: f64 },

    #[error("locked edge {0} is not an edge of the map")]
    UnknownEdge(String),

    #[error("closure matrices have mismatched shapes")]
    ShapeMismatch,

    #[error("map has no target factor")]
    NoTarget,

    #[error("factor `{0}` is not a target factor")]
    NotTarget(FactorId),

    #[error("factor `{0}` is not a control factor")]
    NotControl(FactorId),

    #[error("schedule touches non-control factor `{0}`")]
    NonControlImpulse(FactorId),

    #[error("no control factors given")]
    NoControls,

    #[error("scenario `{name}`: {reason}")]
    InvalidScenario { name: String, reason: String },

    #[error("scenario `{name}` has horizon {got}, target expects {expected}")]
    HorizonMismatch { name: String, expected: usize, got: usize },

    #[error("target unreachable: every control gain is zero")]
    Unreachable,

    #[error(transparent)]
    Knowledge(#[from] crate::knowledge::KnowledgeError),
}
