use thiserror::Error;

use crate::scene::ObjectId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point lies behind the viewer")]
    BehindView,
    #[error("vector is too short to have a direction")]
    DegenerateVector,
    #[error("view frame is not orthonormal")]
    InvalidFrame,
    #[error("gaze timestamp {got} does not follow {previous}")]
    NonMonotonicTimestamp { previous: f64, got: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("no labels to lay out")]
    EmptyLabelSet,
    #[error("label anchor {0} is not a scene object")]
    UnresolvedAnchor(ObjectId),
    #[error("layout parameters are invalid: {0}")]
    InvalidParams(&'static str),
    #[error("method {0} has no layout")]
    Unsupported(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("flight start and end coincide")]
    DegenerateFlight,
    #[error("curve parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("event {event} is not valid in phase {phase}")]
    InvalidTransition {
        phase: &'static str,
        event: &'static str,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("target {0} is not in the scene")]
    UnknownTarget(ObjectId),
    #[error("scene has no objects")]
    EmptyScene,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
