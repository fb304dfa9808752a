use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("grid must have at least one cell")]
    EmptyGrid,
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("grid data has {actual} cells, expected {expected}")]
    GridSizeMismatch { expected: usize, actual: usize },
    #[error("no free roadmap vertex")]
    EmptyRoadmap,
    #[error("vertex index {0} out of range")]
    InvalidVertex(usize),
    #[error("endpoint ({x}, {y}) is not on a roadmap vertex")]
    EndpointNotOnRoadmap { x: f64, y: f64 },
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("trajectory does not end at the goal")]
    NotSatisfying,
    #[error("invalid plan query: {0}")]
    InvalidQuery(String),
    #[error("need {needed} endpoints but only {available} exist")]
    InsufficientEndpoints { needed: usize, available: usize },
    #[error("could not place robots after {0} attempts")]
    PlacementFailed(usize),
    #[error("solution does not solve the instance")]
    UnsolvedInstance,
    #[error("runtimes must be positive, got {central} and {decentral}")]
    NonpositiveRuntime { central: f64, decentral: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
