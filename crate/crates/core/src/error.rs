use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("{what} weight must be positive and finite, got {value}")]
    NonPositiveWeight { what: &'static str, value: f64 },
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} given in both orientations with different weights ({2} vs {3})")]
    AsymmetricWeight(usize, usize, f64, f64),
    #[error("graph is not connected ({components} components)")]
    Disconnected { components: usize },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(VertexId),
    #[error("unknown vertex label {0:?}")]
    UnknownLabel(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(EdgeId),
    #[error("cochain length {got} does not match graph ({expected})")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands belong to different graphs")]
    GraphMismatch,
    #[error("no admissible coordinates")]
    EmptyAdmissibleSet,
    #[error("constraint set is empty")]
    EmptyConstraint,
    #[error("solver breakdown: {0}")]
    SolverBreakdown(String),
    #[error("no convergence after {iterations} iterations (best estimate {estimate}, bracket [{lower}, {upper}])")]
    NoConvergence {
        iterations: usize,
        estimate: f64,
        lower: f64,
        upper: f64,
    },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("core has {core} vertices, cannot host {rays} rays at distinct vertices")]
    CoreTooSmall { core: usize, rays: usize },
    #[error("subtree of {vertex:?} has {available} generations, {required} required")]
    InsufficientDepth {
        vertex: VertexId,
        required: usize,
        available: usize,
    },
    #[error("{what} lies within distance {distance} of the frontier (buffer {buffer})")]
    FrontierContamination {
        what: &'static str,
        distance: usize,
        buffer: usize,
    },
    #[error("invalid test region: {0}")]
    InvalidRegion(String),
    #[error("graph is not a tree")]
    NotATree,
    #[error("malformed graph file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
