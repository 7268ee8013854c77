//! Error type shared by all modules of the crate.

use crate::geometry::Segment;

/// Errors produced by grid construction, assembly, solvers and diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("grid too coarse: need at least 3 nodes per direction, got {n1}x{n2}")]
    TooCoarse { n1: usize, n2: usize },

    #[error("segment {segment} is not defined on this domain")]
    UnknownSegment { segment: Segment },

    #[error("boundary function mismatch: {0}")]
    BoundaryMismatch(String),

    #[error("coefficient matrix loses ellipticity at ({x}, {y}): min eigenvalue {min_eig} < {alpha}")]
    EllipticityViolated { x: f64, y: f64, min_eig: f64, alpha: f64 },

    #[error("singular system: no Dirichlet segment pins the solution")]
    SingularSystem,

    #[error("linear solver failed: {0}")]
    SolverDivergence(String),

    #[error("operands do not share a grid/assembled system")]
    GridMismatch,

    #[error("mode count mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),

    #[error("bound violated at lambda={lambda}, k={k}: {detail}")]
    BoundViolated { lambda: f64, k: usize, detail: String },

    #[error("inequality violated at mode j={j}")]
    InequalityViolated { j: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
