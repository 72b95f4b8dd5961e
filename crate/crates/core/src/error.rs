use thiserror::Error;

/// Vertex fields hold 0-based indices; messages print them 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForestMatError {
    #[error("a digraph needs at least two vertices, got {n}")]
    TooFewVertices { n: usize },
    #[error("loop arc at vertex {}", .vertex + 1)]
    LoopArc { vertex: usize },
    #[error("duplicate arc ({}, {})", .tail + 1, .head + 1)]
    DuplicateArc { tail: usize, head: usize },
    #[error("arc ({}, {}) has a nonpositive weight", .tail + 1, .head + 1)]
    NonpositiveWeight { tail: usize, head: usize },
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("arc ({}, {}) is not in the digraph", .tail + 1, .head + 1)]
    ArcNotInDigraph { tail: usize, head: usize },
    #[error("enumeration estimate {estimate} exceeds the cap {cap}")]
    ExplosionGuard { estimate: u128, cap: u128 },
    #[error("vertex set is not an undominated knot")]
    NotAKnot,
    #[error("forest dimension check failed: {0}")]
    InconsistentDimension(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("vertex subset must be nonempty")]
    EmptySubset,
    #[error("vertex subset must be proper")]
    FullSubset,
    #[error("alpha {alpha} outside (0, {bound})")]
    AlphaOutOfRange { alpha: f64, bound: f64 },
    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),
    #[error("digraph has no arcs")]
    NoArcs,
    #[error("arc ({}, {}) does not have unit weight", .tail + 1, .head + 1)]
    NonUnitWeights { tail: usize, head: usize },
    #[error("entry ({}, {}) contradicts the reachability support", .row + 1, .col + 1)]
    PatternViolation { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("structure cross-check failed: {0}")]
    StructureMismatch(String),
}

pub type Result<T, E = ForestMatError> = std::result::Result<T, E>;
