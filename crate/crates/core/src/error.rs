use thiserror::Error;

/// Errors produced by graph construction, gluing and the other kernels.
///
/// Everything that can be rejected is rejected with a structured error so the
/// CLI can map domain failures to a stable exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArcError {
    #[error("dangling half-edge: pairing at boundary {boundary} slot {slot} is out of range or not an involution")]
    DanglingHalfEdge { boundary: usize, slot: usize },

    #[error("arc with both endpoints on boundary {boundary} (slots {slot_a}, {slot_b}) is not supported")]
    SameBoundaryArc {
        boundary: usize,
        slot_a: usize,
        slot_b: usize,
    },

    #[error("boundary {boundary} has an empty window; every boundary must be hit by at least one arc")]
    EmptyWindow { boundary: usize },

    #[error("arcs {arc_a} and {arc_b} are parallel; parallel arcs must be consolidated")]
    ParallelArcs { arc_a: usize, arc_b: usize },

    #[error("region decoration invalid: {reason}")]
    BadRegionDecoration { reason: String },

    #[error("underlying surface is disconnected")]
    Disconnected,

    #[error("graph is not of tree type (some arc misses boundary 0)")]
    NotGTree,

    #[error("graph is not cyclically compatible at boundary {boundary}")]
    NotCGTree { boundary: usize },

    #[error("weight or gap must be positive, got {value} at index {index}")]
    NonPositiveWeight { value: String, index: usize },

    #[error("gap invariant violated: parallel adjacent arcs {arc_a} and {arc_b} separated by a zero gap")]
    GapInvariant { arc_a: usize, arc_b: usize },

    #[error("boundary index {index} out of range for arity {arity}")]
    BoundaryOutOfRange { index: usize, arity: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("region-surgery integrality failure: {reason}")]
    SurgeryIntegrity { reason: String },

    #[error("unsupported cell type: {reason}")]
    UnsupportedCell { reason: String },

    #[error("enumeration bound too large: estimated {estimate} raw candidates exceeds limit {limit}")]
    EnumerationTooLarge { estimate: u128, limit: u128 },

    #[error("not a Frobenius algebra: {reason}")]
    BadAlgebra { reason: String },

    #[error("malformed input: {reason}")]
    Malformed { reason: String },
}

pub type Result<T> = std::result::Result<T, ArcError>;
