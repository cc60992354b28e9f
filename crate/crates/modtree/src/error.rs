use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModtreeError {
    #[error("children rule produces C({generation}) = 0; every edge must have at least one child")]
    ZeroChildrenRule { generation: usize },

    #[error("non-positive weight {weight} at {location}")]
    NonPositiveWeight { weight: f64, location: String },

    #[error("leaves at different depths ({depth_a} and {depth_b}); path family requires uniform depth")]
    NonUniformDepth { depth_a: usize, depth_b: usize },

    #[error("edge {edge} references parent {parent} which is not an earlier edge")]
    OrphanEdge { edge: usize, parent: usize },

    #[error("shell size at generation {generation} exceeds the configured big-integer limit")]
    OverflowBeyondRepresentable { generation: usize },

    #[error("truncation would contain {edges} edges, above the cap of {cap}")]
    TooLarge { edges: u64, cap: u64 },

    #[error("exponent p = {p} is out of range for this operation; use the dedicated endpoint operation")]
    DegenerateExponent { p: f64 },

    #[error("spec has no decidable tail rule; infinite-tree classification requires one")]
    NoTailRule,

    #[error("density/flow has {got} entries but the tree has {expected} edges")]
    IndexMismatch { expected: usize, got: usize },

    #[error("iteration limit {limit} reached before convergence (best value {best})")]
    IterationLimit { limit: usize, best: f64 },

    #[error("flow is invalid: {reason}")]
    InvalidFlow { reason: String },

    #[error("modulus classification is inconclusive; cannot derive a prediction")]
    InconclusiveModulus,

    #[error("growth of the skip sequence is not decidable from the rule")]
    UndecidableGrowth,

    #[error("weight rule is not uniformly elliptic (bounded above and below away from zero)")]
    NotElliptic,

    #[error("{0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, ModtreeError>;
