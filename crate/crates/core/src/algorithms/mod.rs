//! Constant-round procedures expressed as vertex programs, and their
//! composition into a network decomposition plus an approximate minimum
//! coloring.
//!
//! | procedure | communication rounds |
//! |---|---|
//! | [`partition`] | 1 |
//! | [`dominate`] | 4 per iteration |
//! | [`color_bounded_degree`] | at most the round budget |
//! | [`approximate`] | `d + 1` |
//!
//! Failures that the analysis only rules out with high probability (an
//! exhausted round budget, a degree bound that did not hold) are reported as
//! errors for which [`AlgoError::is_whp_event`] is true, never hidden.

mod approximate;
mod color;
mod dominate;
mod exact;
mod merge;
mod partition;
mod pipeline;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineError;
use crate::graph::{GraphError, VertexId};

pub use approximate::{approximate, ApproximateOutput, ApproximateProgram, ApproximateResult, LocalFailure};
pub use color::{color_bounded_degree, ColorMsg, ColorParams, ColorProgram, ColorResult, ColorState, ColorVertexOutput};
pub use dominate::{
    dominate, DominateMsg, DominateParams, DominateProgram, DominateRecord, DominateResult, DominateState,
    DominateVertexOutput,
};
pub use exact::{exact_min_coloring, DEFAULT_CLUSTER_CAP};
pub use merge::merge_decompositions;
pub use partition::{partition, partition_with, PartitionOutput, PartitionProgram, PartitionResult};
pub use pipeline::{pipeline, PipelineError, PipelineParams, PipelineRun, Stage, StageReport, PIPELINE_DIAMETER};

#[derive(Debug, Error)]
pub enum AlgoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("engine error: {0}")]
    Engine(EngineError<()>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{live} vertices still uncolored after a round budget of {budget}")]
    ColorBudgetExhausted { live: usize, budget: usize },
    #[error("{live} dominating-set vertices still unlabeled after {budget} iterations")]
    DominateBudgetExhausted { live: usize, budget: usize },
    #[error("vertex {0} has no labeled neighbor in the dominating set")]
    DominationViolation(VertexId),
    #[error("degree bound violated: max degree {max_degree} exceeds {bound}")]
    DegreeBoundViolated { max_degree: usize, bound: u64 },
    #[error("cluster too large for exact coloring: {size} vertices, cap {cap}")]
    ClusterTooLarge { size: usize, cap: usize },
    #[error("cluster of vertex {0} reaches past its collected neighborhood")]
    ClusterBeyondView(VertexId),
    #[error("vertex {0} appears on both sides of the merge")]
    MergeOverlap(VertexId),
    #[error("vertex {0} is labeled on neither side of the merge")]
    MergeUncovered(VertexId),
    #[error("invalid network decomposition: {0}")]
    InvalidDecomposition(String),
}

impl<O> From<EngineError<O>> for AlgoError {
    fn from(e: EngineError<O>) -> Self {
        AlgoError::Engine(e.erase())
    }
}

impl AlgoError {
    /// True for the failure events that are only excluded with high probability.
    pub fn is_whp_event(&self) -> bool {
        matches!(
            self,
            AlgoError::ColorBudgetExhausted { .. }
                | AlgoError::DominateBudgetExhausted { .. }
                | AlgoError::DegreeBoundViolated { .. }
        )
    }

    /// Short machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            AlgoError::Graph(_) => "graph",
            AlgoError::Engine(_) => "engine",
            AlgoError::Precondition(_) => "precondition",
            AlgoError::ColorBudgetExhausted { .. } => "color_budget_exhausted",
            AlgoError::DominateBudgetExhausted { .. } => "dominate_budget_exhausted",
            AlgoError::DominationViolation(_) => "domination_violation",
            AlgoError::DegreeBoundViolated { .. } => "degree_bound_violated",
            AlgoError::ClusterTooLarge { .. } => "cluster_too_large",
            AlgoError::ClusterBeyondView(_) => "cluster_beyond_view",
            AlgoError::MergeOverlap(_) => "merge_overlap",
            AlgoError::MergeUncovered(_) => "merge_uncovered",
            AlgoError::InvalidDecomposition(_) => "invalid_decomposition",
        }
    }
}

/// Which half of the partition a vertex joined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}
