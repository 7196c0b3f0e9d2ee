//! Independent certification of sparsifier quality.
//!
//! Everything in here recomputes quantities from first principles so that the
//! constructive modules can be checked against oracles that share no code with
//! them: exact max-flow for terminal mincuts, exhaustive bipartition
//! enumeration for cut quality, unique-path routing for tree congestion, and
//! an exact rational LP solver for concurrent flow and the optimal-star bound.
//!
//! All arithmetic is exact; reported ratios and witnesses are certificates,
//! not estimates.

pub mod concurrent;
pub mod congestion;
pub mod cuts;
pub mod maxflow;
pub mod simplex;
pub mod starbound;

use crate::graph::{ModelError, VertexId};
use thiserror::Error;

pub use concurrent::{max_concurrent_flow, verify_exact, ExactnessReport, LpSolution, LpStatus};
pub use congestion::{flow_quality_tree, tree_congestion, FlowCertificate};
pub use cuts::{enumerate_cut_quality, CutQualityOptions, QualityReport};
pub use maxflow::{max_flow, terminal_mincut};
pub use starbound::{optimal_star_sparsifier_lp, star_lower_bound};

/// Errors shared by the certification routines.
#[derive(Debug, PartialEq, Eq, Error)]
pub enum VerifyError {
    /// A vertex named by the caller does not exist in the graph.
    #[error("vertex `{0}` is not in the graph")]
    UnknownVertex(VertexId),
    /// Source and sink sets for a flow computation intersect.
    #[error("source and sink sets both contain `{0}`")]
    OverlappingSets(VertexId),
    /// A terminal bipartition had an empty side, so no cut separates it.
    #[error("terminal side must be a nonempty proper subset of the terminals")]
    EmptySide,
    /// Exhaustive enumeration over terminal subsets was refused.
    #[error("{found} terminals exceed the enumeration cap of {cap}")]
    TooManyTerminals { found: usize, cap: usize },
    /// A routine that routes along unique paths was handed a non-tree.
    #[error("graph is not a tree")]
    NotATree,
    /// A demand endpoint is not a terminal of the graph.
    #[error("demand endpoint `{0}` is not a terminal")]
    UnknownTerminal(VertexId),
    /// The sparsifier being checked does not live on the expected vertex set.
    #[error("sparsifier vertex set does not match the terminal set being certified")]
    NotOnTerminals,
    /// The two-hop path model cannot carry flow between this pair.
    #[error("no direct edge or two-hop path connects `{0}` and `{1}` in the flow model")]
    UnsupportedTopology(VertexId, VertexId),
    /// The path model only covers graphs whose non-terminals form an
    /// independent set.
    #[error("edge between non-terminals `{0}` and `{1}` is outside the two-hop flow model")]
    NonterminalAdjacency(VertexId, VertexId),
    /// A bipartition has zero capacity in the base graph but positive
    /// capacity in the sparsifier, so no finite quality bound exists.
    #[error("bipartition {{{0}}} has zero base mincut but positive sparsifier cut")]
    UnboundedRatio(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
