//! Terminal sparsifiers for capacitated graphs, built and certified with
//! exact rational arithmetic.
//!
//! Given a graph `G` with a distinguished terminal set `K`, a *vertex
//! sparsifier* is a small graph `H` on (at least) `K` that approximately
//! preserves how much flow the terminals can exchange through `G`. This
//! crate constructs three kinds of sparsifiers:
//!
//! * [`extension::expected_sparsifier`] — for unweighted trees, the complete
//!   graph on `K` whose pair capacities are adjacency probabilities of a
//!   uniformly random connected retraction of the tree. Quality is at most 2
//!   and every capacity is computed in closed form.
//! * [`quasi_bipartite::qb_sparsifier`] — for graphs whose non-terminals
//!   form an independent set, a per-star construction with quality below 2.
//! * [`quasi_bipartite::exact_qb_sparsifier`] — for unit-capacity
//!   quasi-bipartite graphs, an exact sparsifier that merges non-terminals
//!   with identical terminal neighborhoods.
//!
//! The [`verify`] module certifies the results independently: exhaustive
//! terminal-cut enumeration backed by an exact max-flow, congestion of
//! demands routed through trees, and a concurrent-flow LP solved by a dense
//! rational simplex. Nothing in the crate rounds: every capacity, ratio and
//! LP value is a [`Rational`].

pub mod extension;
pub mod graph;
pub mod instances;
pub mod quasi_bipartite;
pub mod rational;
pub mod treeprep;
pub mod verify;

pub use graph::{CapacitatedGraph, Demand, MergePlan, ModelError, TerminalCorrespondence};
pub use rational::{rat, rat_int, Rational};
