//! Extremal behaviour of sparsifiers for the unit star.
//!
//! The star with `k` unit rays is the hardest unweighted tree for
//! terminal-only sparsification. [`star_lower_bound`] returns the canonical
//! uniform witness graph together with its quality `2(1 - 1/k)`, which the
//! randomized construction attains exactly. [`optimal_star_sparsifier_lp`]
//! independently minimizes the worst cut ratio over all complete graphs on
//! the terminals: for even `k` the optimum matches the witness, while odd
//! `k` allows a slightly cheaper uniform weight because the balanced
//! bipartition has uneven sides. The gap between the two functions is itself
//! a certified fact about the star, not an artifact of either computation.

use super::maxflow::terminal_mincut;
use super::simplex::{solve, Constraint, LinearProgram, LpOutcome};
use super::VerifyError;
use crate::graph::{CapacitatedGraph, VertexId};
use crate::instances::unit_star;
use crate::rational::{rat, Rational};
use num::{One, Zero};
use std::collections::BTreeSet;

/// Quality reached by the uniform complete graph with edge weight `2/k` on
/// the terminals of the `k`-ray unit star, together with that witness graph.
/// Singleton cuts overshoot by exactly `2(1 - 1/k)`; no cut undershoots.
pub fn star_lower_bound(k: usize) -> (Rational, CapacitatedGraph) {
    assert!(k >= 2, "a star sparsifier needs at least two terminals");
    let names: Vec<VertexId> = (1..=k).map(|i| format!("x{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            edges.push((names[i].clone(), names[j].clone(), rat(2, k as i64)));
        }
    }
    let witness = CapacitatedGraph::new(names.clone(), names, edges)
        .expect("uniform complete graph is well formed");
    (rat(2 * (k as i64 - 1), k as i64), witness)
}

/// Best possible cut-sparsifier quality over all complete graphs on the
/// terminals of the `k`-ray unit star, solved exactly as a linear program:
/// minimize `q` subject to every terminal bipartition being dominated and
/// overestimated by at most `q`. `bound` caps `k` to keep the constraint
/// enumeration affordable.
pub fn optimal_star_sparsifier_lp(k: usize, bound: usize) -> Result<Rational, VerifyError> {
    if k < 2 {
        return Err(VerifyError::EmptySide);
    }
    if k > bound {
        return Err(VerifyError::TooManyTerminals { found: k, cap: bound });
    }

    let star = unit_star(k);
    let names: Vec<VertexId> = (1..=k).map(|i| format!("x{i}")).collect();
    let mut pair_index = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            pair_index.push((i, j));
        }
    }
    // One weight per terminal pair, then the quality variable.
    let vars = pair_index.len() + 1;
    let q = pair_index.len();

    let mut constraints = Vec::new();
    for mask in 0..(1u64 << (k - 1)) - 1 {
        let mut side = BTreeSet::from([names[0].clone()]);
        for (t, name) in names.iter().enumerate().skip(1) {
            if mask >> (t - 1) & 1 == 1 {
                side.insert(name.clone());
            }
        }
        let mincut = terminal_mincut(&star, &side)?;
        let mut boundary = vec![Rational::zero(); vars];
        for (e, (i, j)) in pair_index.iter().enumerate() {
            if side.contains(&names[*i]) != side.contains(&names[*j]) {
                boundary[e] = Rational::one();
            }
        }
        constraints.push(Constraint::ge(boundary.clone(), mincut.clone()));
        boundary[q] = -mincut;
        constraints.push(Constraint::le(boundary, Rational::zero()));
    }

    let mut maximize = vec![Rational::zero(); vars];
    maximize[q] = -Rational::one();
    match solve(&LinearProgram { maximize, constraints }) {
        LpOutcome::Optimal { value, .. } => Ok(-value),
        outcome => unreachable!(
            "the quality program is feasible and bounded, got {outcome:?}"
        ),
    }
}
