//! Sparsifiers for quasi-bipartite graphs, where the non-terminals form an
//! independent set. Each non-terminal is the centre of a star whose rays
//! end in terminals, so the graph decomposes into stars glued at terminals:
//! sparsify each star, merge the results back. A weighted star admits a
//! quality-2 sparsifier in closed form; a unit-capacity graph even admits
//! an exact one, by merging all centres that see the same terminal set.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;
use thiserror::Error;

use crate::graph::{
    CapacitatedGraph, MergePlan, MergeStep, ModelError, TerminalCorrespondence, VertexId,
};
use crate::rational::{rat_int, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QbError {
    #[error("non-terminals `{0}` and `{1}` are adjacent; graph is not quasi-bipartite")]
    NonterminalAdjacency(VertexId, VertexId),
    #[error("terminals `{0}` and `{1}` are adjacent; subdivide terminal edges first")]
    TerminalAdjacency(VertexId, VertexId),
    #[error("operation requires unit capacities")]
    NotUnitCapacities,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A non-terminal centre with its terminal rays. `C` denotes the total ray
/// capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarComponent {
    center: VertexId,
    rays: BTreeMap<VertexId, Rational>,
}

impl StarComponent {
    pub fn center(&self) -> &VertexId {
        &self.center
    }

    pub fn rays(&self) -> &BTreeMap<VertexId, Rational> {
        &self.rays
    }

    pub fn total_capacity(&self) -> Rational {
        self.rays.values().sum()
    }

    /// The star as a standalone graph: centre non-terminal, rays terminal.
    pub fn graph(&self) -> CapacitatedGraph {
        let terminals: Vec<VertexId> = self.rays.keys().cloned().collect();
        let edges: Vec<(VertexId, VertexId, Rational)> = self
            .rays
            .iter()
            .map(|(t, c)| (self.center.clone(), t.clone(), c.clone()))
            .collect();
        CapacitatedGraph::new(terminals.clone(), terminals, edges)
            .expect("a star component is a valid graph")
    }
}

/// Non-terminals sharing one exact terminal neighbourhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeGroup {
    signature: BTreeSet<VertexId>,
    members: Vec<VertexId>,
}

impl TypeGroup {
    pub fn signature(&self) -> &BTreeSet<VertexId> {
        &self.signature
    }

    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

fn ensure_normalized(g: &CapacitatedGraph) -> Result<(), QbError> {
    for (u, v, _) in g.edges() {
        match (g.is_terminal(u), g.is_terminal(v)) {
            (true, true) => return Err(QbError::TerminalAdjacency(u.clone(), v.clone())),
            (false, false) => return Err(QbError::NonterminalAdjacency(u.clone(), v.clone())),
            _ => {}
        }
    }
    Ok(())
}

/// Replaces every terminal-terminal edge (a, b) of capacity c by a path
/// a–w–b through a fresh non-terminal, both halves keeping capacity c. The
/// output is bipartite between terminals and non-terminals. Rejects inputs
/// where two non-terminals are adjacent: those are not quasi-bipartite and
/// no subdivision fixes them.
pub fn normalize_quasi_bipartite(g: &CapacitatedGraph) -> Result<CapacitatedGraph, QbError> {
    let mut taken: BTreeSet<VertexId> = g.vertex_set().clone();
    let mut next = 1usize;
    let mut fresh = || loop {
        let name = format!("s{next}");
        next += 1;
        if taken.insert(name.clone()) {
            return name;
        }
    };
    let mut edges: Vec<(VertexId, VertexId, Rational)> = Vec::new();
    for (u, v, c) in g.edges() {
        match (g.is_terminal(u), g.is_terminal(v)) {
            (false, false) => {
                return Err(QbError::NonterminalAdjacency(u.clone(), v.clone()));
            }
            (true, true) => {
                let w = fresh();
                edges.push((u.clone(), w.clone(), c.clone()));
                edges.push((w, v.clone(), c.clone()));
            }
            _ => edges.push((u.clone(), v.clone(), c.clone())),
        }
    }
    let vertices: Vec<VertexId> = g.vertex_set().iter().cloned().collect();
    let terminals: Vec<VertexId> = g.terminal_set().iter().cloned().collect();
    Ok(CapacitatedGraph::new(vertices, terminals, edges)?)
}

/// Splits a normalized graph into its star components, one per non-terminal
/// with at least one ray, plus the plan that reassembles them by
/// identifying shared terminals. Replaying the plan on the untouched stars
/// reconstructs the input (minus isolated vertices); replaying it on
/// per-star sparsifiers yields the combined sparsifier.
pub fn decompose_stars(
    g: &CapacitatedGraph,
) -> Result<(Vec<StarComponent>, MergePlan), QbError> {
    ensure_normalized(g)?;
    let mut stars: Vec<StarComponent> = Vec::new();
    for u in g.vertices().filter(|u| !g.is_terminal(u)) {
        let rays: BTreeMap<VertexId, Rational> =
            g.neighbors(u).map(|(t, c)| (t.clone(), c.clone())).collect();
        if !rays.is_empty() {
            stars.push(StarComponent { center: u.clone(), rays });
        }
    }
    let mut plan = MergePlan::default();
    let mut seen: BTreeSet<VertexId> = match stars.first() {
        Some(star) => star.rays.keys().cloned().collect(),
        None => return Ok((stars, plan)),
    };
    for (pos, star) in stars.iter().enumerate().skip(1) {
        let shared: Vec<VertexId> =
            star.rays.keys().filter(|t| seen.contains(*t)).cloned().collect();
        seen.extend(star.rays.keys().cloned());
        plan.steps.push(MergeStep {
            left: 0,
            right: pos,
            corr: TerminalCorrespondence::identity(shared),
        });
    }
    Ok((stars, plan))
}

/// Quality-2 sparsifier of a weighted star: the complete graph on its
/// terminals with capacities c_H(x, x') = 2·c(u,x)·c(u,x')/C. This equals
/// the convex combination of the k single-edge contractions of the star,
/// the contraction along (u, x) taken with weight c(u,x)/C. A star with one
/// ray degenerates to its lone terminal with no edges.
pub fn weighted_star_sparsifier(star: &StarComponent) -> Result<CapacitatedGraph, QbError> {
    let terminals: Vec<VertexId> = star.rays.keys().cloned().collect();
    let total = star.total_capacity();
    let mut edges = Vec::new();
    let rays: Vec<(&VertexId, &Rational)> = star.rays.iter().collect();
    for (i, (x, cx)) in rays.iter().enumerate() {
        for (y, cy) in &rays[i + 1..] {
            edges.push(((*x).clone(), (*y).clone(), rat_int(2) * *cx * *cy / &total));
        }
    }
    Ok(CapacitatedGraph::new(terminals.clone(), terminals, edges)?)
}

/// Worst-case congestion of routing the sparsifier's demands back through
/// the star: max over rays of 2·(1 − c(u,x)/C), the flow quality of
/// [`weighted_star_sparsifier`]. Always strictly below 2; zero when fewer
/// than two rays leave nothing to route.
pub fn star_routing_congestion(star: &StarComponent) -> Rational {
    if star.rays.len() < 2 {
        return Rational::zero();
    }
    let total = star.total_capacity();
    star.rays
        .values()
        .map(|c| rat_int(2) * (rat_int(1) - c / &total))
        .max()
        .expect("star has rays")
}

/// Quality-2 sparsifier of a quasi-bipartite graph: normalize, sparsify
/// every star, and glue the pieces at their shared terminals. The output
/// lives on exactly the terminal set.
pub fn qb_sparsifier(g: &CapacitatedGraph) -> Result<CapacitatedGraph, QbError> {
    let normalized = normalize_quasi_bipartite(g)?;
    let (stars, plan) = decompose_stars(&normalized)?;
    let terminals: Vec<VertexId> = g.terminal_set().iter().cloned().collect();
    if stars.is_empty() {
        return Ok(CapacitatedGraph::new(terminals.clone(), terminals, Vec::new())?);
    }
    let parts: Vec<CapacitatedGraph> =
        stars.iter().map(weighted_star_sparsifier).collect::<Result<_, _>>()?;
    let merged = plan.replay(parts)?;
    // Terminals no star touches (isolated in the input) are reattached so
    // the output is a graph on all of K.
    let edges: Vec<(VertexId, VertexId, Rational)> =
        merged.edges().map(|(u, v, c)| (u.clone(), v.clone(), c.clone())).collect();
    Ok(CapacitatedGraph::new(terminals.clone(), terminals, edges)?)
}

/// Partitions the non-terminals of a unit-capacity normalized graph by
/// their exact terminal neighbourhood. At most 2^k − 1 groups exist.
/// Isolated non-terminals carry no flow and are skipped.
pub fn group_by_type(g: &CapacitatedGraph) -> Result<Vec<TypeGroup>, QbError> {
    ensure_normalized(g)?;
    if !g.has_unit_capacities() {
        return Err(QbError::NotUnitCapacities);
    }
    let mut groups: BTreeMap<BTreeSet<VertexId>, Vec<VertexId>> = BTreeMap::new();
    for u in g.vertices().filter(|u| !g.is_terminal(u)) {
        let signature: BTreeSet<VertexId> = g.neighbors(u).map(|(t, _)| t.clone()).collect();
        if !signature.is_empty() {
            groups.entry(signature).or_default().push(u.clone());
        }
    }
    Ok(groups
        .into_iter()
        .map(|(signature, members)| TypeGroup { signature, members })
        .collect())
}

/// Exact sparsifier of a unit-capacity quasi-bipartite graph: every type
/// group of n_i centres collapses to its first member, joined to each
/// signature terminal by an edge of capacity n_i. All terminal mincuts and
/// multicommodity flows are preserved exactly, and at most 2^k − 1
/// non-terminals remain.
pub fn exact_qb_sparsifier(g: &CapacitatedGraph) -> Result<CapacitatedGraph, QbError> {
    let normalized = normalize_quasi_bipartite(g)?;
    let groups = group_by_type(&normalized)?;
    let mut edges = Vec::new();
    for group in &groups {
        let center = group.members()[0].clone();
        let weight = rat_int(group.size() as i64);
        for t in group.signature() {
            edges.push((center.clone(), t.clone(), weight.clone()));
        }
    }
    let terminals: Vec<VertexId> = g.terminal_set().iter().cloned().collect();
    Ok(CapacitatedGraph::new(terminals.clone(), terminals, edges)?)
}
