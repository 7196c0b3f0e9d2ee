//! Graph model: undirected capacitated graphs with a distinguished terminal
//! set, demands between terminals, and the two assembly operators used
//! throughout the crate — convex combination and terminal-identifying merge.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use thiserror::Error;

use crate::rational::{is_positive, Rational};

/// Vertex identifiers are opaque strings; every operation that invents new
/// vertices documents its naming scheme so outputs stay deterministic.
pub type VertexId = String;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("terminal `{0}` is not a vertex of the graph")]
    MissingTerminal(VertexId),
    #[error("edge ({u}, {v}) has nonpositive capacity")]
    NonpositiveCapacity { u: VertexId, v: VertexId },
    #[error("self-loop at `{0}`")]
    SelfLoop(VertexId),
    #[error("demand pairs join two distinct terminals, got `{0}` twice")]
    SelfPair(VertexId),
    #[error("`{0}` is not a terminal")]
    UnknownTerminal(VertexId),
    #[error("correspondence repeats `{0}`; identifications must be injective")]
    NonInjectiveCorrespondence(VertexId),
    #[error("vertex `{0}` appears on both sides of a merge without being identified")]
    VertexCollision(VertexId),
    #[error("combination weights sum to {0}, expected exactly 1")]
    WeightSumNotOne(String),
    #[error("negative combination weight {0}")]
    NegativeWeight(String),
    #[error("graphs in a combination must share vertex and terminal sets")]
    VertexSetMismatch,
    #[error("combination needs at least one graph and one weight per graph")]
    EmptyCombination,
    #[error("merge plan references missing component {0}")]
    MissingComponent(usize),
    #[error("merge plan finished with {0} components instead of 1")]
    IncompleteMerge(usize),
}

/// Undirected graph with strictly positive rational capacities and a
/// terminal set `K ⊆ V`. Parallel edges are merged by adding capacities at
/// construction time and self-loops are rejected, so equality on the derived
/// structure is exact graph equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacitatedGraph {
    vertices: BTreeSet<VertexId>,
    terminals: BTreeSet<VertexId>,
    adj: BTreeMap<VertexId, BTreeMap<VertexId, Rational>>,
}

impl CapacitatedGraph {
    /// Builds and validates a graph. Endpoints of edges are added to the
    /// vertex set automatically; terminals must be covered by `vertices` or
    /// by some edge. Parallel edges merge by capacity addition.
    pub fn new<V, T, E>(vertices: V, terminals: T, edges: E) -> Result<Self, ModelError>
    where
        V: IntoIterator<Item = VertexId>,
        T: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId, Rational)>,
    {
        let mut vs: BTreeSet<VertexId> = vertices.into_iter().collect();
        let mut adj: BTreeMap<VertexId, BTreeMap<VertexId, Rational>> = BTreeMap::new();
        for (u, v, cap) in edges {
            if u == v {
                return Err(ModelError::SelfLoop(u));
            }
            if !is_positive(&cap) {
                return Err(ModelError::NonpositiveCapacity { u, v });
            }
            vs.insert(u.clone());
            vs.insert(v.clone());
            *adj.entry(u.clone())
                .or_default()
                .entry(v.clone())
                .or_insert_with(Rational::zero) += &cap;
            *adj.entry(v).or_default().entry(u).or_insert_with(Rational::zero) += cap;
        }
        let terminals: BTreeSet<VertexId> = terminals.into_iter().collect();
        for t in &terminals {
            if !vs.contains(t) {
                return Err(ModelError::MissingTerminal(t.clone()));
            }
        }
        Ok(CapacitatedGraph { vertices: vs, terminals, adj })
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn terminals(&self) -> impl Iterator<Item = &VertexId> {
        self.terminals.iter()
    }

    pub fn terminal_set(&self) -> &BTreeSet<VertexId> {
        &self.terminals
    }

    pub fn is_terminal(&self, v: &str) -> bool {
        self.terminals.contains(v)
    }

    pub fn contains_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn terminal_count(&self) -> usize {
        self.terminals.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    /// Edges in canonical orientation (`u < v`), sorted.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, &Rational)> {
        self.adj.iter().flat_map(|(u, nbrs)| {
            nbrs.iter().filter(move |(v, _)| u < *v).map(move |(v, c)| (u, v, c))
        })
    }

    pub fn capacity(&self, u: &str, v: &str) -> Option<&Rational> {
        self.adj.get(u).and_then(|n| n.get(v))
    }

    pub fn neighbors(&self, v: &str) -> impl Iterator<Item = (&VertexId, &Rational)> {
        self.adj.get(v).into_iter().flatten()
    }

    pub fn degree(&self, v: &str) -> usize {
        self.adj.get(v).map_or(0, |n| n.len())
    }

    pub fn has_unit_capacities(&self) -> bool {
        let one = Rational::from_integer(1.into());
        self.edges().all(|(_, _, c)| *c == one)
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.vertices.iter().next() else { return true };
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(v) = stack.pop() {
            for (w, _) in self.neighbors(&v) {
                if seen.insert(w.clone()) {
                    stack.push(w.clone());
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count() == self.edge_count() + 1 && self.is_connected()
    }

    /// Total capacity crossing the vertex bipartition (`side`, rest).
    pub fn cut_value(&self, side: &BTreeSet<VertexId>) -> Rational {
        let mut total = Rational::zero();
        for (u, v, c) in self.edges() {
            if side.contains(u) != side.contains(v) {
                total += c;
            }
        }
        total
    }

    pub fn total_capacity(&self) -> Rational {
        let mut total = Rational::zero();
        for (_, _, c) in self.edges() {
            total += c;
        }
        total
    }
}

/// Normalizes raw instance data into a [`CapacitatedGraph`], rejecting
/// self-loops, nonpositive capacities and terminals that never appear.
pub fn validate_instance(
    vertices: Vec<VertexId>,
    terminals: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId, Rational)>,
) -> Result<CapacitatedGraph, ModelError> {
    CapacitatedGraph::new(vertices, terminals, edges)
}

/// Demand between unordered pairs of distinct terminals. Zero entries are
/// dropped so equal demands compare equal structurally.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Demand {
    entries: BTreeMap<(VertexId, VertexId), Rational>,
}

impl Demand {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(u: &str, v: &str) -> (VertexId, VertexId) {
        if u <= v {
            (u.to_owned(), v.to_owned())
        } else {
            (v.to_owned(), u.to_owned())
        }
    }

    pub fn set(&mut self, u: &str, v: &str, value: Rational) -> Result<(), ModelError> {
        if u == v {
            return Err(ModelError::SelfPair(u.to_owned()));
        }
        if value < Rational::zero() {
            return Err(ModelError::NegativeWeight(value.to_string()));
        }
        if value.is_zero() {
            self.entries.remove(&Self::key(u, v));
        } else {
            self.entries.insert(Self::key(u, v), value);
        }
        Ok(())
    }

    pub fn get(&self, u: &str, v: &str) -> Rational {
        self.entries.get(&Self::key(u, v)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &VertexId, &Rational)> {
        self.entries.iter().map(|((u, v), d)| (u, v, d))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The demand that asks for each edge capacity of `h` between its
    /// endpoints. For a sparsifier on the terminal set, routing this demand
    /// through the original graph measures the sparsifier's quality.
    pub fn from_capacities(h: &CapacitatedGraph) -> Demand {
        let mut d = Demand::new();
        for (u, v, c) in h.edges() {
            d.set(u, v, c.clone()).expect("graph edges join distinct vertices");
        }
        d
    }
}

/// Injective partial map from terminals of a left graph to terminals of a
/// right graph; each pair is identified into a single vertex by
/// [`phi_merge`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TerminalCorrespondence {
    pairs: Vec<(VertexId, VertexId)>,
}

impl TerminalCorrespondence {
    pub fn new(pairs: Vec<(VertexId, VertexId)>) -> Result<Self, ModelError> {
        let mut lefts = BTreeSet::new();
        let mut rights = BTreeSet::new();
        for (l, r) in &pairs {
            if !lefts.insert(l.clone()) {
                return Err(ModelError::NonInjectiveCorrespondence(l.clone()));
            }
            if !rights.insert(r.clone()) {
                return Err(ModelError::NonInjectiveCorrespondence(r.clone()));
            }
        }
        Ok(TerminalCorrespondence { pairs })
    }

    /// Identifies each listed name with itself; used when two pieces already
    /// share terminal names.
    pub fn identity<I: IntoIterator<Item = VertexId>>(ids: I) -> Self {
        TerminalCorrespondence { pairs: ids.into_iter().map(|v| (v.clone(), v)).collect() }
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Convex combination `Σ αᵢ·Gᵢ` of graphs on a common vertex and terminal
/// set: edge capacities are the weighted sums, edges whose sum is zero are
/// dropped. Weights must be nonnegative and sum to exactly 1.
pub fn convex_combine(
    graphs: &[CapacitatedGraph],
    weights: &[Rational],
) -> Result<CapacitatedGraph, ModelError> {
    if graphs.is_empty() || graphs.len() != weights.len() {
        return Err(ModelError::EmptyCombination);
    }
    for w in weights {
        if w < &Rational::zero() {
            return Err(ModelError::NegativeWeight(w.to_string()));
        }
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(ModelError::WeightSumNotOne(total.to_string()));
    }
    let first = &graphs[0];
    for g in &graphs[1..] {
        if g.vertex_set() != first.vertex_set() || g.terminal_set() != first.terminal_set() {
            return Err(ModelError::VertexSetMismatch);
        }
    }
    let mut acc: BTreeMap<(VertexId, VertexId), Rational> = BTreeMap::new();
    for (g, w) in graphs.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        for (u, v, c) in g.edges() {
            *acc.entry((u.clone(), v.clone())).or_insert_with(Rational::zero) += c * w;
        }
    }
    CapacitatedGraph::new(
        first.vertex_set().iter().cloned().collect::<Vec<_>>(),
        first.terminal_set().iter().cloned().collect::<Vec<_>>(),
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((u, v), c)| (u, v, c))
            .collect::<Vec<_>>(),
    )
}

/// Merges two graphs by identifying terminal pairs given by `corr`. The
/// identified vertex keeps the left graph's name; all other vertex names
/// must be disjoint between the two sides. Parallel edges created by the
/// identification merge by capacity addition, and the resulting terminal
/// set is `K₁ ∪ (K₂ minus identified names)`.
pub fn phi_merge(
    g1: &CapacitatedGraph,
    g2: &CapacitatedGraph,
    corr: &TerminalCorrespondence,
) -> Result<CapacitatedGraph, ModelError> {
    let mut rename: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
    for (l, r) in corr.pairs() {
        if !g1.is_terminal(l) {
            return Err(ModelError::UnknownTerminal(l.clone()));
        }
        if !g2.is_terminal(r) {
            return Err(ModelError::UnknownTerminal(r.clone()));
        }
        rename.insert(r, l);
    }
    let lefts: BTreeSet<&VertexId> = corr.pairs().iter().map(|(l, _)| l).collect();

    let renamed = |v: &VertexId| -> VertexId { (*rename.get(v).unwrap_or(&v)).clone() };

    // Renaming must neither collide inside g2 nor with unidentified g1 names.
    let mut g2_vertices = BTreeSet::new();
    for v in g2.vertices() {
        let name = renamed(v);
        if !g2_vertices.insert(name.clone()) {
            return Err(ModelError::VertexCollision(name));
        }
        if g1.contains_vertex(&name) && !lefts.contains(&name) {
            return Err(ModelError::VertexCollision(name));
        }
    }

    let vertices: Vec<VertexId> = g1.vertex_set().iter().cloned().chain(g2_vertices).collect();
    let terminals: Vec<VertexId> = g1
        .terminal_set()
        .iter()
        .cloned()
        .chain(g2.terminals().map(&renamed))
        .collect();
    let edges: Vec<(VertexId, VertexId, Rational)> = g1
        .edges()
        .map(|(u, v, c)| (u.clone(), v.clone(), c.clone()))
        .chain(g2.edges().map(|(u, v, c)| (renamed(u), renamed(v), c.clone())))
        .collect();
    CapacitatedGraph::new(vertices, terminals, edges)
}

/// One step of a [`MergePlan`]: merge component `right` into component
/// `left` (the result keeps the id `left`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub corr: TerminalCorrespondence,
}

/// Recipe for reassembling a split graph from its pieces. Steps apply in
/// order; replaying a plan on per-piece sparsifiers yields the combined
/// sparsifier, replaying it on the untouched pieces reconstructs the input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergePlan {
    pub steps: Vec<MergeStep>,
}

impl MergePlan {
    /// Applies every step to the indexed components and returns the single
    /// remaining graph.
    pub fn replay(&self, components: Vec<CapacitatedGraph>) -> Result<CapacitatedGraph, ModelError> {
        let mut pool: BTreeMap<usize, CapacitatedGraph> = components.into_iter().enumerate().collect();
        for step in &self.steps {
            let left = pool.remove(&step.left).ok_or(ModelError::MissingComponent(step.left))?;
            let right = pool.remove(&step.right).ok_or(ModelError::MissingComponent(step.right))?;
            pool.insert(step.left, phi_merge(&left, &right, &step.corr)?);
        }
        if pool.len() != 1 {
            return Err(ModelError::IncompleteMerge(pool.len()));
        }
        Ok(pool.into_values().next().expect("exactly one component"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn v(s: &str) -> VertexId {
        s.to_owned()
    }

    fn unit_edges(pairs: &[(&str, &str)]) -> Vec<(VertexId, VertexId, Rational)> {
        pairs.iter().map(|(a, b)| (v(a), v(b), rat_int(1))).collect()
    }

    #[test]
    fn build_merges_parallel_edges() {
        let g = CapacitatedGraph::new(
            vec![],
            vec![v("a"), v("b")],
            vec![(v("a"), v("b"), rat_int(1)), (v("b"), v("a"), rat_int(1))],
        )
        .unwrap();
        assert_eq!(g.capacity("a", "b"), Some(&rat_int(2)));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn build_rejects_bad_instances() {
        let loop_err = CapacitatedGraph::new(vec![], vec![], vec![(v("a"), v("a"), rat_int(1))]);
        assert_eq!(loop_err.unwrap_err(), ModelError::SelfLoop(v("a")));

        let cap_err = CapacitatedGraph::new(vec![], vec![], vec![(v("a"), v("b"), rat_int(0))]);
        assert!(matches!(cap_err.unwrap_err(), ModelError::NonpositiveCapacity { .. }));

        let term_err = CapacitatedGraph::new(vec![v("a")], vec![v("z")], vec![]);
        assert_eq!(term_err.unwrap_err(), ModelError::MissingTerminal(v("z")));
    }

    #[test]
    fn tree_and_connectivity_checks() {
        let path = CapacitatedGraph::new(vec![], vec![v("a"), v("c")], unit_edges(&[("a", "b"), ("b", "c")]))
            .unwrap();
        assert!(path.is_tree());
        let two = CapacitatedGraph::new(vec![], vec![], unit_edges(&[("a", "b"), ("c", "d")])).unwrap();
        assert!(!two.is_connected());
        assert!(!two.is_tree());
    }

    /// Averaging the three ways of collapsing a 3-leaf star onto one of its
    /// leaves yields the uniform triangle with capacity 2/3.
    #[test]
    fn convex_combination_of_star_collapses() {
        let terminals = [v("x1"), v("x2"), v("x3")];
        let collapse = |center: &str| {
            let edges = terminals
                .iter()
                .filter(|t| t.as_str() != center)
                .map(|t| (v(center), t.clone(), rat_int(1)))
                .collect::<Vec<_>>();
            CapacitatedGraph::new(terminals.to_vec(), terminals.to_vec(), edges).unwrap()
        };
        let parts = [collapse("x1"), collapse("x2"), collapse("x3")];
        let weights = vec![rat(1, 3), rat(1, 3), rat(1, 3)];
        let h = convex_combine(&parts, &weights).unwrap();
        for (a, b) in [("x1", "x2"), ("x1", "x3"), ("x2", "x3")] {
            assert_eq!(h.capacity(a, b), Some(&rat(2, 3)));
        }
    }

    #[test]
    fn convex_combination_validation() {
        let g = CapacitatedGraph::new(vec![], vec![v("a"), v("b")], unit_edges(&[("a", "b")])).unwrap();
        let other =
            CapacitatedGraph::new(vec![], vec![v("a"), v("c")], unit_edges(&[("a", "c")])).unwrap();
        assert!(matches!(
            convex_combine(&[g.clone(), g.clone()], &[rat(1, 2), rat(1, 3)]).unwrap_err(),
            ModelError::WeightSumNotOne(_)
        ));
        assert_eq!(
            convex_combine(&[g.clone(), other], &[rat(1, 2), rat(1, 2)]).unwrap_err(),
            ModelError::VertexSetMismatch
        );
        assert_eq!(
            convex_combine(std::slice::from_ref(&g), &[]).unwrap_err(),
            ModelError::EmptyCombination
        );
        assert!(matches!(
            convex_combine(&[g.clone(), g], &[rat(3, 2), rat(-1, 2)]).unwrap_err(),
            ModelError::NegativeWeight(_)
        ));
    }

    #[test]
    fn merge_identifies_and_keeps_left_name() {
        let g1 = CapacitatedGraph::new(vec![], vec![v("x1"), v("t")], unit_edges(&[("x1", "t")])).unwrap();
        let g2 = CapacitatedGraph::new(vec![], vec![v("t2"), v("x2")], unit_edges(&[("t2", "x2")])).unwrap();
        let corr = TerminalCorrespondence::new(vec![(v("t"), v("t2"))]).unwrap();
        let merged = phi_merge(&g1, &g2, &corr).unwrap();
        assert!(merged.contains_vertex("t"));
        assert!(!merged.contains_vertex("t2"));
        assert_eq!(merged.vertex_count(), 3);
        assert_eq!(
            merged.terminal_set(),
            &BTreeSet::from([v("x1"), v("t"), v("x2")])
        );
        assert_eq!(merged.capacity("t", "x2"), Some(&rat_int(1)));
    }

    /// Two triangles glued along two shared terminals: the shared edge's
    /// capacities add, and 3 + 3 terminals collapse to 4.
    #[test]
    fn merge_adds_parallel_capacity() {
        let tri = |names: [&str; 3]| {
            CapacitatedGraph::new(
                vec![],
                names.iter().map(|s| v(s)).collect::<Vec<_>>(),
                unit_edges(&[(names[0], names[1]), (names[0], names[2]), (names[1], names[2])]),
            )
            .unwrap()
        };
        let g1 = tri(["a", "b", "c"]);
        let g2 = tri(["p", "q", "r"]);
        let corr =
            TerminalCorrespondence::new(vec![(v("b"), v("p")), (v("c"), v("q"))]).unwrap();
        let merged = phi_merge(&g1, &g2, &corr).unwrap();
        assert_eq!(merged.terminal_count(), 4);
        assert_eq!(merged.capacity("b", "c"), Some(&rat_int(2)));
        assert_eq!(merged.capacity("b", "r"), Some(&rat_int(1)));
    }

    #[test]
    fn merge_validation() {
        let g1 = CapacitatedGraph::new(vec![], vec![v("a")], unit_edges(&[("a", "u")])).unwrap();
        let g2 = CapacitatedGraph::new(vec![], vec![v("b")], unit_edges(&[("b", "u")])).unwrap();
        // `u` lives on both sides but is not identified.
        let empty = TerminalCorrespondence::new(vec![]).unwrap();
        assert_eq!(
            phi_merge(&g1, &g2, &empty).unwrap_err(),
            ModelError::VertexCollision(v("u"))
        );
        let unknown = TerminalCorrespondence::new(vec![(v("a"), v("u"))]).unwrap();
        assert_eq!(
            phi_merge(&g1, &g2, &unknown).unwrap_err(),
            ModelError::UnknownTerminal(v("u"))
        );
        assert_eq!(
            TerminalCorrespondence::new(vec![(v("a"), v("b")), (v("a"), v("c"))]).unwrap_err(),
            ModelError::NonInjectiveCorrespondence(v("a"))
        );
    }

    /// Chained merges with disjoint correspondences associate: merging
    /// left-to-right and right-to-left produce the same graph.
    #[test]
    fn merge_is_associative_on_disjoint_chains() {
        let seg = |a: &str, b: &str| {
            CapacitatedGraph::new(vec![], vec![v(a), v(b)], unit_edges(&[(a, b)])).unwrap()
        };
        let (a, b, c) = (seg("a1", "a2"), seg("b1", "b2"), seg("c1", "c2"));
        let ab = TerminalCorrespondence::new(vec![(v("a2"), v("b1"))]).unwrap();
        let bc = TerminalCorrespondence::new(vec![(v("b2"), v("c1"))]).unwrap();
        let left_first = phi_merge(&phi_merge(&a, &b, &ab).unwrap(), &c, &bc).unwrap();
        let right_first = phi_merge(&a, &phi_merge(&b, &c, &bc).unwrap(), &ab).unwrap();
        assert_eq!(left_first, right_first);
    }

    #[test]
    fn merge_plan_replay() {
        let seg = |a: &str, b: &str| {
            CapacitatedGraph::new(vec![], vec![v(a), v(b)], unit_edges(&[(a, b)])).unwrap()
        };
        let plan = MergePlan {
            steps: vec![MergeStep {
                left: 0,
                right: 1,
                corr: TerminalCorrespondence::new(vec![(v("m"), v("m2"))]).unwrap(),
            }],
        };
        let merged = plan.replay(vec![seg("x", "m"), seg("m2", "y")]).unwrap();
        assert_eq!(merged.vertex_count(), 3);
        assert!(plan.replay(vec![seg("x", "m")]).is_err());
    }

    #[test]
    fn demand_basics() {
        let mut d = Demand::new();
        d.set("b", "a", rat(1, 2)).unwrap();
        assert_eq!(d.get("a", "b"), rat(1, 2));
        assert_eq!(d.set("a", "a", rat_int(1)).unwrap_err(), ModelError::SelfPair(v("a")));
        d.set("a", "b", rat_int(0)).unwrap();
        assert!(d.is_zero());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Cut values of a convex combination are the weighted sums of the
        /// component cut values, for every terminal bipartition.
        #[test]
        fn cut_linearity() {
            let config = proptest::test_runner::Config { cases: 64, ..Default::default() };
            let mut runner = proptest::test_runner::TestRunner::new(config);
            let names: Vec<VertexId> = (0..4).map(|i| format!("x{i}")).collect();
            let strategy = (
                proptest::collection::vec(proptest::option::of(1i64..5), 6),
                proptest::collection::vec(proptest::option::of(1i64..5), 6),
                1i64..5,
            );
            runner
                .run(&strategy, |(mask1, mask2, wnum)| {
                    let build = |mask: &[Option<i64>]| {
                        let mut edges = Vec::new();
                        let mut idx = 0;
                        for i in 0..4 {
                            for j in (i + 1)..4 {
                                if let Some(c) = mask[idx] {
                                    edges.push((names[i].clone(), names[j].clone(), rat_int(c)));
                                }
                                idx += 1;
                            }
                        }
                        CapacitatedGraph::new(names.clone(), names.clone(), edges).unwrap()
                    };
                    let (g1, g2) = (build(&mask1), build(&mask2));
                    let w1 = rat(wnum, 5);
                    let w2 = rat_int(1) - &w1;
                    let h = convex_combine(&[g1.clone(), g2.clone()], &[w1.clone(), w2.clone()])
                        .unwrap();
                    for bits in 1u32..8 {
                        let side: BTreeSet<VertexId> = (0..4)
                            .filter(|i| bits & (1 << i) != 0)
                            .map(|i| names[i].clone())
                            .collect();
                        let expect = &w1 * g1.cut_value(&side) + &w2 * g2.cut_value(&side);
                        prop_assert_eq!(h.cut_value(&side), expect);
                    }
                    Ok(())
                })
                .unwrap();
        }
    }
}
