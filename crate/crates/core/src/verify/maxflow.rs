//! Exact maximum flow between vertex sets.
//!
//! Undirected edges become antiparallel arc pairs that share residual
//! capacity, multiple sources and sinks are handled with a super source and
//! super sink, and augmenting paths are found shortest-first so the
//! computation terminates regardless of capacities. By max-flow/min-cut
//! duality the returned value is also the minimum cut separating the sets.

use super::VerifyError;
use crate::graph::{CapacitatedGraph, VertexId};
use crate::rational::Rational;
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

struct Arc {
    to: usize,
    residual: Rational,
}

/// Flow network over interned vertex indices. Arc `i ^ 1` is the reverse
/// companion of arc `i`.
struct Network {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network { arcs: Vec::new(), out: vec![Vec::new(); nodes] }
    }

    fn add_arc(&mut self, from: usize, to: usize, forward: Rational, backward: Rational) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, residual: forward });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, residual: backward });
    }

    /// One round of breadth-first search; returns the arc used to enter each
    /// reachable node, or `None` when the sink is unreachable.
    fn shortest_augmenting_path(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        let mut entered: Vec<Option<usize>> = vec![None; self.out.len()];
        let mut queue = VecDeque::from([source]);
        let mut seen = vec![false; self.out.len()];
        seen[source] = true;
        while let Some(node) = queue.pop_front() {
            for &arc in &self.out[node] {
                let next = self.arcs[arc].to;
                if !seen[next] && self.arcs[arc].residual.is_positive() {
                    seen[next] = true;
                    entered[next] = Some(arc);
                    if next == sink {
                        let mut path = Vec::new();
                        let mut at = sink;
                        while let Some(a) = entered[at] {
                            path.push(a);
                            at = self.arcs[a ^ 1].to;
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(next);
                }
            }
        }
        None
    }
}

/// Maximum flow from `sources` to `sinks` in an undirected capacitated graph.
///
/// Both sets must be nonempty, disjoint subsets of the vertex set. The value
/// equals the minimum total capacity of edges whose removal disconnects every
/// source from every sink.
pub fn max_flow(
    graph: &CapacitatedGraph,
    sources: &BTreeSet<VertexId>,
    sinks: &BTreeSet<VertexId>,
) -> Result<Rational, VerifyError> {
    if sources.is_empty() || sinks.is_empty() {
        return Err(VerifyError::EmptySide);
    }
    if let Some(shared) = sources.intersection(sinks).next() {
        return Err(VerifyError::OverlappingSets(shared.clone()));
    }
    for v in sources.iter().chain(sinks) {
        if !graph.contains_vertex(v) {
            return Err(VerifyError::UnknownVertex(v.clone()));
        }
    }

    let index: BTreeMap<&VertexId, usize> =
        graph.vertices().enumerate().map(|(i, v)| (v, i)).collect();
    let n = index.len();
    let (source, sink) = (n, n + 1);
    let mut net = Network::new(n + 2);
    for (u, v, c) in graph.edges() {
        net.add_arc(index[u], index[v], c.clone(), c.clone());
    }
    // Any finite bound above the total capacity keeps the attachment arcs
    // out of every minimum cut.
    let unlimited = graph.total_capacity() + Rational::one();
    for s in sources {
        net.add_arc(source, index[s], unlimited.clone(), Rational::zero());
    }
    for t in sinks {
        net.add_arc(index[t], sink, unlimited.clone(), Rational::zero());
    }

    let mut value = Rational::zero();
    while let Some(path) = net.shortest_augmenting_path(source, sink) {
        let bottleneck = path
            .iter()
            .map(|&a| net.arcs[a].residual.clone())
            .min()
            .expect("augmenting path has at least one arc");
        for &a in &path {
            net.arcs[a].residual -= &bottleneck;
            let back = &mut net.arcs[a ^ 1];
            back.residual += &bottleneck;
        }
        value += bottleneck;
    }
    Ok(value)
}

/// Minimum cut separating the terminals in `side` from the remaining
/// terminals. `side` must be a nonempty proper subset of the terminal set.
pub fn terminal_mincut(
    graph: &CapacitatedGraph,
    side: &BTreeSet<VertexId>,
) -> Result<Rational, VerifyError> {
    for t in side {
        if !graph.is_terminal(t) {
            return Err(VerifyError::UnknownTerminal(t.clone()));
        }
    }
    let rest: BTreeSet<VertexId> = graph.terminal_set().difference(side).cloned().collect();
    if side.is_empty() || rest.is_empty() {
        return Err(VerifyError::EmptySide);
    }
    max_flow(graph, side, &rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{unit_path, unit_star};
    use crate::rational::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names<const N: usize>(ids: [&str; N]) -> BTreeSet<VertexId> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    /// Reference mincut: scan every vertex bipartition that keeps the sources
    /// on one side and the sinks on the other.
    fn brute_force_mincut(
        g: &CapacitatedGraph,
        sources: &BTreeSet<VertexId>,
        sinks: &BTreeSet<VertexId>,
    ) -> Rational {
        let free: Vec<&VertexId> = g
            .vertices()
            .filter(|v| !sources.contains(*v) && !sinks.contains(*v))
            .collect();
        let mut best: Option<Rational> = None;
        for mask in 0u64..(1 << free.len()) {
            let mut side = sources.clone();
            for (i, v) in free.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    side.insert((*v).clone());
                }
            }
            let value = g.cut_value(&side);
            if best.as_ref().is_none_or(|b| value < *b) {
                best = Some(value);
            }
        }
        best.expect("at least the empty extension exists")
    }

    #[test]
    fn path_carries_a_single_unit() {
        let path = unit_path(2);
        let flow = max_flow(&path, &names(["x1"]), &names(["x2"])).unwrap();
        assert_eq!(flow, rat_int(1));
    }

    #[test]
    fn star_mincut_counts_the_smaller_side() {
        let star = unit_star(5);
        assert_eq!(terminal_mincut(&star, &names(["x1"])).unwrap(), rat_int(1));
        assert_eq!(terminal_mincut(&star, &names(["x1", "x4"])).unwrap(), rat_int(2));
        assert_eq!(terminal_mincut(&star, &names(["x1", "x2", "x3"])).unwrap(), rat_int(2));
    }

    #[test]
    fn asymmetric_diamond_bottleneck() {
        let g = CapacitatedGraph::new(
            ["s", "a", "b", "t"].map(String::from),
            ["s", "t"].map(String::from),
            vec![
                ("s".into(), "a".into(), rat_int(1)),
                ("s".into(), "b".into(), rat_int(2)),
                ("a".into(), "t".into(), rat_int(2)),
                ("b".into(), "t".into(), rat_int(1)),
            ],
        )
        .unwrap();
        // Tightest bipartition is {s, b}: crosses s-a and b-t.
        assert_eq!(max_flow(&g, &names(["s"]), &names(["t"])).unwrap(), rat_int(2));
    }

    #[test]
    fn flow_can_cancel_along_an_undirected_edge() {
        // Two disjoint unit paths s-a-t and s-b-t plus a cross edge a-b; the
        // cross edge is useless and max flow is 2.
        let g = CapacitatedGraph::new(
            ["s", "a", "b", "t"].map(String::from),
            ["s", "t"].map(String::from),
            vec![
                ("s".into(), "a".into(), rat_int(1)),
                ("s".into(), "b".into(), rat_int(1)),
                ("a".into(), "t".into(), rat_int(1)),
                ("b".into(), "t".into(), rat_int(1)),
                ("a".into(), "b".into(), rat(1, 3)),
            ],
        )
        .unwrap();
        assert_eq!(max_flow(&g, &names(["s"]), &names(["t"])).unwrap(), rat_int(2));
    }

    #[test]
    fn multiple_sources_and_sinks_share_capacity() {
        let star = unit_star(4);
        let flow = max_flow(&star, &names(["x1", "x2"]), &names(["x3", "x4"])).unwrap();
        assert_eq!(flow, rat_int(2));
    }

    #[test]
    fn disconnected_sides_have_zero_flow() {
        let g = CapacitatedGraph::new(
            ["x1", "x2", "x3", "x4"].map(String::from),
            ["x1", "x2", "x3", "x4"].map(String::from),
            vec![
                ("x1".into(), "x2".into(), rat_int(1)),
                ("x3".into(), "x4".into(), rat_int(1)),
            ],
        )
        .unwrap();
        assert_eq!(terminal_mincut(&g, &names(["x1", "x2"])).unwrap(), rat_int(0));
        assert_eq!(terminal_mincut(&g, &names(["x1", "x3"])).unwrap(), rat_int(2));
    }

    #[test]
    fn bad_set_arguments_are_rejected() {
        let star = unit_star(3);
        assert_eq!(
            max_flow(&star, &names(["x1"]), &names(["x1", "x2"])),
            Err(VerifyError::OverlappingSets("x1".into()))
        );
        assert_eq!(
            max_flow(&star, &BTreeSet::new(), &names(["x1"])),
            Err(VerifyError::EmptySide)
        );
        assert_eq!(
            max_flow(&star, &names(["ghost"]), &names(["x1"])),
            Err(VerifyError::UnknownVertex("ghost".into()))
        );
        assert_eq!(
            terminal_mincut(&star, &names(["c"])),
            Err(VerifyError::UnknownTerminal("c".into()))
        );
        assert_eq!(
            terminal_mincut(&star, &names(["x1", "x2", "x3"])),
            Err(VerifyError::EmptySide)
        );
    }

    #[test]
    fn agrees_with_exhaustive_cut_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f10e);
        for round in 0..40 {
            let n = rng.random_range(4..=8);
            let vertices: Vec<VertexId> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random_range(0..100) < 45 {
                        let cap = rat(rng.random_range(1..=4), rng.random_range(1..=3));
                        edges.push((vertices[i].clone(), vertices[j].clone(), cap));
                    }
                }
            }
            let g = CapacitatedGraph::new(vertices.clone(), Vec::<VertexId>::new(), edges)
                .unwrap();
            let sources = names(["v0"]);
            let sinks = names(["v1"]);
            let fast = max_flow(&g, &sources, &sinks).unwrap();
            let slow = brute_force_mincut(&g, &sources, &sinks);
            assert_eq!(fast, slow, "round {round} disagreed");
        }
    }
}
