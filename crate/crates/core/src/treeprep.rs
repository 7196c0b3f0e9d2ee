//! Tree preprocessing: prune useless branches, contract unit paths, split at
//! internal terminals, and root the result. After the full pipeline every
//! piece is a leaf-terminal tree (each leaf a terminal, each terminal a
//! leaf) with at most `2k` vertices, plus a [`MergePlan`] that reassembles
//! the pieces exactly.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{
    CapacitatedGraph, MergePlan, MergeStep, TerminalCorrespondence, VertexId,
};
use crate::rational::{rat_int, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("input graph is not a tree")]
    NotATree,
    #[error("operation requires unit capacities")]
    NotUnitCapacities,
    #[error("vertex `{0}` violates leaf-terminal form")]
    NotLeafTerminalForm(VertexId),
    #[error("tree has more than two vertices but no non-terminal to root at")]
    NoNonterminalRoot,
}

fn ensure_tree(g: &CapacitatedGraph) -> Result<(), TreeError> {
    if g.is_tree() {
        Ok(())
    } else {
        Err(TreeError::NotATree)
    }
}

/// Repeatedly deletes non-terminal leaves. Branches that carry no terminal
/// cannot route terminal flow, so removing them changes no terminal cut.
pub fn prune_nonterminal_leaves(g: &CapacitatedGraph) -> Result<CapacitatedGraph, TreeError> {
    ensure_tree(g)?;
    let mut degree: BTreeMap<&VertexId, usize> =
        g.vertices().map(|v| (v, g.degree(v))).collect();
    let mut removed: BTreeSet<&VertexId> = BTreeSet::new();
    let mut queue: VecDeque<&VertexId> = g
        .vertices()
        .filter(|v| !g.is_terminal(v) && g.degree(v) <= 1)
        .collect();
    while let Some(v) = queue.pop_front() {
        if !removed.insert(v) {
            continue;
        }
        for (w, _) in g.neighbors(v) {
            if removed.contains(w) {
                continue;
            }
            let d = degree.get_mut(w).expect("neighbor is a vertex");
            *d -= 1;
            if *d <= 1 && !g.is_terminal(w) {
                queue.push_back(w);
            }
        }
    }
    let vertices = g.vertices().filter(|v| !removed.contains(*v)).cloned().collect::<Vec<_>>();
    let edges = g
        .edges()
        .filter(|(u, v, _)| !removed.contains(u) && !removed.contains(v))
        .map(|(u, v, c)| (u.clone(), v.clone(), c.clone()))
        .collect::<Vec<_>>();
    CapacitatedGraph::new(vertices, g.terminals().cloned().collect::<Vec<_>>(), edges)
        .map_err(|_| TreeError::NotATree)
}

/// Replaces every chain through degree-2 non-terminals by a single unit
/// edge. Requires unit capacities: on a unit tree a subdivided edge carries
/// exactly the load of the merged edge, so contraction preserves every
/// terminal flow.
pub fn contract_degree2_nonterminals(
    g: &CapacitatedGraph,
) -> Result<CapacitatedGraph, TreeError> {
    ensure_tree(g)?;
    if !g.has_unit_capacities() {
        return Err(TreeError::NotUnitCapacities);
    }
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = g
        .vertices()
        .map(|v| (v.clone(), g.neighbors(v).map(|(w, _)| w.clone()).collect()))
        .collect();
    // Degrees of surviving vertices never change, so one pass over the
    // initial candidates suffices.
    let candidates: Vec<VertexId> = g
        .vertices()
        .filter(|v| !g.is_terminal(v) && g.degree(v) == 2)
        .cloned()
        .collect();
    for v in candidates {
        let nbrs: Vec<VertexId> = adj[&v].iter().cloned().collect();
        let [a, b] = nbrs.as_slice() else { unreachable!("candidate keeps degree 2") };
        assert!(!adj[a].contains(b), "contraction would create a parallel edge in a tree");
        adj.get_mut(a).unwrap().remove(&v);
        adj.get_mut(b).unwrap().remove(&v);
        adj.get_mut(a).unwrap().insert(b.clone());
        adj.get_mut(b).unwrap().insert(a.clone());
        adj.remove(&v);
    }
    let vertices: Vec<VertexId> = adj.keys().cloned().collect();
    let edges: Vec<(VertexId, VertexId, Rational)> = adj
        .iter()
        .flat_map(|(u, nbrs)| {
            nbrs.iter().filter(move |w| u < *w).map(move |w| (u.clone(), w.clone(), rat_int(1)))
        })
        .collect();
    CapacitatedGraph::new(vertices, g.terminals().cloned().collect::<Vec<_>>(), edges)
        .map_err(|_| TreeError::NotATree)
}

/// Splits the tree at every internal terminal (a terminal of degree ≥ 2),
/// replacing it in each incident subtree by a fresh leaf copy, and returns
/// the pieces together with the [`MergePlan`] that glues the copies back.
///
/// Copy naming: the copy in the piece merged first keeps the original
/// terminal name; later copies are `name#2`, `name#3`, … (suffixes skip any
/// identifier already taken). Because [`crate::graph::phi_merge`] keeps the
/// left name, replaying the plan on the untouched pieces rebuilds the input
/// exactly.
pub fn split_at_internal_terminals(
    g: &CapacitatedGraph,
) -> Result<(Vec<CapacitatedGraph>, MergePlan), TreeError> {
    ensure_tree(g)?;
    let split: BTreeSet<&VertexId> =
        g.terminals().filter(|t| g.degree(t) >= 2).collect();
    if split.is_empty() {
        return Ok((vec![g.clone()], MergePlan::default()));
    }

    // Union-find over edges: edges sharing a non-split endpoint belong to
    // the same piece.
    let edges: Vec<(&VertexId, &VertexId, &Rational)> = g.edges().collect();
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let mut touch: BTreeMap<&VertexId, usize> = BTreeMap::new();
    for (i, (u, v, _)) in edges.iter().enumerate() {
        for end in [u, v] {
            if split.contains(end) {
                continue;
            }
            match touch.get(end) {
                Some(&j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri.max(rj)] = ri.min(rj);
                }
                None => {
                    touch.insert(end, i);
                }
            }
        }
    }
    // Canonical components in first-edge order.
    let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_edges: Vec<Vec<usize>> = Vec::new();
    for i in 0..edges.len() {
        let r = find(&mut parent, i);
        let c = *comp_of_root.entry(r).or_insert_with(|| {
            comp_edges.push(Vec::new());
            comp_edges.len() - 1
        });
        comp_edges[c].push(i);
    }
    let comp_split_vertices: Vec<BTreeSet<&VertexId>> = comp_edges
        .iter()
        .map(|idxs| {
            idxs.iter()
                .flat_map(|&i| [edges[i].0, edges[i].1])
                .filter(|v| split.contains(*v))
                .collect()
        })
        .collect();

    // Attach order: breadth-first over pieces through shared split
    // vertices, starting from the canonical first piece. The first piece
    // that mentions a split vertex keeps its original name.
    let mut attach_order: Vec<usize> = vec![0];
    let mut attached: BTreeSet<usize> = BTreeSet::from([0]);
    let mut seen_split: BTreeSet<&VertexId> = comp_split_vertices[0].clone();
    while attach_order.len() < comp_edges.len() {
        let next = (0..comp_edges.len())
            .find(|c| {
                !attached.contains(c) && !comp_split_vertices[*c].is_disjoint(&seen_split)
            })
            .expect("tree pieces stay connected through split vertices");
        attached.insert(next);
        attach_order.push(next);
        seen_split.extend(comp_split_vertices[next].iter().copied());
    }

    // Assign copy names in attach order.
    let mut taken: BTreeSet<VertexId> = g.vertices().cloned().collect();
    let mut copy_count: BTreeMap<&VertexId, usize> = BTreeMap::new();
    // (attach position, split vertex) -> copy name
    let mut copy_name: BTreeMap<(usize, &VertexId), VertexId> = BTreeMap::new();
    for (pos, &c) in attach_order.iter().enumerate() {
        for &sv in &comp_split_vertices[c] {
            let n = copy_count.entry(sv).or_insert(0);
            *n += 1;
            let name = if *n == 1 {
                sv.clone()
            } else {
                let mut k = *n;
                loop {
                    let cand = format!("{sv}#{k}");
                    if !taken.contains(&cand) {
                        break cand;
                    }
                    k += 1;
                }
            };
            taken.insert(name.clone());
            copy_name.insert((pos, sv), name);
        }
    }

    let mut pieces = Vec::with_capacity(comp_edges.len());
    for (pos, &c) in attach_order.iter().enumerate() {
        let rename = |v: &VertexId| -> VertexId {
            copy_name.get(&(pos, v)).cloned().unwrap_or_else(|| v.clone())
        };
        let piece_edges: Vec<(VertexId, VertexId, Rational)> = comp_edges[c]
            .iter()
            .map(|&i| (rename(edges[i].0), rename(edges[i].1), edges[i].2.clone()))
            .collect();
        let mut terminals: Vec<VertexId> = comp_edges[c]
            .iter()
            .flat_map(|&i| [edges[i].0, edges[i].1])
            .filter(|v| g.is_terminal(v) && !split.contains(*v))
            .cloned()
            .collect();
        terminals.extend(comp_split_vertices[c].iter().map(|sv| rename(sv)));
        pieces.push(CapacitatedGraph::new(vec![], terminals, piece_edges).expect("piece is valid"));
    }

    let mut steps = Vec::new();
    let mut present: BTreeSet<&VertexId> = comp_split_vertices[attach_order[0]].clone();
    for (pos, &c) in attach_order.iter().enumerate().skip(1) {
        let mut pairs = Vec::new();
        for &sv in &comp_split_vertices[c] {
            if present.contains(sv) {
                pairs.push((sv.clone(), copy_name[&(pos, sv)].clone()));
            }
        }
        present.extend(comp_split_vertices[c].iter().copied());
        steps.push(MergeStep {
            left: 0,
            right: pos,
            corr: TerminalCorrespondence::new(pairs).expect("copy names are unique"),
        });
    }
    Ok((pieces, MergePlan { steps }))
}

/// Full preprocessing pipeline for unit trees: prune, contract, split.
pub fn prepare_components(
    g: &CapacitatedGraph,
) -> Result<(Vec<CapacitatedGraph>, MergePlan), TreeError> {
    let pruned = prune_nonterminal_leaves(g)?;
    let contracted = contract_degree2_nonterminals(&pruned)?;
    split_at_internal_terminals(&contracted)
}

/// Tree rooted at a non-terminal, with levels counted from the root and
/// children in identifier order. Only leaf-terminal trees can be rooted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    graph: CapacitatedGraph,
    root: VertexId,
    parent: BTreeMap<VertexId, VertexId>,
    children: BTreeMap<VertexId, Vec<VertexId>>,
    level: BTreeMap<VertexId, usize>,
}

impl RootedTree {
    pub fn graph(&self) -> &CapacitatedGraph {
        &self.graph
    }

    pub fn root(&self) -> &VertexId {
        &self.root
    }

    pub fn parent(&self, v: &str) -> Option<&VertexId> {
        self.parent.get(v)
    }

    pub fn children(&self, v: &str) -> &[VertexId] {
        self.children.get(v).map_or(&[], |c| c.as_slice())
    }

    pub fn child_count(&self, v: &str) -> usize {
        self.children(v).len()
    }

    /// Distance from the root.
    pub fn level(&self, v: &str) -> Option<usize> {
        self.level.get(v).copied()
    }

    /// Non-terminals ordered farthest-from-root first, ties by identifier;
    /// the processing order of the retraction sampler, which guarantees a
    /// vertex's children are resolved before the vertex itself.
    pub fn nonterminals_deepest_first(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> =
            self.graph.vertices().filter(|v| !self.graph.is_terminal(v)).cloned().collect();
        vs.sort_by_key(|v| (usize::MAX - self.level[v], v.clone()));
        vs
    }
}

/// A preprocessed piece ready for sparsification: either the degenerate
/// two-terminal single edge (its own exact sparsifier) or a rooted
/// leaf-terminal tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreparedTree {
    Edge { a: VertexId, b: VertexId, capacity: Rational },
    Rooted(RootedTree),
}

impl PreparedTree {
    pub fn graph_terminals(&self) -> Vec<VertexId> {
        match self {
            PreparedTree::Edge { a, b, .. } => vec![a.clone(), b.clone()],
            PreparedTree::Rooted(t) => t.graph().terminals().cloned().collect(),
        }
    }
}

/// Roots a leaf-terminal tree at its smallest-identifier non-terminal. A
/// two-vertex tree (both endpoints terminals) is flagged degenerate instead
/// of rooted.
pub fn root_tree(g: &CapacitatedGraph) -> Result<PreparedTree, TreeError> {
    ensure_tree(g)?;
    for v in g.vertices() {
        let is_leaf = g.degree(v) <= 1;
        if is_leaf != g.is_terminal(v) {
            return Err(TreeError::NotLeafTerminalForm(v.clone()));
        }
    }
    if g.vertex_count() == 2 {
        let mut it = g.edges();
        let (a, b, c) = it.next().expect("two-vertex tree has one edge");
        return Ok(PreparedTree::Edge { a: a.clone(), b: b.clone(), capacity: c.clone() });
    }
    let root = g
        .vertices()
        .find(|v| !g.is_terminal(v))
        .ok_or(TreeError::NoNonterminalRoot)?
        .clone();
    let mut parent = BTreeMap::new();
    let mut children: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut level = BTreeMap::from([(root.clone(), 0usize)]);
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(v) = queue.pop_front() {
        let lv = level[&v];
        let mut kids: Vec<VertexId> = g
            .neighbors(&v)
            .map(|(w, _)| w.clone())
            .filter(|w| !level.contains_key(w))
            .collect();
        kids.sort();
        for w in &kids {
            parent.insert(w.clone(), v.clone());
            level.insert(w.clone(), lv + 1);
            queue.push_back(w.clone());
        }
        children.insert(v.clone(), kids);
    }
    Ok(PreparedTree::Rooted(RootedTree { graph: g.clone(), root, parent, children, level }))
}
