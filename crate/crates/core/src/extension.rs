//! Connected retractions of rooted trees and the sparsifiers they induce.
//!
//! A retraction maps every vertex to a terminal while fixing terminals. The
//! sampler picks, for each non-terminal from the deepest level upward, the
//! image of a uniformly random child; this keeps every fiber a connected
//! subtree. Contracting the fibers of a sampled retraction yields a random
//! terminal graph, and [`expected_sparsifier`] evaluates its exact
//! expectation in closed form through a path-product index instead of
//! averaging samples.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{BigInt, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{CapacitatedGraph, ModelError, VertexId};
use crate::rational::{rat, rat_int, Rational};
use crate::treeprep::{
    prune_nonterminal_leaves, root_tree, split_at_internal_terminals, PreparedTree, RootedTree,
    TreeError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("tree admits more than {limit} connected retractions")]
    TooManyExtensions { limit: usize },
    #[error("edge ({0}, {1}) is not in the tree")]
    UnknownEdge(VertexId, VertexId),
    #[error("capacity query needs two distinct terminals, got `{0}` twice")]
    SameTerminal(VertexId),
    #[error("`{0}` is not a leaf terminal of the tree")]
    NotALeafTerminal(VertexId),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A retraction f: V -> K fixing the terminals, together with the terminal
/// graph obtained by contracting its fibers. Each tree edge crossing two
/// fibers contributes its capacity to the induced edge between their
/// terminals; edges internal to a fiber are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroExtension {
    retraction: BTreeMap<VertexId, VertexId>,
    induced: CapacitatedGraph,
}

impl ZeroExtension {
    fn from_retraction(
        graph: &CapacitatedGraph,
        retraction: BTreeMap<VertexId, VertexId>,
    ) -> ZeroExtension {
        for v in graph.vertices() {
            let image = retraction.get(v).expect("every vertex is mapped");
            assert!(graph.is_terminal(image), "retraction images are terminals");
            if graph.is_terminal(v) {
                assert_eq!(image, v, "retraction fixes terminals");
            }
        }
        let mut edges: Vec<(VertexId, VertexId, Rational)> = Vec::new();
        for (u, v, c) in graph.edges() {
            let (a, b) = (&retraction[u], &retraction[v]);
            if a != b {
                edges.push((a.clone(), b.clone(), c.clone()));
            }
        }
        let terminals: Vec<VertexId> = graph.terminals().cloned().collect();
        let induced = CapacitatedGraph::new(terminals.clone(), terminals, edges)
            .expect("contracted fibers form a valid terminal graph");
        ZeroExtension { retraction, induced }
    }

    pub fn retract(&self, v: &str) -> &VertexId {
        &self.retraction[v]
    }

    pub fn retraction(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.retraction
    }

    pub fn induced_graph(&self) -> &CapacitatedGraph {
        &self.induced
    }

    /// Checks by traversal that every fiber f⁻¹(x) induces a connected
    /// subtree of `graph`.
    pub fn fibers_connected(&self, graph: &CapacitatedGraph) -> bool {
        for x in graph.terminals() {
            let fiber: BTreeSet<&VertexId> = self
                .retraction
                .iter()
                .filter(|(_, image)| *image == x)
                .map(|(v, _)| v)
                .collect();
            let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
            let mut queue: VecDeque<&VertexId> = VecDeque::new();
            seen.insert(x);
            queue.push_back(x);
            while let Some(v) = queue.pop_front() {
                for (w, _) in graph.neighbors(v) {
                    if fiber.contains(w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            if seen.len() != fiber.len() {
                return false;
            }
        }
        true
    }
}

fn identity_extension(a: &VertexId, b: &VertexId, capacity: &Rational) -> ZeroExtension {
    let graph = CapacitatedGraph::new(
        Vec::new(),
        vec![a.clone(), b.clone()],
        vec![(a.clone(), b.clone(), capacity.clone())],
    )
    .expect("two-terminal edge is a valid graph");
    let retraction = [(a.clone(), a.clone()), (b.clone(), b.clone())].into();
    ZeroExtension::from_retraction(&graph, retraction)
}

fn retraction_for_choices(
    tree: &RootedTree,
    order: &[VertexId],
    mut choice: impl FnMut(usize, usize) -> usize,
) -> BTreeMap<VertexId, VertexId> {
    let mut f: BTreeMap<VertexId, VertexId> = tree
        .graph()
        .terminals()
        .map(|x| (x.clone(), x.clone()))
        .collect();
    // Deepest-first order resolves every child before its parent, so the
    // looked-up image always exists.
    for (pos, v) in order.iter().enumerate() {
        let kids = tree.children(v);
        let pick = &kids[choice(pos, kids.len())];
        let image = f.get(pick).expect("children are resolved before parents").clone();
        f.insert(v.clone(), image);
    }
    f
}

/// Samples one connected retraction: non-terminals are processed from the
/// deepest level upward (ties by identifier) and each adopts the image of a
/// uniformly random child. The same seed always reproduces the same output.
pub fn sample_zero_extension(tree: &PreparedTree, seed: u64) -> ZeroExtension {
    let rt = match tree {
        PreparedTree::Edge { a, b, capacity } => return identity_extension(a, b, capacity),
        PreparedTree::Rooted(rt) => rt,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = rt.nonterminals_deepest_first();
    let f = retraction_for_choices(rt, &order, |_, n| rng.random_range(0..n));
    ZeroExtension::from_retraction(rt.graph(), f)
}

/// Enumerates all connected retractions with their probabilities under the
/// sampler. There are N = ∏ c_v of them (product of child counts over
/// non-terminals), each reached by exactly one choice vector, so every entry
/// carries probability 1/N and the probabilities sum to one.
pub fn enumerate_zero_extensions(
    tree: &PreparedTree,
    limit: usize,
) -> Result<Vec<(ZeroExtension, Rational)>, ExtensionError> {
    let rt = match tree {
        PreparedTree::Edge { a, b, capacity } => {
            return Ok(vec![(identity_extension(a, b, capacity), rat_int(1))]);
        }
        PreparedTree::Rooted(rt) => rt,
    };
    let order = rt.nonterminals_deepest_first();
    let radix: Vec<usize> = order.iter().map(|v| rt.child_count(v)).collect();
    let mut total: u128 = 1;
    for &r in &radix {
        total = total
            .checked_mul(r as u128)
            .filter(|t| *t <= limit as u128)
            .ok_or(ExtensionError::TooManyExtensions { limit })?;
    }
    let probability = Rational::new(BigInt::one(), BigInt::from(total));
    let mut out = Vec::with_capacity(total as usize);
    let mut counter = vec![0usize; order.len()];
    loop {
        let f = retraction_for_choices(rt, &order, |pos, _| counter[pos]);
        out.push((ZeroExtension::from_retraction(rt.graph(), f), probability.clone()));
        let mut pos = 0;
        while pos < counter.len() {
            counter[pos] += 1;
            if counter[pos] < radix[pos] {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
        if pos == counter.len() {
            return Ok(out);
        }
    }
}

/// Level down to which the ancestors of leaf terminal `x` all retract to
/// `x` itself. Level of `x` means no ancestor does; 0 means the whole root
/// path belongs to x's fiber.
pub fn expanded_level(tree: &RootedTree, ext: &ZeroExtension, x: &str) -> usize {
    let mut level = tree.level(x).expect("terminal is in the tree");
    let mut cur = x;
    while let Some(p) = tree.parent(cur) {
        if ext.retract(p).as_str() != x {
            break;
        }
        level -= 1;
        cur = p;
    }
    level
}

fn is_tree_edge(rt: &RootedTree, u: &str, v: &str) -> bool {
    rt.parent(u).is_some_and(|p| p == v) || rt.parent(v).is_some_and(|p| p == u)
}

fn path_crosses(rt: &RootedTree, a: &str, b: &str, u: &str, v: &str) -> bool {
    let hit = |x: &str, y: &str| (x == u && y == v) || (x == v && y == u);
    let mut pa = a;
    let mut pb = b;
    let mut la = rt.level(pa).expect("endpoint is in the tree");
    let mut lb = rt.level(pb).expect("endpoint is in the tree");
    while la > lb {
        let p = rt.parent(pa).expect("deeper vertex has a parent");
        if hit(pa, p) {
            return true;
        }
        pa = p;
        la -= 1;
    }
    while lb > la {
        let p = rt.parent(pb).expect("deeper vertex has a parent");
        if hit(pb, p) {
            return true;
        }
        pb = p;
        lb -= 1;
    }
    while pa != pb {
        let qa = rt.parent(pa).expect("vertices below the root have parents");
        let qb = rt.parent(pb).expect("vertices below the root have parents");
        if hit(pa, qa) || hit(pb, qb) {
            return true;
        }
        pa = qa;
        pb = qb;
    }
    false
}

/// Total capacity of induced terminal edges whose unique tree path crosses
/// the edge (u, v). This is the congestion the retraction places on that
/// edge when every induced demand routes along its tree path.
pub fn extension_load(
    tree: &PreparedTree,
    ext: &ZeroExtension,
    u: &str,
    v: &str,
) -> Result<Rational, ExtensionError> {
    let rt = match tree {
        PreparedTree::Edge { a, b, capacity } => {
            if (u == a && v == b) || (u == b && v == a) {
                return Ok(capacity.clone());
            }
            return Err(ExtensionError::UnknownEdge(u.into(), v.into()));
        }
        PreparedTree::Rooted(rt) => rt,
    };
    if !is_tree_edge(rt, u, v) {
        return Err(ExtensionError::UnknownEdge(u.into(), v.into()));
    }
    let mut load = rat_int(0);
    for (a, b, c) in ext.induced_graph().edges() {
        if path_crosses(rt, a, b, u, v) {
            load += c;
        }
    }
    Ok(load)
}

/// Immutable index answering lowest-common-ancestor queries and exact
/// products of 1/(child count) along root-path segments. Safe to share
/// across threads once built.
#[derive(Debug, Clone)]
pub struct PathProductIndex {
    inner: IndexInner,
}

#[derive(Debug, Clone)]
enum IndexInner {
    Edge { a: VertexId, b: VertexId, capacity: Rational },
    Tree(TreeIndex),
}

#[derive(Debug, Clone)]
struct TreeIndex {
    id: BTreeMap<VertexId, usize>,
    name: Vec<VertexId>,
    level: Vec<usize>,
    child_count: Vec<usize>,
    // up[j][v] is the 2^j-th ancestor; the root points at itself.
    up: Vec<Vec<usize>>,
    // prefix[v] = ∏ 1/c_u over strict ancestors u of v.
    prefix: Vec<Rational>,
    terminals: BTreeSet<VertexId>,
}

impl TreeIndex {
    fn build(rt: &RootedTree) -> TreeIndex {
        let name: Vec<VertexId> = rt.graph().vertices().cloned().collect();
        let id: BTreeMap<VertexId, usize> =
            name.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let n = name.len();
        let mut level = vec![0usize; n];
        let mut child_count = vec![0usize; n];
        let mut parent = vec![0usize; n];
        for (i, v) in name.iter().enumerate() {
            level[i] = rt.level(v).expect("vertex is in the rooted tree");
            child_count[i] = rt.child_count(v);
            parent[i] = rt.parent(v).map_or(i, |p| id[p]);
        }
        let depth = (usize::BITS - n.leading_zeros()) as usize;
        let mut up = vec![parent];
        for j in 1..depth {
            let prev = &up[j - 1];
            let next: Vec<usize> = (0..n).map(|v| prev[prev[v]]).collect();
            up.push(next);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| level[i]);
        let mut prefix = vec![Rational::one(); n];
        for i in order {
            let p = up[0][i];
            if p != i {
                let step = &prefix[p] * Rational::new(BigInt::one(), BigInt::from(child_count[p]));
                prefix[i] = step;
            }
        }
        TreeIndex {
            id,
            name,
            level,
            child_count,
            up,
            prefix,
            terminals: rt.graph().terminal_set().clone(),
        }
    }

    fn ancestor_at(&self, mut x: usize, target: usize) -> usize {
        let mut diff = self.level[x] - target;
        let mut j = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                x = self.up[j][x];
            }
            diff >>= 1;
            j += 1;
        }
        x
    }

    fn lca_idx(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) =
            if self.level[a] >= self.level[b] { (a, b) } else { (b, a) };
        x = self.ancestor_at(x, self.level[y]);
        if x == y {
            return x;
        }
        for j in (0..self.up.len()).rev() {
            if self.up[j][x] != self.up[j][y] {
                x = self.up[j][x];
                y = self.up[j][y];
            }
        }
        self.up[0][x]
    }
}

pub fn build_path_product_index(tree: &PreparedTree) -> PathProductIndex {
    let inner = match tree {
        PreparedTree::Edge { a, b, capacity } => IndexInner::Edge {
            a: a.clone(),
            b: b.clone(),
            capacity: capacity.clone(),
        },
        PreparedTree::Rooted(rt) => IndexInner::Tree(TreeIndex::build(rt)),
    };
    PathProductIndex { inner }
}

impl PathProductIndex {
    pub fn lca(&self, a: &str, b: &str) -> &VertexId {
        let IndexInner::Tree(t) = &self.inner else {
            panic!("degenerate two-terminal edge has no internal vertices");
        };
        &t.name[t.lca_idx(t.id[a], t.id[b])]
    }

    /// Product of 1/(child count) over the vertices on the root path of `x`
    /// strictly between `ancestor` and `x`.
    pub fn path_product_below(&self, x: &str, ancestor: &str) -> Rational {
        let IndexInner::Tree(t) = &self.inner else {
            panic!("degenerate two-terminal edge has no internal vertices");
        };
        let (xi, ai) = (t.id[x], t.id[ancestor]);
        debug_assert_eq!(t.lca_idx(xi, ai), ai, "ancestor lies on the root path of x");
        &t.prefix[xi] * rat_int(t.child_count[ai] as i64) / &t.prefix[ai]
    }
}

/// Probability that the random induced graph contains the edge (x, x'),
/// evaluated in closed form. With r the level of the lowest common ancestor
/// and c_j the child count of x's level-j ancestor,
/// P = 2 · (1/c_r) · ∏_{j=r+1}^{m_x−1} 1/c_j · ∏_{j=r+1}^{m_x'−1} 1/c'_j:
/// the two disjoint ways one endpoint's fiber reaches down past the fork to
/// touch the other's. Equal to the Monte-Carlo limit of sampled capacities.
pub fn closed_form_capacity(
    index: &PathProductIndex,
    x: &str,
    y: &str,
) -> Result<Rational, ExtensionError> {
    match &index.inner {
        IndexInner::Edge { a, b, capacity } => {
            if x == y {
                return Err(ExtensionError::SameTerminal(x.into()));
            }
            if (x == a && y == b) || (x == b && y == a) {
                Ok(capacity.clone())
            } else {
                let bad = if x != a && x != b { x } else { y };
                Err(ExtensionError::NotALeafTerminal(bad.into()))
            }
        }
        IndexInner::Tree(t) => {
            if x == y {
                return Err(ExtensionError::SameTerminal(x.into()));
            }
            for v in [x, y] {
                if !t.terminals.contains(v) {
                    return Err(ExtensionError::NotALeafTerminal(v.into()));
                }
            }
            let fork = index.lca(x, y).clone();
            let c_r = t.child_count[t.id[&fork]];
            Ok(rat(2, c_r as i64)
                * index.path_product_below(x, &fork)
                * index.path_product_below(y, &fork))
        }
    }
}

/// Exact expectation of the random contracted terminal graph: the convex
/// combination, over all connected retractions, of their induced graphs.
///
/// Prunes terminal-free branches, splits at internal terminals, evaluates
/// the closed-form capacity for every terminal pair inside each
/// leaf-terminal component, and reassembles the components on their shared
/// terminals. Degree-2 non-terminals are kept: eliminating them would
/// change which retractions exist and so change the expectation, and the
/// path-product index already answers each pair in O(log n) without that
/// size reduction. The output lives on exactly the terminal set of the
/// input.
pub fn expected_sparsifier(g: &CapacitatedGraph) -> Result<CapacitatedGraph, ExtensionError> {
    assert!(g.terminal_count() >= 2, "sparsification needs at least two terminals");
    if !g.has_unit_capacities() {
        return Err(TreeError::NotUnitCapacities.into());
    }
    let pruned = prune_nonterminal_leaves(g)?;
    let (pieces, plan) = split_at_internal_terminals(&pruned)?;
    let mut sparsified = Vec::with_capacity(pieces.len());
    for piece in &pieces {
        let prepared = root_tree(piece)?;
        let graph = match &prepared {
            PreparedTree::Edge { a, b, capacity } => CapacitatedGraph::new(
                Vec::new(),
                vec![a.clone(), b.clone()],
                vec![(a.clone(), b.clone(), capacity.clone())],
            )?,
            PreparedTree::Rooted(rt) => {
                let index = build_path_product_index(&prepared);
                let terminals: Vec<VertexId> = rt.graph().terminals().cloned().collect();
                let mut edges = Vec::new();
                for (i, x) in terminals.iter().enumerate() {
                    for y in &terminals[i + 1..] {
                        edges.push((x.clone(), y.clone(), closed_form_capacity(&index, x, y)?));
                    }
                }
                CapacitatedGraph::new(terminals.clone(), terminals, edges)?
            }
        };
        sparsified.push(graph);
    }
    Ok(plan.replay(sparsified)?)
}

/// Event that leaf terminal `x` is expanded exactly to level `level`: all
/// ancestors down to that level retract to x and the next one does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedLevelEvent {
    pub terminal: VertexId,
    pub level: usize,
    pub probability: Rational,
}

/// Distribution of the expansion level of a leaf terminal, from level m_x
/// (no ancestor joins the fiber) down to 0 (the whole root path does):
/// P = (1 − 1/c_{ℓ−1}) · ∏_{j=ℓ}^{m_x−1} 1/c_j for ℓ ≥ 1, and
/// P = ∏_{j=0}^{m_x−1} 1/c_j at ℓ = 0. The probabilities sum to one.
pub fn expansion_probabilities(
    tree: &RootedTree,
    x: &str,
) -> Result<Vec<ExpandedLevelEvent>, ExtensionError> {
    if !tree.graph().is_terminal(x) {
        return Err(ExtensionError::NotALeafTerminal(x.into()));
    }
    let m = tree.level(x).expect("terminal is in the tree");
    // counts[j] is the child count of x's ancestor at level j.
    let mut counts = vec![0usize; m];
    let mut cur = x;
    while let Some(p) = tree.parent(cur) {
        counts[tree.level(p).expect("ancestor is in the tree")] = tree.child_count(p);
        cur = p;
    }
    let mut events = Vec::with_capacity(m + 1);
    let mut suffix = rat_int(1);
    for level in (1..=m).rev() {
        let c = rat_int(counts[level - 1] as i64);
        events.push(ExpandedLevelEvent {
            terminal: x.into(),
            level,
            probability: (rat_int(1) - rat_int(1) / &c) * &suffix,
        });
        suffix /= c;
    }
    events.push(ExpandedLevelEvent { terminal: x.into(), level: 0, probability: suffix });
    Ok(events)
}
