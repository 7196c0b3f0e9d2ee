//! Canonical fixtures and seeded random instance generators shared by the
//! test suites and the bench command. Everything here is deterministic:
//! equal arguments and seeds produce byte-identical graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{CapacitatedGraph, Demand, VertexId};
use crate::rational::{rat, rat_int, Rational};

/// Star with non-terminal center `c` and unit rays to terminals `x1..xk`.
pub fn unit_star(k: usize) -> CapacitatedGraph {
    assert!(k >= 2, "a star instance needs at least two terminals");
    let terminals: Vec<VertexId> = (1..=k).map(|i| format!("x{i}")).collect();
    let edges = terminals.iter().map(|t| ("c".to_owned(), t.clone(), rat_int(1))).collect::<Vec<_>>();
    CapacitatedGraph::new(vec![], terminals, edges).unwrap()
}

/// Two-level tree: root `v0` has children `x1` and `v1`; `v1` has children
/// `x2` and `x3`. The smallest tree whose retraction distribution is not a
/// plain star, and the worked example for most capacity formulas.
pub fn caterpillar() -> CapacitatedGraph {
    let e = |a: &str, b: &str| (a.to_owned(), b.to_owned(), rat_int(1));
    CapacitatedGraph::new(
        vec![],
        vec!["x1".into(), "x2".into(), "x3".into()],
        vec![e("v0", "x1"), e("v0", "v1"), e("v1", "x2"), e("v1", "x3")],
    )
    .unwrap()
}

/// Path `x1 - v1 - … - v_inner - x2` with unit capacities; contracts to a
/// single edge.
pub fn unit_path(inner: usize) -> CapacitatedGraph {
    let mut names = vec!["x1".to_owned()];
    names.extend((1..=inner).map(|i| format!("v{i}")));
    names.push("x2".to_owned());
    let edges = names
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone(), rat_int(1)))
        .collect::<Vec<_>>();
    CapacitatedGraph::new(vec![], vec!["x1".into(), "x2".into()], edges).unwrap()
}

/// Star with center `u` and the given positive integer ray capacities to
/// terminals `x1..xn`.
pub fn weighted_star(caps: &[i64]) -> CapacitatedGraph {
    let edges = caps
        .iter()
        .enumerate()
        .map(|(i, c)| ("u".to_owned(), format!("x{}", i + 1), rat_int(*c)))
        .collect::<Vec<_>>();
    let terminals = (1..=caps.len()).map(|i| format!("x{i}")).collect::<Vec<_>>();
    CapacitatedGraph::new(vec![], terminals, edges).unwrap()
}

/// Random unit tree on `n` vertices (`v00`, `v01`, …) built by preferential
/// attachment to a uniform earlier vertex, with `k` distinct random
/// terminals.
pub fn random_unit_tree(n: usize, k: usize, seed: u64) -> CapacitatedGraph {
    assert!(n >= 2 && (2..=n).contains(&k), "need n ≥ 2 and 2 ≤ k ≤ n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = |i: usize| format!("v{i:02}");
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((name(j), name(i), rat_int(1)));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let terminals = idx[..k].iter().map(|&i| name(i)).collect::<Vec<_>>();
    CapacitatedGraph::new(vec![], terminals, edges).unwrap()
}

/// Random unit tree in leaf-terminal form: a random internal tree on
/// non-terminals with terminals `x1..xk` attached as leaves; internal
/// branches that end without a terminal are pruned.
pub fn random_leaf_terminal_tree(internal: usize, k: usize, seed: u64) -> CapacitatedGraph {
    assert!(internal >= 1 && k >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = |i: usize| format!("v{i:02}");
    let mut edges = Vec::new();
    for i in 1..internal {
        let j = rng.random_range(0..i);
        edges.push((name(j), name(i), rat_int(1)));
    }
    let mut terminals = Vec::with_capacity(k);
    for t in 1..=k {
        let host = rng.random_range(0..internal);
        terminals.push(format!("x{t}"));
        edges.push((name(host), format!("x{t}"), rat_int(1)));
    }
    let g = CapacitatedGraph::new(vec![], terminals, edges).unwrap();
    crate::treeprep::prune_nonterminal_leaves(&g).expect("generated graph is a tree")
}

/// Random unit quasi-bipartite instance: terminals `x1..xk`, non-terminal
/// centers `u1..um`. Center `u1` is adjacent to every terminal so the
/// instance is connected; the rest pick a uniform nonempty terminal subset.
pub fn random_unit_quasi_bipartite(k: usize, centers: usize, seed: u64) -> CapacitatedGraph {
    assert!((2..=16).contains(&k) && centers >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for t in 1..=k {
        edges.push(("u1".to_owned(), format!("x{t}"), rat_int(1)));
    }
    for c in 2..=centers {
        let mask = rng.random_range(1u32..(1 << k));
        for t in 1..=k {
            if mask & (1 << (t - 1)) != 0 {
                edges.push((format!("u{c}"), format!("x{t}"), rat_int(1)));
            }
        }
    }
    let terminals = (1..=k).map(|t| format!("x{t}")).collect::<Vec<_>>();
    CapacitatedGraph::new(vec![], terminals, edges).unwrap()
}

/// Random demand supported on `pairs` distinct terminal pairs with small
/// positive rational values.
pub fn random_demand(terminals: &[VertexId], pairs: usize, seed: u64) -> Demand {
    assert!(terminals.len() >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all_pairs = Vec::new();
    for i in 0..terminals.len() {
        for j in (i + 1)..terminals.len() {
            all_pairs.push((terminals[i].clone(), terminals[j].clone()));
        }
    }
    for i in 0..pairs.min(all_pairs.len()) {
        let j = rng.random_range(i..all_pairs.len());
        all_pairs.swap(i, j);
    }
    let mut d = Demand::new();
    for (u, v) in all_pairs.iter().take(pairs) {
        let value: Rational = rat(rng.random_range(1..=4), rng.random_range(1..=3));
        d.set(u, v, value).expect("generated pairs are distinct");
    }
    d
}
