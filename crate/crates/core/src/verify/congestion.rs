//! Exact congestion of demands routed through a tree.
//!
//! Trees route every demand along its unique path, so the optimal congestion
//! needs no LP: accumulate loads edge by edge and divide by capacity. When
//! the demand is a sparsifier's edge set, the worst congestion is the flow
//! quality of that sparsifier against the tree.

use super::VerifyError;
use crate::graph::{CapacitatedGraph, Demand, VertexId};
use crate::rational::Rational;
use num::Zero;
use std::collections::BTreeMap;

/// Per-edge routing loads certifying a congestion bound. `quality` is the
/// worst edge congestion; `bottleneck` names the first edge attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCertificate {
    pub quality: Rational,
    pub bottleneck: Option<(VertexId, VertexId)>,
    pub congestion: BTreeMap<(VertexId, VertexId), Rational>,
}

fn edge_key(u: &str, v: &str) -> (VertexId, VertexId) {
    if u <= v {
        (u.to_owned(), v.to_owned())
    } else {
        (v.to_owned(), u.to_owned())
    }
}

/// Route `demand` along unique tree paths and report per-edge congestion.
///
/// Demand endpoints must be terminals of the tree. An empty demand yields
/// quality zero with no bottleneck.
pub fn tree_congestion(
    tree: &CapacitatedGraph,
    demand: &Demand,
) -> Result<FlowCertificate, VerifyError> {
    if !tree.is_tree() {
        return Err(VerifyError::NotATree);
    }
    for (u, v, _) in demand.iter() {
        for endpoint in [u, v] {
            if !tree.is_terminal(endpoint) {
                return Err(VerifyError::UnknownTerminal(endpoint.clone()));
            }
        }
    }

    // Parent pointers from an arbitrary root give the unique paths.
    let root = tree.vertices().next().expect("trees are nonempty");
    let mut parent: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
    let mut depth: BTreeMap<&VertexId, usize> = BTreeMap::new();
    depth.insert(root, 0);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for (w, _) in tree.neighbors(v) {
            if !depth.contains_key(w) {
                depth.insert(w, depth[v] + 1);
                parent.insert(w, v);
                stack.push(w);
            }
        }
    }

    let mut load: BTreeMap<(VertexId, VertexId), Rational> = tree
        .edges()
        .map(|(u, v, _)| (edge_key(u, v), Rational::zero()))
        .collect();
    for (a, b, d) in demand.iter() {
        let (mut up, mut down) = (a, b);
        while depth[up] > depth[down] {
            let p = parent[up];
            *load.get_mut(&edge_key(up, p)).expect("tree edge") += d;
            up = p;
        }
        while depth[down] > depth[up] {
            let p = parent[down];
            *load.get_mut(&edge_key(down, p)).expect("tree edge") += d;
            down = p;
        }
        while up != down {
            let (pu, pd) = (parent[up], parent[down]);
            *load.get_mut(&edge_key(up, pu)).expect("tree edge") += d;
            *load.get_mut(&edge_key(down, pd)).expect("tree edge") += d;
            up = pu;
            down = pd;
        }
    }

    let mut congestion = BTreeMap::new();
    let mut quality = Rational::zero();
    let mut bottleneck = None;
    for ((u, v), l) in load {
        let cap = tree.capacity(&u, &v).expect("load keys are tree edges");
        let c = l / cap;
        if c > quality {
            quality = c.clone();
            bottleneck = Some((u.clone(), v.clone()));
        }
        congestion.insert((u, v), c);
    }
    Ok(FlowCertificate { quality, bottleneck, congestion })
}

/// Flow quality of an all-terminal sparsifier `h` against `tree`: the
/// congestion of routing every edge of `h` as a demand between its endpoints.
///
/// For the sparsifiers built here, which always dominate the tree, this
/// congestion equals the flow-sparsifier quality exactly.
pub fn flow_quality_tree(
    tree: &CapacitatedGraph,
    h: &CapacitatedGraph,
) -> Result<FlowCertificate, VerifyError> {
    if h.vertex_set() != tree.terminal_set() || h.terminal_set() != tree.terminal_set() {
        return Err(VerifyError::NotOnTerminals);
    }
    tree_congestion(tree, &Demand::from_capacities(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::expected_sparsifier;
    use crate::instances::{caterpillar, unit_path, unit_star};
    use crate::rational::{rat, rat_int};

    fn uniform_demand(terminals: &[&str], value: Rational) -> Demand {
        let mut d = Demand::new();
        for i in 0..terminals.len() {
            for j in (i + 1)..terminals.len() {
                d.set(terminals[i], terminals[j], value.clone()).unwrap();
            }
        }
        d
    }

    #[test]
    fn half_unit_complete_demand_on_a_star() {
        let star = unit_star(4);
        let demand = uniform_demand(&["x1", "x2", "x3", "x4"], rat(1, 2));
        let cert = tree_congestion(&star, &demand).unwrap();
        // Each ray carries three half-unit pairs.
        assert_eq!(cert.quality, rat(3, 2));
        assert_eq!(cert.bottleneck, Some(("c".into(), "x1".into())));
        for c in cert.congestion.values() {
            assert_eq!(*c, rat(3, 2));
        }
    }

    #[test]
    fn contraction_demand_concentrates_on_one_ray() {
        let k = 5;
        let star = unit_star(k);
        let mut demand = Demand::new();
        for j in 2..=k {
            demand.set("x1", &format!("x{j}"), rat_int(1)).unwrap();
        }
        let cert = tree_congestion(&star, &demand).unwrap();
        assert_eq!(cert.quality, rat_int(k as i64 - 1));
        assert_eq!(cert.bottleneck, Some(("c".into(), "x1".into())));
    }

    #[test]
    fn single_pair_fills_a_path_exactly() {
        let path = unit_path(3);
        let mut demand = Demand::new();
        demand.set("x1", "x2", rat_int(1)).unwrap();
        let cert = tree_congestion(&path, &demand).unwrap();
        assert_eq!(cert.quality, rat_int(1));
        assert_eq!(cert.congestion.len(), 4);
        for c in cert.congestion.values() {
            assert_eq!(*c, rat_int(1));
        }
    }

    #[test]
    fn empty_demand_is_free() {
        let cert = tree_congestion(&unit_star(3), &Demand::new()).unwrap();
        assert_eq!(cert.quality, rat_int(0));
        assert_eq!(cert.bottleneck, None);
    }

    #[test]
    fn caterpillar_sparsifier_has_flow_quality_three_halves() {
        let g = caterpillar();
        let h = expected_sparsifier(&g).unwrap();
        let cert = flow_quality_tree(&g, &h).unwrap();
        assert_eq!(cert.quality, rat(3, 2));
        assert_eq!(cert.bottleneck, Some(("v1".into(), "x2".into())));
        // The x1 ray carries its two half-unit demands.
        assert_eq!(cert.congestion[&("v0".into(), "x1".into())], rat_int(1));
        assert_eq!(cert.congestion[&("v0".into(), "v1".into())], rat_int(1));
    }

    #[test]
    fn star_sparsifier_quality_follows_the_terminal_count() {
        for k in 2..=6 {
            let star = unit_star(k);
            let h = expected_sparsifier(&star).unwrap();
            let cert = flow_quality_tree(&star, &h).unwrap();
            assert_eq!(cert.quality, rat(2 * (k as i64 - 1), k as i64));
        }
    }

    #[test]
    fn rejects_non_trees_and_foreign_endpoints() {
        let triangle = CapacitatedGraph::new(
            ["a", "b", "c"].map(String::from),
            ["a", "b"].map(String::from),
            vec![
                ("a".into(), "b".into(), rat_int(1)),
                ("b".into(), "c".into(), rat_int(1)),
                ("a".into(), "c".into(), rat_int(1)),
            ],
        )
        .unwrap();
        let mut demand = Demand::new();
        demand.set("a", "b", rat_int(1)).unwrap();
        assert_eq!(tree_congestion(&triangle, &demand), Err(VerifyError::NotATree));

        let star = unit_star(3);
        let mut foreign = Demand::new();
        foreign.set("x1", "c", rat_int(1)).unwrap();
        assert_eq!(
            tree_congestion(&star, &foreign),
            Err(VerifyError::UnknownTerminal("c".into()))
        );

        let h = expected_sparsifier(&star).unwrap();
        assert_eq!(flow_quality_tree(&unit_star(4), &h), Err(VerifyError::NotOnTerminals));
    }
}
