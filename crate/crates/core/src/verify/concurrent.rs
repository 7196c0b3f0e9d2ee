//! Maximum concurrent flow through a two-hop path model.
//!
//! In quasi-bipartite and all-terminal graphs every simple path between two
//! terminals is either a direct edge or a two-hop detour through one
//! non-terminal, so the concurrent-flow LP stays small: one variable per
//! admissible path plus the common throughput factor. Solved exactly, the
//! optimal factor `lambda` satisfies `lambda = 1 / congestion` for the same
//! demand, which lets cut and flow certificates cross-check each other.

use super::maxflow::terminal_mincut;
use super::simplex::{solve, Constraint, LinearProgram, LpOutcome};
use super::VerifyError;
use crate::graph::{CapacitatedGraph, Demand, VertexId};
use crate::rational::Rational;
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

/// Flow assigned to one admissible path; `via` is the intermediate
/// non-terminal, or `None` for a direct edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFlow {
    pub from: VertexId,
    pub to: VertexId,
    pub via: Option<VertexId>,
    pub amount: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub lambda: Option<Rational>,
    pub flows: Vec<PathFlow>,
}

/// Largest `lambda` such that `lambda * demand` routes simultaneously within
/// the edge capacities of `g`.
///
/// A demand of zero scales arbitrarily, reported as an unbounded status. The
/// graph must keep its non-terminals independent; a demanded pair with no
/// direct edge and no shared non-terminal neighbour is unsupported.
pub fn max_concurrent_flow(
    g: &CapacitatedGraph,
    demand: &Demand,
) -> Result<LpSolution, VerifyError> {
    for (u, v, _) in g.edges() {
        if !g.is_terminal(u) && !g.is_terminal(v) {
            return Err(VerifyError::NonterminalAdjacency(u.clone(), v.clone()));
        }
    }
    for (u, v, _) in demand.iter() {
        for endpoint in [u, v] {
            if !g.is_terminal(endpoint) {
                return Err(VerifyError::UnknownTerminal(endpoint.clone()));
            }
        }
    }
    if demand.is_zero() {
        return Ok(LpSolution { status: LpStatus::Unbounded, lambda: None, flows: Vec::new() });
    }

    // Path variables per demanded pair: the direct edge first, then shared
    // non-terminal neighbours in name order.
    let mut paths: Vec<(VertexId, VertexId, Option<VertexId>)> = Vec::new();
    let mut pair_ranges: Vec<(Rational, std::ops::Range<usize>)> = Vec::new();
    for (a, b, d) in demand.iter() {
        let start = paths.len();
        if g.capacity(a, b).is_some() {
            paths.push((a.clone(), b.clone(), None));
        }
        for (u, _) in g.neighbors(a) {
            if !g.is_terminal(u) && g.capacity(u, b).is_some() {
                paths.push((a.clone(), b.clone(), Some(u.clone())));
            }
        }
        if paths.len() == start {
            return Err(VerifyError::UnsupportedTopology(a.clone(), b.clone()));
        }
        pair_ranges.push((d.clone(), start..paths.len()));
    }

    let vars = 1 + paths.len();
    let mut constraints = Vec::new();
    for (d, range) in &pair_ranges {
        let mut coeffs = vec![Rational::zero(); vars];
        coeffs[0] = d.clone();
        for i in range.clone() {
            coeffs[i + 1] = -Rational::one();
        }
        constraints.push(Constraint::le(coeffs, Rational::zero()));
    }
    let mut usage: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
    let edge_key = |u: &VertexId, v: &VertexId| {
        if u <= v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) }
    };
    for (i, (a, b, via)) in paths.iter().enumerate() {
        match via {
            None => usage.entry(edge_key(a, b)).or_default().push(i),
            Some(u) => {
                usage.entry(edge_key(a, u)).or_default().push(i);
                usage.entry(edge_key(u, b)).or_default().push(i);
            }
        }
    }
    for ((u, v), users) in &usage {
        let mut coeffs = vec![Rational::zero(); vars];
        for &i in users {
            coeffs[i + 1] = Rational::one();
        }
        let cap = g.capacity(u, v).expect("usage keys are edges").clone();
        constraints.push(Constraint::le(coeffs, cap));
    }
    let mut maximize = vec![Rational::zero(); vars];
    maximize[0] = Rational::one();

    match solve(&LinearProgram { maximize, constraints }) {
        LpOutcome::Optimal { value, point } => {
            let flows = paths
                .into_iter()
                .zip(point[1..].iter())
                .map(|((from, to, via), amount)| PathFlow {
                    from,
                    to,
                    via,
                    amount: amount.clone(),
                })
                .collect();
            Ok(LpSolution { status: LpStatus::Optimal, lambda: Some(value), flows })
        }
        LpOutcome::Unbounded => {
            Ok(LpSolution { status: LpStatus::Unbounded, lambda: None, flows: Vec::new() })
        }
        LpOutcome::Infeasible => {
            Ok(LpSolution { status: LpStatus::Infeasible, lambda: None, flows: Vec::new() })
        }
    }
}

/// Outcome of checking a sparsifier for exactness: every terminal mincut
/// must agree and every sampled demand's throughput must agree within the
/// tolerance. Witnesses name the first disagreement of each kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessReport {
    pub exact: bool,
    pub cut_witness: Option<BTreeSet<VertexId>>,
    pub flow_witness: Option<(usize, Rational)>,
}

/// Certify that `h` preserves `g` exactly: terminal mincuts are compared on
/// every bipartition and concurrent-flow values on every given demand.
pub fn verify_exact(
    g: &CapacitatedGraph,
    h: &CapacitatedGraph,
    demands: &[Demand],
    tolerance: &Rational,
) -> Result<ExactnessReport, VerifyError> {
    let terminals = g.terminal_set();
    let k = terminals.len();
    if h.terminal_set() != terminals {
        return Err(VerifyError::NotOnTerminals);
    }
    if k < 2 {
        return Err(VerifyError::EmptySide);
    }
    let cap = 16;
    if k > cap {
        return Err(VerifyError::TooManyTerminals { found: k, cap });
    }

    let ordered: Vec<&VertexId> = terminals.iter().collect();
    let mut cut_witness = None;
    let full = (1u64 << (k - 1)) - 1;
    for mask in 0..full {
        let mut side: BTreeSet<VertexId> = BTreeSet::from([ordered[0].clone()]);
        for (i, t) in ordered[1..].iter().enumerate() {
            if mask >> i & 1 == 1 {
                side.insert((*t).clone());
            }
        }
        if terminal_mincut(g, &side)? != terminal_mincut(h, &side)? {
            let witness = if 2 * side.len() > k {
                terminals.difference(&side).cloned().collect()
            } else {
                side
            };
            cut_witness = Some(witness);
            break;
        }
    }

    let mut flow_witness = None;
    for (index, demand) in demands.iter().enumerate() {
        let in_g = max_concurrent_flow(g, demand)?;
        let in_h = max_concurrent_flow(h, demand)?;
        let gap = match (&in_g.lambda, &in_h.lambda) {
            (Some(lg), Some(lh)) => (lg - lh).abs(),
            // Throughput is unbounded only for the zero demand, in which
            // case both sides agree.
            _ => Rational::zero(),
        };
        if gap > *tolerance {
            flow_witness = Some((index, gap));
            break;
        }
    }

    Ok(ExactnessReport {
        exact: cut_witness.is_none() && flow_witness.is_none(),
        cut_witness,
        flow_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_unit_quasi_bipartite, unit_star};
    use crate::quasi_bipartite::{exact_qb_sparsifier, qb_sparsifier};
    use crate::rational::{rat, rat_int};
    use crate::verify::congestion::tree_congestion;

    fn uniform_unit_demand(terminals: &[&str]) -> Demand {
        let mut d = Demand::new();
        for i in 0..terminals.len() {
            for j in (i + 1)..terminals.len() {
                d.set(terminals[i], terminals[j], rat_int(1)).unwrap();
            }
        }
        d
    }

    /// Pairs of terminals that the two-hop model can serve in `g`.
    fn supported_pairs(g: &CapacitatedGraph) -> Vec<(VertexId, VertexId)> {
        let terminals: Vec<&VertexId> = g.terminals().collect();
        let mut out = Vec::new();
        for i in 0..terminals.len() {
            for j in (i + 1)..terminals.len() {
                let (a, b) = (terminals[i], terminals[j]);
                let direct = g.capacity(a, b).is_some();
                let hub = g
                    .neighbors(a)
                    .any(|(u, _)| !g.is_terminal(u) && g.capacity(u, b).is_some());
                if direct || hub {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    fn assert_routable(g: &CapacitatedGraph, demand: &Demand, solution: &LpSolution) {
        let lambda = solution.lambda.as_ref().unwrap();
        for (a, b, d) in demand.iter() {
            let total: Rational = solution
                .flows
                .iter()
                .filter(|f| f.from == *a && f.to == *b)
                .map(|f| f.amount.clone())
                .sum();
            assert!(total >= lambda * d, "pair ({a}, {b}) underserved");
        }
        let mut load: BTreeMap<(VertexId, VertexId), Rational> = BTreeMap::new();
        let key = |u: &VertexId, v: &VertexId| {
            if u <= v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) }
        };
        for f in &solution.flows {
            match &f.via {
                None => *load.entry(key(&f.from, &f.to)).or_insert_with(Rational::zero) += &f.amount,
                Some(u) => {
                    *load.entry(key(&f.from, u)).or_insert_with(Rational::zero) += &f.amount;
                    *load.entry(key(u, &f.to)).or_insert_with(Rational::zero) += &f.amount;
                }
            }
        }
        for ((u, v), l) in &load {
            assert!(l <= g.capacity(u, v).unwrap(), "edge ({u}, {v}) overloaded");
        }
    }

    #[test]
    fn star_throughput_is_half_for_uniform_demand() {
        let star = unit_star(3);
        let demand = uniform_unit_demand(&["x1", "x2", "x3"]);
        let solution = max_concurrent_flow(&star, &demand).unwrap();
        assert_eq!(solution.status, LpStatus::Optimal);
        assert_eq!(solution.lambda, Some(rat(1, 2)));
        assert_routable(&star, &demand, &solution);
    }

    #[test]
    fn throughput_is_the_reciprocal_of_congestion() {
        for k in 2..=5 {
            let star = unit_star(k);
            let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let demand = uniform_unit_demand(&refs);
            let lambda = max_concurrent_flow(&star, &demand).unwrap().lambda.unwrap();
            let congestion = tree_congestion(&star, &demand).unwrap().quality;
            assert_eq!(lambda * congestion, rat_int(1));
        }
    }

    #[test]
    fn direct_edges_and_detours_add_up() {
        let g = CapacitatedGraph::new(
            ["x1", "x2", "u"].map(String::from),
            ["x1", "x2"].map(String::from),
            vec![
                ("x1".into(), "x2".into(), rat_int(1)),
                ("x1".into(), "u".into(), rat_int(1)),
                ("u".into(), "x2".into(), rat_int(1)),
            ],
        )
        .unwrap();
        let mut demand = Demand::new();
        demand.set("x1", "x2", rat_int(1)).unwrap();
        let solution = max_concurrent_flow(&g, &demand).unwrap();
        assert_eq!(solution.lambda, Some(rat_int(2)));
        assert_routable(&g, &demand, &solution);
    }

    #[test]
    fn zero_demand_scales_without_limit() {
        let solution = max_concurrent_flow(&unit_star(3), &Demand::new()).unwrap();
        assert_eq!(solution.status, LpStatus::Unbounded);
        assert_eq!(solution.lambda, None);
    }

    #[test]
    fn unreachable_pairs_and_deep_graphs_are_rejected() {
        let lonely = CapacitatedGraph::new(
            ["c", "x1", "x2", "x3"].map(String::from),
            ["x1", "x2", "x3"].map(String::from),
            vec![
                ("c".into(), "x1".into(), rat_int(1)),
                ("c".into(), "x2".into(), rat_int(1)),
            ],
        )
        .unwrap();
        let mut demand = Demand::new();
        demand.set("x1", "x3", rat_int(1)).unwrap();
        assert_eq!(
            max_concurrent_flow(&lonely, &demand),
            Err(VerifyError::UnsupportedTopology("x1".into(), "x3".into()))
        );

        let deep = crate::instances::unit_path(2);
        let mut end_to_end = Demand::new();
        end_to_end.set("x1", "x2", rat_int(1)).unwrap();
        assert_eq!(
            max_concurrent_flow(&deep, &end_to_end),
            Err(VerifyError::NonterminalAdjacency("v1".into(), "v2".into()))
        );

        let mut foreign = Demand::new();
        foreign.set("x1", "c", rat_int(1)).unwrap();
        assert_eq!(
            max_concurrent_flow(&unit_star(3), &foreign),
            Err(VerifyError::UnknownTerminal("c".into()))
        );
    }

    #[test]
    fn exact_sparsifier_passes_the_exactness_check() {
        for seed in 0..5 {
            let g = random_unit_quasi_bipartite(4, 6, seed);
            let h = exact_qb_sparsifier(&g).unwrap();
            let pairs = supported_pairs(&g);
            let mut demands = Vec::new();
            for (i, (a, b)) in pairs.iter().enumerate() {
                let mut d = Demand::new();
                d.set(a, b, rat_int(1 + i as i64 % 3)).unwrap();
                demands.push(d);
            }
            let report = verify_exact(&g, &h, &demands, &Rational::zero()).unwrap();
            assert!(report.exact, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn lossy_sparsifier_is_reported_with_witnesses() {
        let star = unit_star(3);
        let h = qb_sparsifier(&star).unwrap();
        let demands = vec![uniform_unit_demand(&["x1", "x2", "x3"])];
        let report = verify_exact(&star, &h, &demands, &Rational::zero()).unwrap();
        assert!(!report.exact);
        let witness: BTreeSet<VertexId> = [VertexId::from("x1")].into();
        assert_eq!(report.cut_witness, Some(witness));
        // The complete sparsifier reaches 2/3 where the star manages 1/2.
        assert_eq!(report.flow_witness, Some((0, rat(1, 6))));

        let lenient = verify_exact(&star, &h, &demands, &rat_int(1)).unwrap();
        assert!(!lenient.exact);
        assert_eq!(lenient.flow_witness, None);

        let same = verify_exact(&star, &star, &demands, &Rational::zero()).unwrap();
        assert!(same.exact);
    }
}
