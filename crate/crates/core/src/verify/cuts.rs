//! Cut-sparsifier quality by exhaustive bipartition enumeration.
//!
//! For every bipartition of the terminal set the base graph's minimum cut is
//! computed by max-flow and compared against the sparsifier's cut. The
//! extreme ratios certify domination (`min_ratio >= 1`) and quality
//! (`max_ratio`), each with an explicit witness bipartition.

use super::maxflow::{max_flow, terminal_mincut};
use super::VerifyError;
use crate::graph::{CapacitatedGraph, VertexId};
use crate::rational::Rational;
use num::{One, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct CutQualityOptions {
    /// Refuse to enumerate more than `2^(max_terminals - 1) - 1` bipartitions.
    pub max_terminals: usize,
    /// Keep the full per-bipartition table in the report.
    pub keep_table: bool,
}

impl Default for CutQualityOptions {
    fn default() -> Self {
        CutQualityOptions { max_terminals: 16, keep_table: false }
    }
}

/// One enumerated bipartition, identified by its smaller side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutRow {
    pub side: BTreeSet<VertexId>,
    pub base_mincut: Rational,
    pub sparsifier_cut: Rational,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualityReport {
    pub min_ratio: Rational,
    pub max_ratio: Rational,
    pub witness_min: BTreeSet<VertexId>,
    pub witness_max: BTreeSet<VertexId>,
    pub table: Option<Vec<CutRow>>,
}

impl QualityReport {
    /// The sparsifier never undercuts the base graph.
    pub fn dominates(&self) -> bool {
        self.min_ratio >= Rational::one()
    }

    /// Largest overestimate; the cut-sparsifier quality when domination holds.
    pub fn quality(&self) -> &Rational {
        &self.max_ratio
    }
}

fn smaller_side(side: &BTreeSet<VertexId>, terminals: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    if 2 * side.len() > terminals.len() {
        terminals.difference(side).cloned().collect()
    } else {
        side.clone()
    }
}

/// Compare every terminal bipartition's minimum cut in `g` against the cut
/// (or minimum cut, when `h` has helper vertices) in `h`.
///
/// `h` must carry the same terminal set as `g`. Ratios are exact; ties pick
/// the lexicographically smallest witness so reports are deterministic.
pub fn enumerate_cut_quality(
    g: &CapacitatedGraph,
    h: &CapacitatedGraph,
    options: &CutQualityOptions,
) -> Result<QualityReport, VerifyError> {
    let terminals = g.terminal_set();
    let k = terminals.len();
    if k < 2 {
        return Err(VerifyError::EmptySide);
    }
    if k > options.max_terminals {
        return Err(VerifyError::TooManyTerminals { found: k, cap: options.max_terminals });
    }
    if h.terminal_set() != terminals {
        return Err(VerifyError::NotOnTerminals);
    }
    let direct = h.vertex_set() == terminals;

    let ordered: Vec<&VertexId> = terminals.iter().collect();
    let anchor = ordered[0];
    let mut best_min: Option<(Rational, BTreeSet<VertexId>)> = None;
    let mut best_max: Option<(Rational, BTreeSet<VertexId>)> = None;
    let mut table = options.keep_table.then(Vec::new);

    let full = (1u64 << (k - 1)) - 1;
    for mask in 0..full {
        let mut side: BTreeSet<VertexId> = BTreeSet::from([anchor.clone()]);
        for (i, t) in ordered[1..].iter().enumerate() {
            if mask >> i & 1 == 1 {
                side.insert((*t).clone());
            }
        }
        let base = terminal_mincut(g, &side)?;
        let sparsified = if direct {
            h.cut_value(&side)
        } else {
            let rest: BTreeSet<VertexId> = terminals.difference(&side).cloned().collect();
            max_flow(h, &side, &rest)?
        };
        let witness = smaller_side(&side, terminals);
        let ratio = if base.is_zero() {
            if sparsified.is_zero() {
                Rational::one()
            } else {
                let listed = witness.iter().cloned().collect::<Vec<_>>().join(", ");
                return Err(VerifyError::UnboundedRatio(listed));
            }
        } else {
            &sparsified / &base
        };

        let lower = match &best_min {
            None => true,
            Some((r, w)) => ratio < *r || (ratio == *r && witness < *w),
        };
        if lower {
            best_min = Some((ratio.clone(), witness.clone()));
        }
        let higher = match &best_max {
            None => true,
            Some((r, w)) => ratio > *r || (ratio == *r && witness < *w),
        };
        if higher {
            best_max = Some((ratio.clone(), witness.clone()));
        }
        if let Some(rows) = &mut table {
            rows.push(CutRow { side: witness, base_mincut: base, sparsifier_cut: sparsified, ratio });
        }
    }

    let (min_ratio, witness_min) = best_min.expect("k >= 2 yields at least one bipartition");
    let (max_ratio, witness_max) = best_max.expect("k >= 2 yields at least one bipartition");
    Ok(QualityReport { min_ratio, max_ratio, witness_min, witness_max, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::expected_sparsifier;
    use crate::instances::{caterpillar, random_unit_tree, unit_star};
    use crate::rational::{rat, rat_int};

    fn side<const N: usize>(ids: [&str; N]) -> BTreeSet<VertexId> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    fn complete_uniform(k: usize, cap: Rational) -> CapacitatedGraph {
        let names: Vec<VertexId> = (1..=k).map(|i| format!("x{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                edges.push((names[i].clone(), names[j].clone(), cap.clone()));
            }
        }
        CapacitatedGraph::new(names.clone(), names, edges).unwrap()
    }

    #[test]
    fn caterpillar_report_matches_hand_enumeration() {
        let g = caterpillar();
        let h = expected_sparsifier(&g).unwrap();
        let report = enumerate_cut_quality(&g, &h, &CutQualityOptions::default()).unwrap();
        assert_eq!(report.min_ratio, rat_int(1));
        assert_eq!(report.witness_min, side(["x1"]));
        assert_eq!(report.max_ratio, rat(3, 2));
        assert_eq!(report.witness_max, side(["x2"]));
        assert!(report.dominates());
        assert_eq!(*report.quality(), rat(3, 2));
    }

    #[test]
    fn graph_against_itself_is_exact() {
        let g = random_unit_tree(20, 6, 0xc0ffee);
        let report = enumerate_cut_quality(&g, &g, &CutQualityOptions::default()).unwrap();
        assert_eq!(report.min_ratio, rat_int(1));
        assert_eq!(report.max_ratio, rat_int(1));
    }

    #[test]
    fn uniform_complete_graph_against_the_star() {
        let report = enumerate_cut_quality(
            &unit_star(4),
            &complete_uniform(4, rat(1, 2)),
            &CutQualityOptions::default(),
        )
        .unwrap();
        // Singletons overshoot by 3/2; balanced bipartitions are exact.
        assert_eq!(report.max_ratio, rat(3, 2));
        assert_eq!(report.witness_max, side(["x1"]));
        assert_eq!(report.min_ratio, rat_int(1));
        assert_eq!(report.witness_min, side(["x1", "x2"]));
    }

    #[test]
    fn table_lists_every_bipartition() {
        let g = unit_star(4);
        let h = complete_uniform(4, rat(1, 2));
        let options = CutQualityOptions { keep_table: true, ..Default::default() };
        let report = enumerate_cut_quality(&g, &h, &options).unwrap();
        let rows = report.table.as_ref().unwrap();
        assert_eq!(rows.len(), 7);
        for row in rows {
            assert!(row.ratio >= report.min_ratio && row.ratio <= report.max_ratio);
            assert_eq!(row.ratio, &row.sparsifier_cut / &row.base_mincut);
        }
    }

    #[test]
    fn terminal_cap_and_vertex_set_are_enforced() {
        let g = unit_star(4);
        let h = complete_uniform(4, rat(1, 2));
        let tight = CutQualityOptions { max_terminals: 3, ..Default::default() };
        assert_eq!(
            enumerate_cut_quality(&g, &h, &tight),
            Err(VerifyError::TooManyTerminals { found: 4, cap: 3 })
        );
        let wrong = complete_uniform(3, rat(1, 2));
        assert_eq!(
            enumerate_cut_quality(&g, &wrong, &CutQualityOptions::default()),
            Err(VerifyError::NotOnTerminals)
        );
    }

    #[test]
    fn zero_base_cuts_must_stay_zero() {
        let pairs = |edges: Vec<(&str, &str)>| {
            CapacitatedGraph::new(
                ["x1", "x2", "x3", "x4"].map(String::from),
                ["x1", "x2", "x3", "x4"].map(String::from),
                edges
                    .into_iter()
                    .map(|(u, v)| (u.to_string(), v.to_string(), rat_int(1)))
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        };
        let g = pairs(vec![("x1", "x2"), ("x3", "x4")]);
        let same = enumerate_cut_quality(&g, &g, &CutQualityOptions::default()).unwrap();
        assert_eq!(same.min_ratio, rat_int(1));
        assert_eq!(same.max_ratio, rat_int(1));

        let h = complete_uniform(4, rat(1, 2));
        assert_eq!(
            enumerate_cut_quality(&g, &h, &CutQualityOptions::default()),
            Err(VerifyError::UnboundedRatio("x1, x2".into()))
        );
    }
}
