//! Dense two-phase simplex over exact rationals.
//!
//! Small certification LPs do not need sparsity or floating point: a dense
//! tableau with Bland's smallest-index pivoting rule terminates on every
//! input and, because the arithmetic is exact, optimal values are returned
//! as the rationals they are. Variables are implicitly nonnegative and the
//! objective is always maximized; callers negate to minimize.

use crate::rational::Rational;
use num::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, relation: Relation::Le, rhs }
    }

    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, relation: Relation::Ge, rhs }
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, relation: Relation::Eq, rhs }
    }
}

/// Maximize `maximize · x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub maximize: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    /// `rows × (cols + 1)` matrix, right-hand side in the last column.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rational {
        &self.rows[row][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col].clone();
        for cell in &mut self.rows[row] {
            *cell /= &scale;
        }
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for c in 0..=self.cols {
                let delta = &factor * &self.rows[row][c];
                self.rows[r][c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced cost `z_j - c_j` for a nonbasic column under `costs`.
    fn reduced_cost(&self, costs: &[Rational], col: usize) -> Rational {
        let mut z = -costs[col].clone();
        for (i, row) in self.rows.iter().enumerate() {
            if !costs[self.basis[i]].is_zero() && !row[col].is_zero() {
                z += &costs[self.basis[i]] * &row[col];
            }
        }
        z
    }

    /// Bland's rule: enter the smallest improving column, leave on the
    /// smallest basic index among minimum-ratio rows. Never cycles.
    fn run(&mut self, costs: &[Rational], allowed: &[bool]) -> PhaseEnd {
        loop {
            let entering = (0..self.cols).find(|&j| {
                allowed[j]
                    && !self.basis.contains(&j)
                    && self.reduced_cost(costs, j).is_negative()
            });
            let Some(col) = entering else {
                return PhaseEnd::Optimal;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][col].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / &self.rows[i][col];
                let better = match &leaving {
                    None => true,
                    Some((row, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*row])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return PhaseEnd::Unbounded;
            };
            self.pivot(row, col);
        }
    }

    fn objective_value(&self, costs: &[Rational]) -> Rational {
        let mut value = Rational::zero();
        for (i, _) in self.rows.iter().enumerate() {
            if !costs[self.basis[i]].is_zero() {
                value += &costs[self.basis[i]] * self.rhs(i);
            }
        }
        value
    }
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.maximize.len();
    for c in &lp.constraints {
        assert_eq!(c.coeffs.len(), n, "constraint width must match the variable count");
    }

    // Normalize to nonnegative right-hand sides so the initial slack or
    // artificial basis is feasible.
    let mut normalized: Vec<(Vec<Rational>, Relation, Rational)> = lp
        .constraints
        .iter()
        .map(|c| (c.coeffs.clone(), c.relation, c.rhs.clone()))
        .collect();
    for (coeffs, relation, rhs) in &mut normalized {
        if rhs.is_negative() {
            for a in coeffs.iter_mut() {
                *a = -a.clone();
            }
            *rhs = -rhs.clone();
            *relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = normalized.len();
    let slack_cols: usize = normalized
        .iter()
        .filter(|(_, rel, _)| !matches!(rel, Relation::Eq))
        .count();
    let artificial_cols: usize = normalized
        .iter()
        .filter(|(_, rel, _)| !matches!(rel, Relation::Le))
        .count();
    let cols = n + slack_cols + artificial_cols;

    let mut tableau = Tableau { rows: Vec::with_capacity(m), basis: vec![0; m], cols };
    let mut artificial = vec![false; cols];
    let mut next_slack = n;
    let mut next_artificial = n + slack_cols;
    for (i, (coeffs, relation, rhs)) in normalized.iter().enumerate() {
        let mut row = vec![Rational::zero(); cols + 1];
        row[..n].clone_from_slice(coeffs);
        row[cols] = rhs.clone();
        match relation {
            Relation::Le => {
                row[next_slack] = Rational::from_integer(1.into());
                tableau.basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = Rational::from_integer((-1).into());
                next_slack += 1;
                row[next_artificial] = Rational::from_integer(1.into());
                artificial[next_artificial] = true;
                tableau.basis[i] = next_artificial;
                next_artificial += 1;
            }
            Relation::Eq => {
                row[next_artificial] = Rational::from_integer(1.into());
                artificial[next_artificial] = true;
                tableau.basis[i] = next_artificial;
                next_artificial += 1;
            }
        }
        tableau.rows.push(row);
    }

    if artificial_cols > 0 {
        // Phase one: maximize minus the artificial sum; zero means feasible.
        let phase_costs: Vec<Rational> = (0..cols)
            .map(|j| {
                if artificial[j] {
                    -Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let everything = vec![true; cols];
        match tableau.run(&phase_costs, &everything) {
            PhaseEnd::Unbounded => unreachable!("artificial sum is bounded below by zero"),
            PhaseEnd::Optimal => {}
        }
        if tableau.objective_value(&phase_costs).is_negative() {
            return LpOutcome::Infeasible;
        }
        // Pivot leftover artificials out of the basis; rows that cannot be
        // pivoted are redundant and dropped.
        let mut row = 0;
        while row < tableau.rows.len() {
            if artificial[tableau.basis[row]] {
                let replacement =
                    (0..cols).find(|&j| !artificial[j] && !tableau.rows[row][j].is_zero());
                match replacement {
                    Some(col) => tableau.pivot(row, col),
                    None => {
                        tableau.rows.remove(row);
                        tableau.basis.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }
    }

    let mut costs = vec![Rational::zero(); cols];
    costs[..n].clone_from_slice(&lp.maximize);
    let allowed: Vec<bool> = (0..cols).map(|j| !artificial[j]).collect();
    match tableau.run(&costs, &allowed) {
        PhaseEnd::Unbounded => return LpOutcome::Unbounded,
        PhaseEnd::Optimal => {}
    }

    let mut point = vec![Rational::zero(); n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            point[b] = tableau.rhs(i).clone();
        }
    }
    LpOutcome::Optimal { value: tableau.objective_value(&costs), point }
}
