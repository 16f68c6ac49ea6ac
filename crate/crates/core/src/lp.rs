//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex over `BigRational` with Bland's rule for
//! both the entering and the leaving variable, so it terminates on
//! degenerate problems. Sizes here are a few dozen rows and columns.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective . x` subject to the constraints; each variable is
/// either non-negative or free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    nonnegative: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    /// A program over `num_vars` non-negative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            nonnegative: vec![true; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> Result<&mut Self> {
        if objective.len() != self.num_vars {
            return Err(Error::InvalidArgument(format!(
                "objective has {} coefficients for {} variables",
                objective.len(),
                self.num_vars
            )));
        }
        self.objective = objective;
        Ok(self)
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.nonnegative[var] = false;
        self
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<&mut Self> {
        if coeffs.len() != self.num_vars {
            return Err(Error::InvalidArgument(format!(
                "constraint has {} coefficients for {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(self)
    }

    pub fn objective_value(&self, point: &[Rational]) -> Rational {
        dot(&self.objective, point)
    }

    /// Exact feasibility check of `point`.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        if point.len() != self.num_vars {
            return false;
        }
        let signs_ok = point
            .iter()
            .zip(&self.nonnegative)
            .all(|(x, &nonneg)| !nonneg || !x.is_negative());
        signs_ok
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, point);
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn solve(&self) -> LpOutcome {
        // Column layout: for each original variable one column, plus a
        // negative-part column for free variables; then slack/surplus; then
        // artificials.
        let mut columns_of = Vec::with_capacity(self.num_vars);
        let mut structural = 0;
        for &nonneg in &self.nonnegative {
            if nonneg {
                columns_of.push((structural, None));
                structural += 1;
            } else {
                columns_of.push((structural, Some(structural + 1)));
                structural += 2;
            }
        }
        let slack_count = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let m = self.constraints.len();
        let first_slack = structural;
        let first_artificial = structural + slack_count;

        // Normalize to non-negative right-hand sides first, so we know which
        // rows need an artificial.
        let mut normalized = Vec::with_capacity(m);
        for c in &self.constraints {
            let mut row = vec![Rational::zero(); structural];
            for (v, a) in c.coeffs.iter().enumerate() {
                let (pos, neg) = columns_of[v];
                row[pos] = a.clone();
                if let Some(neg) = neg {
                    row[neg] = -a;
                }
            }
            let (row, relation, rhs) = if c.rhs.is_negative() {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (
                    row.into_iter().map(|a| -a).collect(),
                    flipped,
                    -c.rhs.clone(),
                )
            } else {
                (row, c.relation, c.rhs.clone())
            };
            normalized.push((row, relation, rhs));
        }
        let artificial_count = normalized
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Le)
            .count();
        let ncols = first_artificial + artificial_count;

        let mut tab = Tableau {
            rows: Vec::with_capacity(m),
            basis: Vec::with_capacity(m),
            ncols,
        };
        let mut next_slack = first_slack;
        let mut next_artificial = first_artificial;
        for (coeffs, relation, rhs) in normalized {
            let mut row = coeffs;
            row.resize(ncols + 1, Rational::zero());
            row[ncols] = rhs;
            match relation {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    tab.basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_artificial] = Rational::one();
                    tab.basis.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = Rational::one();
                    tab.basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            tab.rows.push(row);
        }

        // Phase 1: maximize -(sum of artificials).
        if artificial_count > 0 {
            let mut cost = vec![Rational::zero(); ncols];
            for c in cost.iter_mut().skip(first_artificial) {
                *c = -Rational::one();
            }
            let eligible = vec![true; ncols];
            let bounded = tab.optimize(&cost, &eligible);
            debug_assert!(bounded, "phase 1 is bounded by zero");
            if tab.value(&cost).is_negative() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-valued artificials out of the basis; drop redundant rows.
            let mut r = 0;
            while r < tab.rows.len() {
                if tab.basis[r] >= first_artificial {
                    match (0..first_artificial).find(|&c| !tab.rows[r][c].is_zero()) {
                        Some(c) => {
                            tab.pivot(r, c);
                            r += 1;
                        }
                        None => {
                            tab.rows.remove(r);
                            tab.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
        }

        // Phase 2.
        let mut cost = vec![Rational::zero(); ncols];
        for (v, a) in self.objective.iter().enumerate() {
            let (pos, neg) = columns_of[v];
            cost[pos] = a.clone();
            if let Some(neg) = neg {
                cost[neg] = -a;
            }
        }
        let eligible: Vec<bool> = (0..ncols).map(|c| c < first_artificial).collect();
        if !tab.optimize(&cost, &eligible) {
            return LpOutcome::Unbounded;
        }

        let mut column_values = vec![Rational::zero(); ncols];
        for (r, &b) in tab.basis.iter().enumerate() {
            column_values[b] = tab.rows[r][ncols].clone();
        }
        let point: Vec<Rational> = columns_of
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &column_values[pos] - &column_values[neg],
                None => column_values[pos].clone(),
            })
            .collect();
        LpOutcome::Optimal {
            value: self.objective_value(&point),
            point,
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Tableau {
    /// Each row holds `ncols` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for a in self.rows[r].iter_mut() {
            *a *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (a, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rows)
            .map(|(&b, row)| &cost[b] * &row[self.ncols])
            .sum()
    }

    /// Maximizes `cost . x` over the current basis. Returns `false` when
    /// the objective is unbounded.
    fn optimize(&mut self, cost: &[Rational], eligible: &[bool]) -> bool {
        loop {
            let entering = (0..self.ncols).find(|&c| {
                eligible[c] && !self.basis.contains(&c) && self.reduced_cost(cost, c).is_positive()
            });
            let Some(c) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[c];
                let better = match &leaving {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn reduced_cost(&self, cost: &[Rational], c: usize) -> Rational {
        let mut d = cost[c].clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !row[c].is_zero() && !cost[b].is_zero() {
                d -= &cost[b] * &row[c];
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn qs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&n| q(n)).collect()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.maximize(qs(&[3, 5])).unwrap();
        lp.add_constraint(qs(&[1, 0]), Relation::Le, q(4)).unwrap();
        lp.add_constraint(qs(&[0, 2]), Relation::Le, q(12)).unwrap();
        lp.add_constraint(qs(&[3, 2]), Relation::Le, q(18)).unwrap();
        match lp.solve() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, q(36));
                assert_eq!(point, qs(&[2, 6]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_and_free_variable() {
        // max e s.t. x + y = 1, x - e >= 0, y - e >= 0, e free -> e = 1/2
        let mut lp = LinearProgram::new(3);
        lp.maximize(qs(&[0, 0, 1])).unwrap();
        lp.set_free(2);
        lp.add_constraint(qs(&[1, 1, 0]), Relation::Eq, q(1))
            .unwrap();
        lp.add_constraint(qs(&[1, 0, -1]), Relation::Ge, q(0))
            .unwrap();
        lp.add_constraint(qs(&[0, 1, -1]), Relation::Ge, q(0))
            .unwrap();
        match lp.solve() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, Rational::new(1.into(), 2.into()));
                assert!(lp.is_feasible(&point));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_free_optimum() {
        // max e, e <= -3, e free
        let mut lp = LinearProgram::new(1);
        lp.maximize(qs(&[1])).unwrap();
        lp.set_free(0);
        lp.add_constraint(qs(&[1]), Relation::Le, q(-3)).unwrap();
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                value: q(-3),
                point: qs(&[-3])
            }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_constraint(qs(&[1]), Relation::Ge, q(2)).unwrap();
        lp.add_constraint(qs(&[1]), Relation::Le, q(1)).unwrap();
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.maximize(qs(&[1, 1])).unwrap();
        lp.add_constraint(qs(&[1, -1]), Relation::Le, q(1)).unwrap();
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.maximize(qs(&[1, 0])).unwrap();
        lp.add_constraint(qs(&[1, 1]), Relation::Eq, q(1)).unwrap();
        lp.add_constraint(qs(&[2, 2]), Relation::Eq, q(2)).unwrap();
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                value: q(1),
                point: qs(&[1, 0])
            }
        );
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example: cycles under the largest-coefficient rule.
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        let mut lp = LinearProgram::new(4);
        lp.maximize(vec![r(3, 4), q(-150), r(1, 50), q(-6)])
            .unwrap();
        lp.add_constraint(vec![r(1, 4), q(-60), r(-1, 25), q(9)], Relation::Le, q(0))
            .unwrap();
        lp.add_constraint(vec![r(1, 2), q(-90), r(-1, 50), q(3)], Relation::Le, q(0))
            .unwrap();
        lp.add_constraint(vec![q(0), q(0), q(1), q(0)], Relation::Le, q(1))
            .unwrap();
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(1, 20)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        let mut lp = LinearProgram::new(2);
        assert!(lp.add_constraint(qs(&[1]), Relation::Le, q(1)).is_err());
        assert!(lp.maximize(qs(&[1, 2, 3])).is_err());
    }
}
