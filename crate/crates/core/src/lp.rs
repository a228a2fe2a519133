//! Dense two-phase simplex for the small feasibility programs behind the
//! F-property test and the degenerate branches of the enumeration oracle.
//!
//! Problems have the form `max cᵀy` subject to row constraints and `y ≥ 0`.

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// After this many Dantzig pivots the solver switches to Bland's rule.
pub const BLAND_AFTER: usize = 1000;
const MAX_PIVOTS: usize = 50_000;
const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        }
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs,
        }
    }

    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        }
    }

    /// Amount by which `y` violates the constraint (0 when satisfied).
    pub fn violation(&self, y: &[f64]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(y).map(|(a, b)| a * b).sum();
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vector },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(f64, &Vector)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((*value, point)),
            _ => None,
        }
    }
}

/// Maximizes `cᵀy` over `y ≥ 0` and `constraints`.
pub fn lp_feasibility(c: &Vector, constraints: &[Constraint]) -> Result<LpOutcome> {
    let n = c.dim();
    if let Some(bad) = constraints.iter().find(|k| k.coeffs.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.coeffs.len(),
        });
    }
    Tableau::build(n, constraints).solve(c)
}

struct Tableau {
    n: usize,
    // Constraint rows; each row has `cols + 1` entries, the last one the rhs.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn build(n: usize, constraints: &[Constraint]) -> Tableau {
        let k = constraints.len();
        let slacks = constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let artificials = constraints
            .iter()
            .filter(|c| {
                let flip = c.rhs < 0.0;
                match c.relation {
                    Relation::Le => flip,
                    Relation::Ge => !flip,
                    Relation::Eq => true,
                }
            })
            .count();
        let first_artificial = n + slacks;
        let cols = first_artificial + artificials;

        let mut rows = Vec::with_capacity(k);
        let mut basis = Vec::with_capacity(k);
        let mut next_slack = n;
        let mut next_art = first_artificial;
        for c in constraints {
            let sign = if c.rhs < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; cols + 1];
            for (dst, a) in row.iter_mut().zip(&c.coeffs) {
                *dst = sign * a;
            }
            row[cols] = sign * c.rhs;
            // After normalizing the rhs to be nonnegative a `≤` row may have
            // become a `≥` row and vice versa.
            let relation = match (c.relation, sign < 0.0) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match relation {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            n,
            rows,
            basis,
            cols,
            first_artificial,
            pivots: 0,
        }
    }

    fn solve(mut self, c: &Vector) -> Result<LpOutcome> {
        if self.first_artificial < self.cols {
            let phase1: Vec<f64> = (0..self.cols)
                .map(|j| {
                    if j >= self.first_artificial {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let (value, bounded) = self.optimize(&phase1, self.cols)?;
            debug_assert!(bounded, "phase one is bounded by construction");
            let scale = 1.0
                + self
                    .rows
                    .iter()
                    .map(|r| r[self.cols].abs())
                    .fold(0.0, f64::max);
            if value < -FEAS_EPS * scale {
                return Ok(LpOutcome::Infeasible);
            }
            self.drive_out_artificials();
        }

        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(c);
        let (value, bounded) = self.optimize(&cost, self.first_artificial)?;
        if !bounded {
            return Ok(LpOutcome::Unbounded);
        }
        let mut point = Vector::zeros(self.n);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n {
                point[b] = row[self.cols].max(0.0);
            }
        }
        Ok(LpOutcome::Optimal { value, point })
    }

    // Runs primal simplex on `cost` with entering columns restricted to
    // `0..allowed`. Returns the objective value and whether it is bounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<(f64, bool)> {
        loop {
            let reduced = self.reduced_costs(cost, allowed);
            let bland = self.pivots >= BLAND_AFTER;
            let entering = if bland {
                reduced.iter().position(|&r| r < -COST_EPS)
            } else {
                reduced
                    .iter()
                    .enumerate()
                    .filter(|(_, &r)| r < -COST_EPS)
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(j, _)| j)
            };
            let Some(col) = entering else {
                let value = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| cost[b] * row[self.cols])
                    .sum();
                return Ok((value, true));
            };

            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = row[self.cols] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((j, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[i] < self.basis[j] {
                            Some((i, ratio))
                        } else {
                            Some((j, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok((f64::INFINITY, false));
            };
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::IterationLimit {
                    what: "simplex",
                    limit: MAX_PIVOTS,
                });
            }
            self.pivot(row, col);
        }
    }

    fn reduced_costs(&self, cost: &[f64], allowed: usize) -> Vec<f64> {
        (0..allowed)
            .map(|j| {
                if self.basis.contains(&j) {
                    return 0.0;
                }
                let z: f64 = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| cost[b] * row[j])
                    .sum();
                z - cost[j]
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    // Replaces zero-level artificial basics by structural columns, dropping
    // rows that turn out to be redundant.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            let replacement = (0..self.first_artificial)
                .filter(|j| !self.basis.contains(j))
                .max_by(|&a, &b| self.rows[i][a].abs().total_cmp(&self.rows[i][b].abs()))
                .filter(|&j| self.rows[i][j].abs() > PIVOT_EPS);
            match replacement {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}
