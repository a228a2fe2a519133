//! Linear complementarity problems on the orthant and on simplicial cones.
//!
//! `LCP(K, M, q)`: find `x ∈ K` with `w = Mx + q ∈ K*` and `⟨x, w⟩ = 0`.
//! With `K = L·R^m_+` the problem is equivalent to the classical problem
//! `LCP(LᵀML, Lᵀq)` through `x = L·z`; [`solve_on_cone`] works that way.

use serde::Serialize;

use crate::cones::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix, Vector};
use crate::lp::{lp_feasibility, Constraint, LpOutcome};

/// Tolerance at which [`lemke_solve`] certifies its own answers.
pub const LEMKE_VERIFY_TOL: f64 = 1e-8;
/// Enumeration guard for [`enumerate_solutions`].
pub const ORACLE_MAX_DIM: usize = 20;
/// [`solve_on_cone`] falls back to enumeration only up to this dimension.
pub const FALLBACK_MAX_DIM: usize = 12;
/// Oracle solutions closer than this (∞-norm) are reported once.
pub const DEDUP_RADIUS: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalLcp {
    pub matrix: Matrix,
    pub q: Vector,
}

impl ClassicalLcp {
    pub fn new(matrix: Matrix, q: Vector) -> Result<Self> {
        check_conformal(&matrix, &q)?;
        Ok(ClassicalLcp { matrix, q })
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn complement(&self, x: &Vector) -> Vector {
        &self.matrix.mul_vec(x) + &self.q
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeLcp {
    pub cone: SimplicialCone,
    pub matrix: Matrix,
    pub q: Vector,
}

impl ConeLcp {
    pub fn new(cone: SimplicialCone, matrix: Matrix, q: Vector) -> Result<Self> {
        check_conformal(&matrix, &q)?;
        if cone.dim() != q.dim() {
            return Err(Error::DimensionMismatch {
                expected: q.dim(),
                found: cone.dim(),
            });
        }
        Ok(ConeLcp { cone, matrix, q })
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn complement(&self, x: &Vector) -> Vector {
        &self.matrix.mul_vec(x) + &self.q
    }

    /// The equivalent classical instance `(LᵀML, Lᵀq)`.
    pub fn reduce(&self) -> ClassicalLcp {
        let l = self.cone.generators();
        ClassicalLcp {
            matrix: self.matrix.congruence(l),
            q: l.tr_mul_vec(&self.q),
        }
    }

    /// Maps a solution of the reduced problem back onto the cone, `x = L·z`.
    pub fn lift(&self, z: &Vector) -> Vector {
        self.cone.generators().mul_vec(z)
    }

    /// Inverse of [`ConeLcp::lift`], `z = L⁻¹x`.
    pub fn pull_back(&self, x: &Vector) -> Vector {
        self.cone.coordinates(x)
    }
}

fn check_conformal(matrix: &Matrix, q: &Vector) -> Result<()> {
    if matrix.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: matrix.dim(),
            found: q.dim(),
        });
    }
    if !q.is_finite() {
        return Err(Error::NonFinite(
            q.iter().position(|v| !v.is_finite()).unwrap_or(0),
        ));
    }
    Ok(())
}

/// A candidate solution with its residual report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LcpSolution {
    pub x: Vector,
    /// `Mx + q`.
    pub w: Vector,
    /// Cone violation of `x`.
    pub residual_primal: f64,
    /// Dual-cone violation of `w`.
    pub residual_dual: f64,
    /// `|⟨x, w⟩|`.
    pub complementarity: f64,
}

impl LcpSolution {
    fn assess(x: Vector, w: Vector, residual_primal: f64, residual_dual: f64) -> Self {
        let complementarity = x.dot(&w).abs();
        LcpSolution {
            x,
            w,
            residual_primal,
            residual_dual,
            complementarity,
        }
    }

    pub fn accepted(&self, tol: f64) -> bool {
        self.residual_primal <= tol
            && self.residual_dual <= tol
            && self.complementarity <= tol * (1.0 + self.x.norm() * self.w.norm())
    }

    fn defect(&self) -> f64 {
        let scale = 1.0 + self.x.norm() * self.w.norm();
        self.residual_primal
            .max(self.residual_dual)
            .max(self.complementarity / scale)
    }
}

/// Residual report of a point that failed verification.
#[derive(Clone, Debug, PartialEq)]
pub struct Rejected(pub LcpSolution);

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Solution(LcpSolution),
    /// Lemke's method left along an unbounded ray.
    RayTermination,
    /// The enumeration oracle proved that no solution exists.
    NoSolutionCertified,
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&LcpSolution> {
        match self {
            SolveOutcome::Solution(s) => Some(s),
            _ => None,
        }
    }
}

pub fn verify_solution(
    p: &ConeLcp,
    x: &Vector,
    tol: f64,
) -> std::result::Result<LcpSolution, Rejected> {
    let w = p.complement(x);
    let primal = p.cone.primal_violation(x);
    let dual = p.cone.dual_violation(&w);
    let report = LcpSolution::assess(x.clone(), w, primal, dual);
    if report.accepted(tol) {
        Ok(report)
    } else {
        Err(Rejected(report))
    }
}

/// [`verify_solution`] on the orthant.
pub fn verify_classical(
    p: &ClassicalLcp,
    x: &Vector,
    tol: f64,
) -> std::result::Result<LcpSolution, Rejected> {
    let report = orthant_report(p, x.clone());
    if report.accepted(tol) {
        Ok(report)
    } else {
        Err(Rejected(report))
    }
}

fn orthant_report(p: &ClassicalLcp, x: Vector) -> LcpSolution {
    let w = p.complement(&x);
    let primal = (-x.min()).max(0.0);
    let dual = (-w.min()).max(0.0);
    LcpSolution::assess(x, w, primal, dual)
}

/// `10·2^m`, capped at one million.
pub fn default_max_pivots(m: usize) -> usize {
    if m >= 17 {
        1_000_000
    } else {
        (10usize << m).min(1_000_000)
    }
}

/// Lemke's complementary pivoting with covering vector `(1, …, 1)` and a
/// lexicographic ratio test.
pub fn lemke_solve(p: &ClassicalLcp, max_pivots: Option<usize>) -> Result<SolveOutcome> {
    let m = p.dim();
    if p.q.min() >= 0.0 {
        let report = orthant_report(p, Vector::zeros(m));
        return Ok(SolveOutcome::Solution(report));
    }
    let limit = max_pivots.unwrap_or_else(|| default_max_pivots(m));
    let mut tableau = LemkeTableau::new(p);
    match tableau.run(limit)? {
        false => Ok(SolveOutcome::RayTermination),
        true => {
            let report = tableau.extract(p);
            if report.accepted(LEMKE_VERIFY_TOL) {
                Ok(SolveOutcome::Solution(report))
            } else {
                Err(Error::VerificationFailed {
                    primal: report.residual_primal,
                    dual: report.residual_dual,
                    complementarity: report.complementarity,
                })
            }
        }
    }
}

// Variables: w_i = i, z_i = m + i, z0 = 2m. Row layout: the 2m + 1 variable
// columns followed by the right-hand side. The w-columns always hold B⁻¹,
// which is what the lexicographic tie-break reads.
struct LemkeTableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl LemkeTableau {
    fn new(p: &ClassicalLcp) -> Self {
        let m = p.dim();
        let width = 2 * m + 2;
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            let row = &mut t[i * width..(i + 1) * width];
            row[i] = 1.0;
            for j in 0..m {
                row[m + j] = -p.matrix[(i, j)];
            }
            row[2 * m] = -1.0;
            row[2 * m + 1] = p.q[i];
        }
        LemkeTableau {
            m,
            width,
            t,
            basis: (0..m).collect(),
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn z0(&self) -> usize {
        2 * self.m
    }

    fn complement(&self, var: usize) -> usize {
        if var < self.m {
            var + self.m
        } else {
            var - self.m
        }
    }

    // Returns true when z0 left the basis, false on ray termination.
    fn run(&mut self, limit: usize) -> Result<bool> {
        let m = self.m;
        // First pivot: z0 enters at the row of the most negative q_i. Ties go
        // to the largest index, which is the lexicographic choice for the
        // perturbation q + (ε, ε², …).
        let mut row = 0;
        for i in 0..m {
            if self.rhs(i) <= self.rhs(row) {
                row = i;
            }
        }
        let mut leaving = self.basis[row];
        self.pivot(row, self.z0());

        for _ in 0..limit {
            let entering = self.complement(leaving);
            let Some(r) = self.ratio_test(entering) else {
                return Ok(false);
            };
            leaving = self.basis[r];
            self.pivot(r, entering);
            if leaving == self.z0() {
                return Ok(true);
            }
        }
        Err(Error::IterationLimit {
            what: "Lemke pivoting",
            limit,
        })
    }

    fn ratio_test(&self, col: usize) -> Option<usize> {
        let m = self.m;
        let col_max = (0..m).fold(0.0f64, |acc, i| acc.max(self.at(i, col).abs()));
        let eps = 1e-11 * col_max.max(1.0);
        let mut rows: Vec<usize> = (0..m).filter(|&i| self.at(i, col) > eps).collect();
        if rows.is_empty() {
            return None;
        }

        let ratio = |i: usize, j: usize| self.at(i, j) / self.at(i, col);
        let keep_min = |rows: &mut Vec<usize>, j: usize| {
            let best = rows
                .iter()
                .map(|&i| ratio(i, j))
                .fold(f64::INFINITY, f64::min);
            let slack = 1e-9 * (1.0 + best.abs());
            rows.retain(|&i| ratio(i, j) <= best + slack);
        };

        keep_min(&mut rows, self.width - 1);
        if let Some(&r) = rows.iter().find(|&&i| self.basis[i] == self.z0()) {
            return Some(r);
        }
        for j in 0..m {
            if rows.len() == 1 {
                break;
            }
            keep_min(&mut rows, j);
        }
        rows.first().copied()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    // Reads z off the tableau, then re-solves the complementary system
    // M_αα z_α = −q_α on the final basis and keeps whichever is more accurate.
    fn extract(&self, p: &ClassicalLcp) -> LcpSolution {
        let m = self.m;
        let mut z = Vector::zeros(m);
        let mut support = Vec::new();
        for (i, &b) in self.basis.iter().enumerate() {
            if (m..2 * m).contains(&b) {
                z[b - m] = self.rhs(i);
                support.push(b - m);
            }
        }
        support.sort_unstable();
        let mut best = orthant_report(p, z);
        if let Some(refined) = solve_complementary(p, &support) {
            let candidate = orthant_report(p, refined);
            if candidate.defect() <= best.defect() {
                best = candidate;
            }
        }
        best
    }
}

// Solves M_αα z_α = −q_α with z = 0 off α; None when M_αα is singular.
fn solve_complementary(p: &ClassicalLcp, support: &[usize]) -> Option<Vector> {
    let m = p.dim();
    let mut z = Vector::zeros(m);
    if support.is_empty() {
        return Some(z);
    }
    let sub = p.matrix.principal_submatrix(support);
    let lu = Lu::factor(&sub).ok()?;
    let rhs = Vector::from_fn(support.len(), |k| -p.q[support[k]]);
    let sol = lu.solve(&rhs);
    for (k, &i) in support.iter().enumerate() {
        z[i] = sol[k];
    }
    Some(z)
}

// Feasibility of the complementary piece on α when M_αα is singular:
// z_α ≥ 0, M_αα z_α = −q_α, M_ᾱα z_α ≥ −q_ᾱ.
fn solve_degenerate_piece(p: &ClassicalLcp, support: &[usize]) -> Result<Option<Vector>> {
    let m = p.dim();
    let k = support.len();
    let constraints: Vec<Constraint> = (0..m)
        .map(|i| {
            let coeffs = support.iter().map(|&j| p.matrix[(i, j)]).collect();
            if support.contains(&i) {
                Constraint::eq(coeffs, -p.q[i])
            } else {
                Constraint::ge(coeffs, -p.q[i])
            }
        })
        .collect();
    match lp_feasibility(&Vector::zeros(k), &constraints)? {
        LpOutcome::Optimal { point, .. } => {
            let mut z = Vector::zeros(m);
            for (idx, &i) in support.iter().enumerate() {
                z[i] = point[idx];
            }
            Ok(Some(z))
        }
        LpOutcome::Infeasible | LpOutcome::Unbounded => Ok(None),
    }
}

/// Exhaustive oracle over the `2^m` complementary index sets.
///
/// Returns every distinct solution; an empty result certifies that the
/// problem has none. Pieces whose principal submatrix is singular are
/// decided by a feasibility program, so the certificate also covers
/// degenerate instances.
pub fn enumerate_solutions(p: &ClassicalLcp, tol: f64) -> Result<Vec<LcpSolution>> {
    let m = p.dim();
    if m > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: m,
            limit: ORACLE_MAX_DIM,
        });
    }
    let mut found: Vec<LcpSolution> = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let support: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let z = match solve_complementary(p, &support) {
            Some(z) => z,
            None => match solve_degenerate_piece(p, &support)? {
                Some(z) => z,
                None => continue,
            },
        };
        let report = orthant_report(p, z);
        if !report.accepted(tol) {
            continue;
        }
        if found.iter().all(|s| s.x.dist_inf(&report.x) > DEDUP_RADIUS) {
            found.push(report);
        }
    }
    Ok(found)
}

/// Solves `LCP(K, M, q)` through the reduced classical problem.
pub fn solve_on_cone(p: &ConeLcp, tol: f64) -> Result<SolveOutcome> {
    let reduced = p.reduce();
    let m = p.dim();
    let mut last_failure = None;

    match lemke_solve(&reduced, None) {
        Ok(SolveOutcome::Solution(sol)) => match verify_solution(p, &p.lift(&sol.x), tol) {
            Ok(report) => return Ok(SolveOutcome::Solution(report)),
            Err(Rejected(report)) => last_failure = Some(report),
        },
        Ok(_) => {}
        Err(err @ Error::VerificationFailed { .. }) => {
            if m > FALLBACK_MAX_DIM {
                return Err(err);
            }
        }
        Err(err) => return Err(err),
    }

    if m > FALLBACK_MAX_DIM {
        return match last_failure {
            Some(report) => Err(failure(&report)),
            None => Ok(SolveOutcome::RayTermination),
        };
    }
    let candidates = enumerate_solutions(&reduced, tol)?;
    if candidates.is_empty() {
        return Ok(SolveOutcome::NoSolutionCertified);
    }
    for sol in &candidates {
        match verify_solution(p, &p.lift(&sol.x), tol) {
            Ok(report) => return Ok(SolveOutcome::Solution(report)),
            Err(Rejected(report)) => last_failure = Some(report),
        }
    }
    Err(failure(
        &last_failure.expect("at least one candidate was checked"),
    ))
}

fn failure(report: &LcpSolution) -> Error {
    Error::VerificationFailed {
        primal: report.residual_primal,
        dual: report.residual_dual,
        complementarity: report.complementarity,
    }
}
