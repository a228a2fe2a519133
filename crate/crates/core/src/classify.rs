//! Matrix properties from complementarity theory: positive definiteness, the
//! P-property (all principal minors positive), the F-property (general
//! feasibility), a semi-decision for the Q-property, and the three-way split
//! of matrices by the sign behaviour of their quadratic form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lcp::{enumerate_solutions, lemke_solve, ClassicalLcp, SolveOutcome};
use crate::linalg::{principal_minor, sym_eigen, Lu, Matrix, Vector};
use crate::lp::{lp_feasibility, Constraint, LpOutcome};

pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest dimension for which all `2^m − 1` principal minors are checked.
pub const P_MAX_DIM: usize = 20;
/// Largest dimension accepted by [`q_property_check`].
pub const Q_MAX_DIM: usize = 12;
/// Sign-pattern offsets are tried up to this dimension.
const SIGN_PATTERN_MAX_DIM: usize = 6;

/// `(A + Aᵀ) / 2`, symmetric by construction.
pub fn symmetrizant(a: &Matrix) -> Matrix {
    Matrix::from_fn(a.dim(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrichotomyClass {
    /// `⟨Ax, x⟩ > 0` for all `x ≠ 0`: every orbit member is P.
    PositiveDefinite,
    /// `⟨Ax, x⟩ ≤ 0` everywhere: no orbit member has the F-property.
    NonpositiveForm,
    /// Both signs occur: the orbit holds non-F and Q members alike.
    Indefinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trichotomy {
    pub class: TrichotomyClass,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Trichotomy {
    /// Classifies from the extreme eigenvalues of the symmetrizant. Values
    /// within `tol` of zero fall to the weaker class.
    pub fn from_spectrum(lambda_min: f64, lambda_max: f64, tol: f64) -> Self {
        let class = if lambda_min > tol {
            TrichotomyClass::PositiveDefinite
        } else if lambda_max <= tol {
            TrichotomyClass::NonpositiveForm
        } else {
            TrichotomyClass::Indefinite
        };
        Trichotomy {
            class,
            lambda_min,
            lambda_max,
        }
    }
}

/// Spectral class of the quadratic form without the invertibility check of
/// [`trichotomy`].
pub fn form_class(a: &Matrix, tol: f64) -> Result<Trichotomy> {
    let eig = sym_eigen(&symmetrizant(a))?;
    Ok(Trichotomy::from_spectrum(
        eig.lambda_min(),
        eig.lambda_max(),
        tol,
    ))
}

pub fn trichotomy(a: &Matrix, tol: f64) -> Result<Trichotomy> {
    Lu::factor(a)?;
    form_class(a, tol)
}

/// Evidence attached to a [`PropertyVerdict`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Smallest eigenpair of the symmetrizant; `⟨Av, v⟩ = value` for the
    /// unit vector `v`.
    Eigenpair { value: f64, vector: Vector },
    /// Every principal minor was checked; `smallest` is the minimum.
    MinorsPositive { smallest: f64, checked: usize },
    /// First principal minor (0-based indices) that is not above tolerance.
    NonpositiveMinor { indices: Vec<usize>, value: f64 },
    /// `x ≥ 0` with `Ax ≥ 1`, so `t·x` is feasible for `q` once
    /// `t ≥ max(−q)`. `dual_optimum` is the value of the alternative program.
    FeasibleDirection {
        x: Option<Vector>,
        dual_optimum: f64,
    },
    /// `y ≥ 0`, `y ≠ 0`, `Aᵀy ≤ 0`. No `x ≥ 0` has `Ax + q ≥ 0` for `q = −y`.
    InfeasibleOffset { y: Vector, q: Vector },
    /// The Q-property follows from the P-property.
    QFromPMatrix { smallest_minor: f64 },
    /// The Q-property follows from entrywise positivity.
    QFromPositiveEntries { min_entry: f64 },
    /// An offset for which the classical LCP has no solution.
    UnsolvableOffset { q: Vector },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum PropertyVerdict {
    CertifiedTrue(Certificate),
    CertifiedFalse(Certificate),
    /// Only from the Q semi-decision: every sampled offset was solvable.
    ProbablyTrue {
        samples: usize,
    },
}

impl PropertyVerdict {
    pub fn is_true(&self) -> bool {
        matches!(self, PropertyVerdict::CertifiedTrue(_))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, PropertyVerdict::CertifiedFalse(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            PropertyVerdict::CertifiedTrue(c) | PropertyVerdict::CertifiedFalse(c) => Some(c),
            PropertyVerdict::ProbablyTrue { .. } => None,
        }
    }

    /// Re-checks the attached certificate against `a`.
    pub fn verify(&self, a: &Matrix, tol: f64) -> Result<bool> {
        let m = a.dim();
        let Some(cert) = self.certificate() else {
            return Ok(true);
        };
        let ok = match (self.is_true(), cert) {
            (true, Certificate::Eigenpair { value, vector }) => {
                *value > tol && a.mul_vec(vector).dot(vector) > 0.0
            }
            (false, Certificate::Eigenpair { vector, .. }) => {
                a.mul_vec(vector).dot(vector) <= tol * vector.dot(vector) + 1e-12
            }
            (true, Certificate::MinorsPositive { smallest, checked }) => {
                *smallest > tol && *checked == (1usize << m) - 1
            }
            (false, Certificate::NonpositiveMinor { indices, value }) => {
                let det = principal_minor(a, indices)?;
                *value <= tol && (det - value).abs() <= 1e-9 * (1.0 + value.abs())
            }
            (true, Certificate::FeasibleDirection { x, dual_optimum }) => {
                *dual_optimum <= tol
                    && x.as_ref()
                        .is_none_or(|x| x.min() >= -tol && a.mul_vec(x).min() >= 1.0 - 1e-7)
            }
            (false, Certificate::InfeasibleOffset { y, q }) => {
                y.min() >= -tol
                    && y.dot(y) > tol
                    && q.dist_inf(&-y) == 0.0
                    && a.tr_mul_vec(y).max() <= tol * (1.0 + a.max_abs())
            }
            (true, Certificate::QFromPMatrix { .. }) => is_p_matrix(a, tol)?.is_true(),
            (true, Certificate::QFromPositiveEntries { min_entry }) => {
                *min_entry > tol && a.min_entry() > tol
            }
            (false, Certificate::UnsolvableOffset { q }) => {
                let p = ClassicalLcp::new(a.clone(), q.clone())?;
                enumerate_solutions(&p, tol)?.is_empty()
            }
            _ => false,
        };
        Ok(ok)
    }
}

pub fn is_positive_definite(a: &Matrix, tol: f64) -> Result<PropertyVerdict> {
    let eig = sym_eigen(&symmetrizant(a))?;
    let k = a.dim() - 1;
    let cert = Certificate::Eigenpair {
        value: eig.eigenvalues[k],
        vector: eig.eigenvector(k),
    };
    Ok(if eig.eigenvalues[k] > tol {
        PropertyVerdict::CertifiedTrue(cert)
    } else {
        PropertyVerdict::CertifiedFalse(cert)
    })
}

/// Visits the nonempty subsets of `0..m` by increasing size, each size in
/// lexicographic order. Stops early when `f` returns false.
pub(crate) fn for_each_index_set(m: usize, mut f: impl FnMut(&[usize]) -> bool) {
    for k in 1..=m {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if !f(&idx) {
                return;
            }
            // Advance to the next k-combination.
            let mut i = k;
            while i > 0 && idx[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

/// All principal minors above `tol`.
pub fn is_p_matrix(a: &Matrix, tol: f64) -> Result<PropertyVerdict> {
    let m = a.dim();
    if m > P_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: m,
            limit: P_MAX_DIM,
        });
    }
    let mut smallest = f64::INFINITY;
    let mut checked = 0usize;
    let mut failure = None;
    for_each_index_set(m, |idx| {
        let det = crate::linalg::determinant(&a.principal_submatrix(idx));
        checked += 1;
        smallest = smallest.min(det);
        if det > tol {
            true
        } else {
            failure = Some(Certificate::NonpositiveMinor {
                indices: idx.to_vec(),
                value: det,
            });
            false
        }
    });
    Ok(match failure {
        Some(cert) => PropertyVerdict::CertifiedFalse(cert),
        None => PropertyVerdict::CertifiedTrue(Certificate::MinorsPositive { smallest, checked }),
    })
}

/// General feasibility, `(A·R^m_+ + q) ∩ R^m_+ ≠ ∅` for every `q`.
///
/// Decided through the alternative: the property fails exactly when some
/// `y ≥ 0`, `y ≠ 0` has `Aᵀy ≤ 0`. That is found by maximizing `Σy` over
/// `Aᵀy ≤ 0`, `0 ≤ y ≤ 1`.
pub fn has_f_property(a: &Matrix, tol: f64) -> Result<PropertyVerdict> {
    let m = a.dim();
    let mut rows: Vec<Constraint> = (0..m)
        .map(|j| Constraint::le(a.column(j).into_vec(), 0.0))
        .collect();
    rows.extend((0..m).map(|i| Constraint::le(Vector::unit(m, i).into_vec(), 1.0)));
    let ones = Vector::from_fn(m, |_| 1.0);
    let (optimum, y) = match lp_feasibility(&ones, &rows)? {
        LpOutcome::Optimal { value, point } => (value, point),
        other => {
            return Err(Error::IterationInvariantBroken(format!(
                "bounded F-test program reported {other:?}"
            )))
        }
    };
    if optimum > tol {
        // 0 − y rather than −y keeps zero entries at +0.
        let q = Vector::from_fn(m, |i| 0.0 - y[i]);
        return Ok(PropertyVerdict::CertifiedFalse(
            Certificate::InfeasibleOffset { y, q },
        ));
    }
    // Positive side: min Σx subject to Ax ≥ 1, x ≥ 0.
    let rows: Vec<Constraint> = (0..m)
        .map(|i| Constraint::ge(a.row(i).to_vec(), 1.0))
        .collect();
    let x = lp_feasibility(&Vector::from_fn(m, |_| -1.0), &rows)?
        .optimal()
        .map(|(_, x)| x.clone());
    Ok(PropertyVerdict::CertifiedTrue(
        Certificate::FeasibleDirection {
            x,
            dual_optimum: optimum,
        },
    ))
}

// Lemke first, the oracle when Lemke gives up.
fn solvable(a: &Matrix, q: &Vector, tol: f64) -> Result<bool> {
    let p = ClassicalLcp::new(a.clone(), q.clone())?;
    match lemke_solve(&p, None) {
        Ok(SolveOutcome::Solution(_)) => return Ok(true),
        Ok(_) | Err(Error::VerificationFailed { .. }) | Err(Error::IterationLimit { .. }) => {}
        Err(err) => return Err(err),
    }
    Ok(!enumerate_solutions(&p, tol)?.is_empty())
}

// Offsets likely to expose a missing Q-property: −eᵢ, eᵢ − eⱼ and, in low
// dimension, every sign pattern.
fn adversarial_offsets(m: usize) -> Vec<Vector> {
    let mut out: Vec<Vector> = (0..m).map(|i| -&Vector::unit(m, i)).collect();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                out.push(&Vector::unit(m, i) - &Vector::unit(m, j));
            }
        }
    }
    if m <= SIGN_PATTERN_MAX_DIM {
        for mask in 0u32..(1 << m) {
            out.push(Vector::from_fn(m, |i| {
                if mask & (1 << i) != 0 {
                    -1.0
                } else {
                    1.0
                }
            }));
        }
    }
    out
}

/// Semi-decision for the Q-property (`LCP(A, q)` solvable for every `q`).
///
/// Certified routes: P-matrices and entrywise positive matrices are Q; a
/// missing F-property or an unsolvable offset proves the property fails.
/// Otherwise `samples` seeded unit-normal offsets are tried.
pub fn q_property_check(
    a: &Matrix,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PropertyVerdict> {
    let m = a.dim();
    if m > Q_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: m,
            limit: Q_MAX_DIM,
        });
    }
    if let PropertyVerdict::CertifiedTrue(Certificate::MinorsPositive { smallest, .. }) =
        is_p_matrix(a, tol)?
    {
        return Ok(PropertyVerdict::CertifiedTrue(Certificate::QFromPMatrix {
            smallest_minor: smallest,
        }));
    }
    let min_entry = a.min_entry();
    if min_entry > tol {
        return Ok(PropertyVerdict::CertifiedTrue(
            Certificate::QFromPositiveEntries { min_entry },
        ));
    }
    if let PropertyVerdict::CertifiedFalse(Certificate::InfeasibleOffset { q, .. }) =
        has_f_property(a, tol)?
    {
        return Ok(PropertyVerdict::CertifiedFalse(
            Certificate::UnsolvableOffset { q },
        ));
    }
    for q in adversarial_offsets(m) {
        if !solvable(a, &q, tol)? {
            return Ok(PropertyVerdict::CertifiedFalse(
                Certificate::UnsolvableOffset { q },
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let q = Vector::from_fn(m, |_| StandardNormal.sample(&mut rng));
        if !solvable(a, &q, tol)? {
            return Ok(PropertyVerdict::CertifiedFalse(
                Certificate::UnsolvableOffset { q },
            ));
        }
    }
    Ok(PropertyVerdict::ProbablyTrue { samples })
}
