//! Congruence orbits `D(A) = { LᵀAL : L invertible }` and explicit members
//! with checkable properties.
//!
//! The orbit convention is `A ↦ LᵀAL` throughout. Composition follows it:
//! applying `L₁` and then `L₂` equals applying `L₁·L₂`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::classify::{has_f_property, symmetrizant, trichotomy, TrichotomyClass};
use crate::cones::SimplicialCone;
use crate::error::{Error, Result};
use crate::lcp::{solve_on_cone, ConeLcp, SolveOutcome};
use crate::linalg::{inverse, sqrt_spd, sym_eigen, Lu, Matrix, Vector, SYMMETRY_TOL};
use crate::lp::{lp_feasibility, Constraint, LpOutcome};

/// Random offsets tried by [`cone_witnesses`] on the Q-cone.
pub const CONE_Q_SAMPLES: usize = 100;
const CONE_Q_SEED: u64 = 0;
const DIAGONAL_TRANSPORT_TOL: f64 = 1e-8;
const IDENTITY_TOL: f64 = 1e-7;

/// An invertible congruence factor `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Congruence {
    factor: Matrix,
}

impl Congruence {
    pub fn new(factor: Matrix) -> Result<Self> {
        Lu::factor(&factor)?;
        Ok(Congruence { factor })
    }

    pub fn identity(m: usize) -> Self {
        Congruence {
            factor: Matrix::identity(m),
        }
    }

    /// Permutation factor exchanging coordinates `i` and `j`.
    pub fn transposition(m: usize, i: usize, j: usize) -> Self {
        let mut factor = Matrix::identity(m);
        factor[(i, i)] = 0.0;
        factor[(j, j)] = 0.0;
        factor[(i, j)] = 1.0;
        factor[(j, i)] = 1.0;
        if i == j {
            factor[(i, i)] = 1.0;
        }
        Congruence { factor }
    }

    pub fn factor(&self) -> &Matrix {
        &self.factor
    }

    pub fn into_factor(self) -> Matrix {
        self.factor
    }

    /// `LᵀAL`.
    pub fn apply(&self, a: &Matrix) -> Matrix {
        a.congruence(&self.factor)
    }

    /// The congruence equal to applying `self` first, then `next`.
    pub fn then(&self, next: &Congruence) -> Congruence {
        Congruence {
            factor: &self.factor * &next.factor,
        }
    }
}

pub fn apply(c: &Congruence, a: &Matrix) -> Matrix {
    c.apply(a)
}

pub fn compose(first: &Congruence, second: &Congruence) -> Congruence {
    first.then(second)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessClaim {
    NonF,
    PositiveQ,
    IdentityOrbit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "claim")]
pub enum WitnessCertificate {
    /// Row `row` of the member is entrywise nonpositive, so with `q_row = −1`
    /// no `x ≥ 0` makes `member·x + q ≥ 0`.
    NonF {
        q: Vector,
        row: usize,
    },
    PositiveQ {
        min_entry: f64,
    },
    IdentityOrbit {
        residual: f64,
    },
}

impl WitnessCertificate {
    pub fn claim(&self) -> WitnessClaim {
        match self {
            WitnessCertificate::NonF { .. } => WitnessClaim::NonF,
            WitnessCertificate::PositiveQ { .. } => WitnessClaim::PositiveQ,
            WitnessCertificate::IdentityOrbit { .. } => WitnessClaim::IdentityOrbit,
        }
    }
}

/// An orbit member `LᵀAL` together with evidence for a claimed property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CongruenceWitness {
    pub congruence: Congruence,
    pub member: Matrix,
    pub certificate: WitnessCertificate,
}

impl CongruenceWitness {
    pub fn claim(&self) -> WitnessClaim {
        self.certificate.claim()
    }

    /// `‖member − LᵀAL‖_max`.
    pub fn reconstruction_residual(&self, a: &Matrix) -> f64 {
        self.member.max_abs_diff(&self.congruence.apply(a))
    }

    /// Reconstruction bound `1e−8·(1 + ‖A‖_max·‖L‖²_max)` plus the claim's
    /// own check.
    pub fn verify(&self, a: &Matrix, tol: f64) -> bool {
        let l = self.congruence.factor().max_abs();
        let bound = 1e-8 * (1.0 + a.max_abs() * l * l);
        if self.reconstruction_residual(a) > bound {
            return false;
        }
        match &self.certificate {
            WitnessCertificate::NonF { q, row } => {
                let m = self.member.dim();
                *row < m
                    && self.member.row(*row).iter().all(|&c| c <= tol)
                    && q[*row] == -1.0
                    && (0..m).all(|j| j == *row || q[j] == 0.0)
            }
            WitnessCertificate::PositiveQ { min_entry } => {
                *min_entry > tol && self.member.min_entry() > tol
            }
            WitnessCertificate::IdentityOrbit { residual } => {
                *residual <= IDENTITY_TOL
                    && self
                        .member
                        .max_abs_diff(&Matrix::identity(self.member.dim()))
                        <= IDENTITY_TOL
            }
        }
    }
}

/// Non-F member from a nonpositive diagonal entry.
///
/// The entry is moved to position 0 by a transposition, then every column
/// whose entry in row 0 is positive gets its sign flipped. Row 0 of the
/// member is then nonpositive off the diagonal and `q = (−1, 0, …, 0)` has
/// no feasible point.
pub fn sign_flip_nonf_witness(a: &Matrix, tol: f64) -> Result<CongruenceWitness> {
    let m = a.dim();
    let k = (0..m)
        .min_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]))
        .filter(|&k| a[(k, k)] <= tol)
        .ok_or(Error::NoNonpositiveDiagonal)?;

    let perm = Congruence::transposition(m, 0, k);
    let mut member = a.clone();
    member.swap_symmetric(0, k);

    let signs: Vec<f64> = (0..m)
        .map(|j| {
            if j > 0 && member[(0, j)] > 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    for i in 0..m {
        for j in 0..m {
            if signs[i] * signs[j] < 0.0 {
                member[(i, j)] = -member[(i, j)];
            }
        }
    }
    let flip = Congruence {
        factor: Matrix::from_diag(&signs),
    };
    let mut q = Vector::zeros(m);
    q[0] = -1.0;
    Ok(CongruenceWitness {
        congruence: perm.then(&flip),
        member,
        certificate: WitnessCertificate::NonF { q, row: 0 },
    })
}

/// The orthogonal eigenbasis `O` of `S(A)` and the member `B = OᵀAO`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exposure {
    pub congruence: Congruence,
    pub member: Matrix,
    /// Spectrum of the symmetrizant, descending; equals the diagonal of
    /// `member`.
    pub eigenvalues: Vector,
}

fn eigenbasis_exposure(a: &Matrix) -> Result<Exposure> {
    let eig = sym_eigen(&symmetrizant(a))?;
    let member = a.congruence(&eig.basis);
    let drift = member.diagonal().dist_inf(&eig.eigenvalues);
    if drift > DIAGONAL_TRANSPORT_TOL * (1.0 + a.max_abs()) {
        return Err(Error::IterationInvariantBroken(format!(
            "diagonal of OᵀAO drifts {drift:e} from the spectrum of S(A)"
        )));
    }
    Ok(Exposure {
        congruence: Congruence { factor: eig.basis },
        member,
        eigenvalues: eig.eigenvalues,
    })
}

/// Orbit member whose diagonal is the spectrum of `S(A)`; its leading entry
/// is `λ_max > tol`.
pub fn expose_positive_diagonal(a: &Matrix, tol: f64) -> Result<Exposure> {
    let exposure = eigenbasis_exposure(a)?;
    let lambda_max = exposure.eigenvalues.max();
    if lambda_max <= tol {
        return Err(Error::NoPositiveForm { lambda_max });
    }
    Ok(exposure)
}

/// Step counts of a [`positivize`] run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PositivizeSteps {
    pub permutations: usize,
    pub shears: usize,
}

/// Entrywise positive orbit member grown from a positive diagonal entry.
///
/// The positive entry is moved to the last position. Then for
/// `j = m−2, …, 0` the shear `I + t·E_{j,j+1}` (applied through the factor
/// `L = (I + t·E_{j,j+1})ᵀ`) adds `t` times row and column `j+1` to row and
/// column `j`, leaving the positive trailing block intact. `t` is
/// `2·t_min + 1`, where `t_min` is the least value making every new entry
/// nonnegative.
pub fn positivize(a: &Matrix, tol: f64) -> Result<CongruenceWitness> {
    positivize_counted(a, tol).map(|(w, _)| w)
}

pub fn positivize_counted(a: &Matrix, tol: f64) -> Result<(CongruenceWitness, PositivizeSteps)> {
    let m = a.dim();
    let mut steps = PositivizeSteps::default();
    if a.min_entry() > tol {
        let witness = CongruenceWitness {
            congruence: Congruence::identity(m),
            member: a.clone(),
            certificate: WitnessCertificate::PositiveQ {
                min_entry: a.min_entry(),
            },
        };
        return Ok((witness, steps));
    }
    let k = (0..m)
        .max_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(j.cmp(&i)))
        .filter(|&k| a[(k, k)] > tol)
        .ok_or(Error::NoPositiveDiagonal)?;

    let mut member = a.clone();
    let mut congruence = Congruence::identity(m);
    if k != m - 1 {
        member.swap_symmetric(k, m - 1);
        congruence = Congruence::transposition(m, k, m - 1);
        steps.permutations += 1;
    }

    for j in (0..m.saturating_sub(1)).rev() {
        let p = j + 1;
        let t = 2.0 * shear_lower_bound(&member, j, p) + 1.0;
        // B = S A Sᵀ with S = I + t E_{j,p}: row j += t·row p, then
        // column j += t·column p.
        for c in 0..m {
            let v = member[(p, c)];
            member[(j, c)] += t * v;
        }
        for r in 0..m {
            let v = member[(r, p)];
            member[(r, j)] += t * v;
        }
        let mut factor = Matrix::identity(m);
        factor[(p, j)] = t;
        congruence = congruence.then(&Congruence { factor });
        steps.shears += 1;

        let block_ok = (j..m).all(|r| (j..m).all(|c| member[(r, c)] > tol));
        if !block_ok {
            return Err(Error::IterationInvariantBroken(format!(
                "shear at index {j} left a nonpositive entry in the trailing block"
            )));
        }
    }

    let min_entry = member.min_entry();
    if min_entry <= tol {
        return Err(Error::IterationInvariantBroken(
            "positivized member is not entrywise positive".into(),
        ));
    }
    let witness = CongruenceWitness {
        congruence,
        member,
        certificate: WitnessCertificate::PositiveQ { min_entry },
    };
    Ok((witness, steps))
}

// Least t ≥ 0 making the entries of row and column j that the shear with
// pivot p produces nonnegative:
//   b_jj = a_jj + t(a_jp + a_pj) + t²a_pp,
//   b_ji = a_ji + t·a_pi,  b_ij = a_ij + t·a_ip   for i in the positive block.
// Past this bound every such entry grows at a rate of at least the smallest
// block entry (> tol), so t = 2·t_min + 1 clears tol with room to spare.
fn shear_lower_bound(a: &Matrix, j: usize, p: usize) -> f64 {
    let m = a.dim();
    let mut t_min: f64 = 0.0;
    for i in p..m {
        t_min = t_min.max(-a[(j, i)] / a[(p, i)]);
        t_min = t_min.max(-a[(i, j)] / a[(i, p)]);
    }
    let quad = a[(p, p)];
    let lin = a[(j, p)] + a[(p, j)];
    let constant = a[(j, j)];
    let disc = lin * lin - 4.0 * quad * constant;
    if disc >= 0.0 {
        t_min = t_min.max((-lin + disc.sqrt()) / (2.0 * quad));
    }
    t_min
}

/// Non-F member of the orbit of any matrix whose symmetrizant has
/// `λ_min ≤ tol`: the sign flip applied to the eigenbasis member `OᵀAO`,
/// whose diagonal entry `λ_min` is nonpositive.
pub fn non_f_witness(a: &Matrix, tol: f64) -> Result<CongruenceWitness> {
    let exposure = eigenbasis_exposure(a)?;
    let flip = sign_flip_nonf_witness(&exposure.member, tol)?;
    let witness = CongruenceWitness {
        congruence: exposure.congruence.then(&flip.congruence),
        member: flip.member,
        certificate: flip.certificate,
    };
    if !has_f_property(&witness.member, tol)?.is_false() {
        return Err(Error::IterationInvariantBroken(
            "sign-flip member passed the F-test".into(),
        ));
    }
    Ok(witness)
}

/// Non-F and positive (hence Q) members of the orbit of an indefinite matrix.
///
/// Both start from the eigenbasis member `OᵀAO`, whose diagonal carries
/// `λ_max > 0` and `λ_min ≤ 0`.
pub fn indefinite_witnesses(
    a: &Matrix,
    tol: f64,
) -> Result<(CongruenceWitness, CongruenceWitness)> {
    if trichotomy(a, tol)?.class != TrichotomyClass::Indefinite {
        return Err(Error::NotIndefinite);
    }
    let non_f = non_f_witness(a, tol)?;
    let exposure = eigenbasis_exposure(a)?;
    let pos = positivize(&exposure.member, tol)?;
    let positive_q = CongruenceWitness {
        congruence: exposure.congruence.then(&pos.congruence),
        member: pos.member,
        certificate: pos.certificate,
    };
    Ok((non_f, positive_q))
}

/// Cones on which an indefinite matrix lacks the F-property, and on which it
/// has the Q-property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeWitnesses {
    /// `K = L₁·R^m_+` with `(A·K + q) ∩ K* = ∅` for `q = non_f_q`.
    pub non_f_cone: SimplicialCone,
    pub non_f_q: Vector,
    /// `K = L₂·R^m_+`, on which the orbit member `L₂ᵀAL₂` is positive.
    pub q_cone: SimplicialCone,
    pub q_samples_solved: usize,
    pub non_f: CongruenceWitness,
    pub positive_q: CongruenceWitness,
}

/// Transports [`indefinite_witnesses`] to cones. The classical certificate
/// `q` becomes `L₁⁻ᵀq` on `K = L₁·R^m_+`; the Q-cone is checked by solving
/// [`CONE_Q_SAMPLES`] seeded random problems on it.
pub fn cone_witnesses(a: &Matrix, tol: f64) -> Result<ConeWitnesses> {
    let (non_f, positive_q) = indefinite_witnesses(a, tol)?;
    let m = a.dim();

    let non_f_cone = SimplicialCone::from_generators(non_f.congruence.factor().clone())?;
    let WitnessCertificate::NonF { q, .. } = &non_f.certificate else {
        unreachable!("sign-flip witnesses carry a NonF certificate");
    };
    let non_f_q = non_f_cone.inv_generators().tr_mul_vec(q);
    if cone_feasible(a, &non_f_cone, &non_f_q)? {
        return Err(Error::IterationInvariantBroken(
            "transported offset is feasible on the non-F cone".into(),
        ));
    }

    let q_cone = SimplicialCone::from_generators(positive_q.congruence.factor().clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(CONE_Q_SEED);
    let mut solved = 0;
    for _ in 0..CONE_Q_SAMPLES {
        let q = Vector::from_fn(m, |_| StandardNormal.sample(&mut rng));
        let problem = ConeLcp::new(q_cone.clone(), a.clone(), q)?;
        match solve_on_cone(&problem, 1e-7)? {
            SolveOutcome::Solution(_) => solved += 1,
            other => {
                return Err(Error::IterationInvariantBroken(format!(
                    "Q-cone problem not solved: {other:?}"
                )))
            }
        }
    }
    Ok(ConeWitnesses {
        non_f_cone,
        non_f_q,
        q_cone,
        q_samples_solved: solved,
        non_f,
        positive_q,
    })
}

/// Whether `(A·K + q) ∩ K* ≠ ∅`, i.e. some `z ≥ 0` has
/// `Lᵀ(A·L·z + q) ≥ 0` for the generators `L` of `K`.
pub fn cone_feasible(a: &Matrix, k: &SimplicialCone, q: &Vector) -> Result<bool> {
    let l = k.generators();
    let reduced = a.congruence(l);
    let offset = l.tr_mul_vec(q);
    let m = a.dim();
    let rows: Vec<Constraint> = (0..m)
        .map(|i| Constraint::ge(reduced.row(i).to_vec(), -offset[i]))
        .collect();
    Ok(matches!(
        lp_feasibility(&Vector::zeros(m), &rows)?,
        LpOutcome::Optimal { .. }
    ))
}

/// `L = R⁻¹` with `R` the symmetric square root of `A`, so `LᵀAL = I`.
pub fn congruence_to_identity(a: &Matrix, tol: f64) -> Result<Congruence> {
    let asymmetry = a.asymmetry();
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let lambda_min = sym_eigen(a)?.lambda_min();
    if lambda_min <= tol {
        return Err(Error::NotPositiveDefinite { lambda_min });
    }
    let root = sqrt_spd(a)?;
    let congruence = Congruence::new(inverse(&root)?)?;
    let residual = congruence.apply(a).max_abs_diff(&Matrix::identity(a.dim()));
    if residual > IDENTITY_TOL {
        return Err(Error::IterationInvariantBroken(format!(
            "LᵀAL deviates from I by {residual:e}"
        )));
    }
    Ok(congruence)
}

/// [`congruence_to_identity`] packaged as a witness.
pub fn identity_orbit_witness(a: &Matrix, tol: f64) -> Result<CongruenceWitness> {
    let congruence = congruence_to_identity(a, tol)?;
    let member = congruence.apply(a);
    let residual = member.max_abs_diff(&Matrix::identity(a.dim()));
    Ok(CongruenceWitness {
        congruence,
        member,
        certificate: WitnessCertificate::IdentityOrbit { residual },
    })
}
