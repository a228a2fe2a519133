//! The classify / solve / witness / oracle / gen workflows.
//!
//! Each command turns an instance into a JSON result plus an exit status;
//! wrapping into the report envelope happens in the caller.

use conelcp_core::classify::{form_class, Trichotomy};
use conelcp_core::lcp::ORACLE_MAX_DIM;
use conelcp_core::linalg::Lu;
use conelcp_core::orbit::{cone_witnesses, identity_orbit_witness, ConeWitnesses};
use conelcp_core::random::{self, MatrixKind};
use conelcp_core::{
    enumerate_solutions, has_f_property, is_p_matrix, is_positive_definite, q_property_check,
    solve_on_cone, symmetrizant, trichotomy, verify_solution, ConeLcp, CongruenceWitness,
    LcpSolution, Matrix, PropertyVerdict, Rejected, SimplicialCone, SolveOutcome, TrichotomyClass,
};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::input::{GeneratedInstance, InputError, InstanceFile};

/// Orbit members sampled by `witness` for a nonpositive form.
pub const NONPOSITIVE_ORBIT_SAMPLES: usize = 10;
pub const MAX_GEN_DIM: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] conelcp_core::Error),
}

/// Exit status contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// A solution, a constructed witness or a positive classification.
    Success,
    /// A certified negative outcome.
    Negative,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Negative => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

pub struct CommandOutput {
    pub result: Value,
    pub status: Status,
    /// One-line human summary for `--verbose`.
    pub summary: String,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

#[derive(Serialize)]
struct ClassifyReport {
    dim: usize,
    class: TrichotomyClass,
    lambda_min: f64,
    lambda_max: f64,
    invertible: bool,
    positive_definite: PropertyVerdict,
    p_property: PropertyVerdict,
    f_property: PropertyVerdict,
    q_property: PropertyVerdict,
}

/// Trichotomy class plus every property verdict. Exit 1 when the F- or
/// Q-property is certified to fail.
pub fn classify(inst: &InstanceFile, s: &Settings) -> Result<CommandOutput, CliError> {
    let a = &inst.matrix;
    let Trichotomy {
        class,
        lambda_min,
        lambda_max,
    } = form_class(a, s.tol)?;
    let report = ClassifyReport {
        dim: a.dim(),
        class,
        lambda_min,
        lambda_max,
        invertible: Lu::factor(a).is_ok(),
        positive_definite: is_positive_definite(a, s.tol)?,
        p_property: is_p_matrix(a, s.tol)?,
        f_property: has_f_property(a, s.tol)?,
        q_property: q_property_check(a, s.samples, s.seed, s.tol)?,
    };
    let negative = report.f_property.is_false() || report.q_property.is_false();
    let summary = format!(
        "class {class:?}; P {}, F {}, Q {}",
        verdict_word(&report.p_property),
        verdict_word(&report.f_property),
        verdict_word(&report.q_property),
    );
    Ok(CommandOutput {
        result: to_value(&report),
        status: if negative {
            Status::Negative
        } else {
            Status::Success
        },
        summary,
    })
}

fn verdict_word(v: &PropertyVerdict) -> &'static str {
    match v {
        PropertyVerdict::CertifiedTrue(_) => "holds",
        PropertyVerdict::CertifiedFalse(_) => "fails",
        PropertyVerdict::ProbablyTrue { .. } => "probably holds",
    }
}

fn problem(inst: &InstanceFile) -> Result<ConeLcp, CliError> {
    let q = inst
        .q
        .clone()
        .ok_or_else(|| CliError::Usage("this command needs an offset vector `q`".into()))?;
    let cone = inst
        .cone
        .clone()
        .unwrap_or_else(|| SimplicialCone::orthant(inst.dim()));
    Ok(ConeLcp::new(cone, inst.matrix.clone(), q)?)
}

#[derive(Serialize)]
struct SolveReport<'a> {
    cone: &'a SimplicialCone,
    outcome: &'static str,
    solution: Option<&'a LcpSolution>,
}

pub fn solve(inst: &InstanceFile, s: &Settings) -> Result<CommandOutput, CliError> {
    let p = problem(inst)?;
    let outcome = solve_on_cone(&p, s.tol)?;
    let name = match &outcome {
        SolveOutcome::Solution(_) => "Solution",
        SolveOutcome::RayTermination => "RayTermination",
        SolveOutcome::NoSolutionCertified => "NoSolutionCertified",
    };
    let report = SolveReport {
        cone: &p.cone,
        outcome: name,
        solution: outcome.solution(),
    };
    let summary = match outcome.solution() {
        Some(sol) => format!("solution x = {:?}", sol.x.as_slice()),
        None => name.to_string(),
    };
    Ok(CommandOutput {
        result: to_value(&report),
        status: match outcome {
            SolveOutcome::Solution(_) => Status::Success,
            _ => Status::Negative,
        },
        summary,
    })
}

#[derive(Serialize)]
struct OracleReport<'a> {
    cone: &'a SimplicialCone,
    index_sets: u64,
    count: usize,
    solutions: Vec<LcpSolution>,
}

/// Every solution, found by enumerating complementary index sets of the
/// reduced problem and mapped back to the cone.
pub fn oracle(inst: &InstanceFile, s: &Settings) -> Result<CommandOutput, CliError> {
    let p = problem(inst)?;
    let m = p.dim();
    if m > ORACLE_MAX_DIM {
        return Err(conelcp_core::Error::DimensionTooLarge {
            dim: m,
            limit: ORACLE_MAX_DIM,
        }
        .into());
    }
    let solutions: Vec<LcpSolution> = enumerate_solutions(&p.reduce(), s.tol)?
        .into_iter()
        .map(|sol| match verify_solution(&p, &p.lift(&sol.x), s.tol) {
            Ok(report) | Err(Rejected(report)) => report,
        })
        .collect();
    let count = solutions.len();
    let report = OracleReport {
        cone: &p.cone,
        index_sets: 1u64 << m,
        count,
        solutions,
    };
    Ok(CommandOutput {
        result: to_value(&report),
        status: if count > 0 {
            Status::Success
        } else {
            Status::Negative
        },
        summary: format!("{count} solution(s) over {} index sets", 1u64 << m),
    })
}

#[derive(Serialize)]
#[serde(tag = "branch")]
enum WitnessReport {
    PositiveDefinite {
        lambda_min: f64,
        lambda_max: f64,
        statement: &'static str,
        /// `L` with `Lᵀ·S(A)·L = I`.
        identity_orbit: CongruenceWitness,
        /// `LᵀAL`; identity plus a skew part.
        orbit_member: Matrix,
    },
    Indefinite {
        lambda_min: f64,
        lambda_max: f64,
        statement: &'static str,
        #[serde(flatten)]
        witnesses: Box<ConeWitnesses>,
        non_f_residual: f64,
        positive_q_residual: f64,
        non_f_verified: bool,
        positive_q_verified: bool,
    },
    NonpositiveForm {
        lambda_min: f64,
        lambda_max: f64,
        statement: &'static str,
        samples: Vec<OrbitSample>,
        all_non_f: bool,
    },
}

#[derive(Serialize)]
struct OrbitSample {
    factor: Matrix,
    member: Matrix,
    f_property: PropertyVerdict,
}

const PD_STATEMENT: &str =
    "every simplicial cone K = L·R^m_+ gives a P-matrix LᵀAL, so LCP(K, A, q) has exactly one solution for every q";
const INDEFINITE_STATEMENT: &str =
    "the orbit holds a member without the F-property and an entrywise positive member with the Q-property";
const NONPOSITIVE_STATEMENT: &str =
    "no member of the orbit has the F-property, so no simplicial cone gives A the F- or Q-property";

/// Branches on the trichotomy class of an invertible matrix.
pub fn witness(inst: &InstanceFile, s: &Settings) -> Result<CommandOutput, CliError> {
    let a = &inst.matrix;
    let t = trichotomy(a, s.tol)?;
    let (lambda_min, lambda_max) = (t.lambda_min, t.lambda_max);
    let (report, summary) = match t.class {
        TrichotomyClass::PositiveDefinite => {
            let w = identity_orbit_witness(&symmetrizant(a), s.tol)?;
            let orbit_member = w.congruence.apply(a);
            (
                WitnessReport::PositiveDefinite {
                    lambda_min,
                    lambda_max,
                    statement: PD_STATEMENT,
                    identity_orbit: w,
                    orbit_member,
                },
                "positive definite: congruent to the identity".to_string(),
            )
        }
        TrichotomyClass::Indefinite => {
            let witnesses = cone_witnesses(a, s.tol)?;
            let report = WitnessReport::Indefinite {
                lambda_min,
                lambda_max,
                statement: INDEFINITE_STATEMENT,
                non_f_residual: witnesses.non_f.reconstruction_residual(a),
                positive_q_residual: witnesses.positive_q.reconstruction_residual(a),
                non_f_verified: witnesses.non_f.verify(a, s.tol),
                positive_q_verified: witnesses.positive_q.verify(a, s.tol),
                witnesses: Box::new(witnesses),
            };
            (
                report,
                "indefinite: non-F and positive Q witnesses".to_string(),
            )
        }
        TrichotomyClass::NonpositiveForm => {
            let mut rng = random::rng(s.seed);
            let mut samples = Vec::with_capacity(NONPOSITIVE_ORBIT_SAMPLES);
            for _ in 0..NONPOSITIVE_ORBIT_SAMPLES {
                let factor = random::invertible(&mut rng, a.dim());
                let member = a.congruence(&factor);
                let f_property = has_f_property(&member, s.tol)?;
                samples.push(OrbitSample {
                    factor,
                    member,
                    f_property,
                });
            }
            let all_non_f = samples.iter().all(|x| x.f_property.is_false());
            (
                WitnessReport::NonpositiveForm {
                    lambda_min,
                    lambda_max,
                    statement: NONPOSITIVE_STATEMENT,
                    samples,
                    all_non_f,
                },
                format!("nonpositive form: sampled members all non-F = {all_non_f}"),
            )
        }
    };
    Ok(CommandOutput {
        result: to_value(&report),
        status: Status::Success,
        summary,
    })
}

/// Generated instance as pretty JSON.
pub fn gen(kind: MatrixKind, dim: usize, seed: u64) -> Result<String, CliError> {
    if !(1..=MAX_GEN_DIM).contains(&dim) {
        return Err(CliError::Usage(format!(
            "--dim must be between 1 and {MAX_GEN_DIM}, got {dim}"
        )));
    }
    if kind == MatrixKind::Indefinite && dim < 2 {
        return Err(CliError::Usage(
            "indefinite matrices need --dim of at least 2".into(),
        ));
    }
    let matrix = kind.generate(dim, seed);
    let doc = GeneratedInstance {
        matrix: &matrix,
        seed,
    };
    Ok(serde_json::to_string_pretty(&doc).expect("instances serialize to JSON"))
}
