//! Linear complementarity on simplicial cones and witnesses drawn from the
//! congruence orbit of a matrix.
//!
//! A problem `LCP(K, M, q)` on the cone `K = L·R^m_+` is solved by reducing
//! it to the classical problem `LCP(LᵀML, Lᵀq)`. The same reduction ties the
//! complementarity properties of `M` on all simplicial cones to the
//! properties of the members `LᵀML` of its congruence orbit, which the
//! [`classify`] and [`orbit`] modules decide and construct.

pub mod classify;
pub mod cones;
pub mod error;
pub mod lcp;
pub mod linalg;
pub mod lp;
pub mod orbit;
pub mod random;

pub use classify::{
    has_f_property, is_p_matrix, is_positive_definite, q_property_check, symmetrizant, trichotomy,
    Certificate, PropertyVerdict, Trichotomy, TrichotomyClass,
};
pub use cones::SimplicialCone;
pub use error::{Error, Result};
pub use lcp::{
    enumerate_solutions, lemke_solve, solve_on_cone, verify_classical, verify_solution,
    ClassicalLcp, ConeLcp, LcpSolution, Rejected, SolveOutcome,
};
pub use linalg::{Matrix, SymEigen, Vector};
pub use orbit::{Congruence, CongruenceWitness, WitnessCertificate, WitnessClaim};
