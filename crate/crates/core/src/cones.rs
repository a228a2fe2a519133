//! Simplicial cones `K = A·R^m_+` stored by their generator matrix.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{inverse, Matrix, Vector};

/// Default membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The cone spanned by the columns of an invertible matrix.
///
/// The inverse is cached: membership of `x` is decided by the coordinates
/// `A⁻¹x`, and the dual cone is generated by `A⁻ᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialCone {
    generators: Matrix,
    inv_generators: Matrix,
}

impl Serialize for SimplicialCone {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ConeRepr {
            generators: Vec<Vec<f64>>,
        }
        ConeRepr {
            generators: self.generators.to_rows(),
        }
        .serialize(serializer)
    }
}

impl SimplicialCone {
    /// Fails with [`Error::SingularMatrix`] if the columns of `a` are not
    /// linearly independent.
    pub fn from_generators(a: Matrix) -> Result<Self> {
        let inv_generators = inverse(&a)?;
        Ok(SimplicialCone {
            generators: a,
            inv_generators,
        })
    }

    /// The nonnegative orthant `R^m_+`.
    pub fn orthant(m: usize) -> Self {
        SimplicialCone {
            generators: Matrix::identity(m),
            inv_generators: Matrix::identity(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    pub fn generators(&self) -> &Matrix {
        &self.generators
    }

    pub fn inv_generators(&self) -> &Matrix {
        &self.inv_generators
    }

    /// Coordinates of `x` with respect to the generators, `A⁻¹x`.
    pub fn coordinates(&self, x: &Vector) -> Vector {
        self.inv_generators.mul_vec(x)
    }

    /// `K* = A⁻ᵀ·R^m_+`. The cached inverse makes this exact: the dual of the
    /// dual has the original generators.
    pub fn dual(&self) -> SimplicialCone {
        SimplicialCone {
            generators: self.inv_generators.transpose(),
            inv_generators: self.generators.transpose(),
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.primal_violation(x) <= tol
    }

    /// `y ∈ K*` iff `Aᵀy ≥ 0`.
    pub fn dual_contains(&self, y: &Vector, tol: f64) -> bool {
        self.dual_violation(y) <= tol
    }

    /// `max(0, −min(A⁻¹x))`.
    pub fn primal_violation(&self, x: &Vector) -> f64 {
        (-self.coordinates(x).min()).max(0.0)
    }

    /// `max(0, −min(Aᵀy))`.
    pub fn dual_violation(&self, y: &Vector) -> f64 {
        (-self.generators.tr_mul_vec(y).min()).max(0.0)
    }

    /// `L·K`, generated by `L·A`.
    pub fn image(&self, l: &Matrix) -> Result<SimplicialCone> {
        if l.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: l.dim(),
            });
        }
        SimplicialCone::from_generators(l * &self.generators)
    }
}

/// Free-function form of [`SimplicialCone::from_generators`].
pub fn cone_from_generators(a: Matrix) -> Result<SimplicialCone> {
    SimplicialCone::from_generators(a)
}

pub fn image_cone(l: &Matrix, k: &SimplicialCone) -> Result<SimplicialCone> {
    k.image(l)
}
