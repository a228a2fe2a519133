//! Dense linear algebra for the small square systems used throughout the crate.
//!
//! Everything here is `f64`, row-major and sized for desk-scale problems
//! (a few dozen rows at most). Vectors are column vectors.

use std::fmt;
use std::ops::{Add, Deref, DerefMut, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Symmetry tolerance accepted by [`sym_eigen`] and [`sqrt_spd`].
pub const SYMMETRY_TOL: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_RTOL: f64 = 1e-12;
const SPD_EIGEN_FLOOR: f64 = 1e-10;

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct Vector(Vec<f64>);

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    values: Vec<f64>,
}

impl TryFrom<VectorRepr> for Vector {
    type Error = Error;

    fn try_from(repr: VectorRepr) -> Result<Self> {
        Vector::try_new(repr.values)
    }
}

impl From<Vector> for VectorRepr {
    fn from(v: Vector) -> Self {
        VectorRepr { values: v.0 }
    }
}

impl Vector {
    pub fn new(values: Vec<f64>) -> Self {
        Vector(values)
    }

    /// Like [`Vector::new`] but rejects NaN and infinities.
    pub fn try_new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Vector(values))
    }

    pub fn zeros(m: usize) -> Self {
        Vector(vec![0.0; m])
    }

    pub fn from_fn(m: usize, f: impl FnMut(usize) -> f64) -> Self {
        Vector((0..m).map(f).collect())
    }

    /// The `i`-th standard basis vector.
    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = Vector::zeros(m);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Smallest entry; `+inf` for the empty vector.
    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * s).collect())
    }

    pub fn dist_inf(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Vector {
    fn from(values: Vec<f64>) -> Self {
        Vector(values)
    }
}

impl Add<&Vector> for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Vector> for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// Square real matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    m: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    m: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.rows.len() != repr.m {
            return Err(Error::DimensionMismatch {
                expected: repr.m,
                found: repr.rows.len(),
            });
        }
        Matrix::from_rows(repr.rows)
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(a: Matrix) -> Self {
        MatrixRepr {
            m: a.m,
            rows: a.to_rows(),
        }
    }
}

impl Matrix {
    pub fn zeros(m: usize) -> Self {
        Matrix {
            m,
            data: vec![0.0; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_fn(m, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        Matrix { m, data }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Builds a matrix from its rows, which must form a finite square array.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidShape("matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Matrix { m, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Result<Self> {
        let m = cols.len();
        if cols.iter().any(|c| c.dim() != m) {
            return Err(Error::InvalidShape("columns must have length m".into()));
        }
        Ok(Self::from_fn(m, |i, j| cols[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_fn(self.m, |i| self[(i, j)])
    }

    pub fn diagonal(&self) -> Vector {
        Vector::from_fn(self.m, |i| self[(i, i)])
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.m, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            m: self.m,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &Vector) -> Vector {
        assert_eq!(self.m, x.dim(), "matrix-vector dimensions differ");
        Vector::from_fn(self.m, |i| {
            self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum()
        })
    }

    /// `Aᵀ y` without forming the transpose.
    pub fn tr_mul_vec(&self, y: &Vector) -> Vector {
        assert_eq!(self.m, y.dim(), "matrix-vector dimensions differ");
        let mut out = Vector::zeros(self.m);
        for i in 0..self.m {
            let yi = y[i];
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }

    /// `Lᵀ A L`.
    pub fn congruence(&self, l: &Matrix) -> Matrix {
        &(&l.transpose() * self) * l
    }

    /// Largest absolute entry, `‖A‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.m, other.m, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// `‖A − Aᵀ‖_max`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Principal submatrix on rows and columns `idx` (0-based, unchecked).
    pub fn principal_submatrix(&self, idx: &[usize]) -> Matrix {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    /// Applies `P_ijᵀ A P_ij` for the transposition of `i` and `j`.
    pub fn swap_symmetric(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let m = self.m;
        for c in 0..m {
            self.data.swap(i * m + c, j * m + c);
        }
        for r in 0..m {
            self.data.swap(r * m + i, r * m + j);
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.m).map(|i| self.row(i)))
            .finish()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.m + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.m + j]
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.m, rhs.m, "matrix dimensions differ");
        let m = self.m;
        let mut out = Matrix::zeros(m);
        for i in 0..m {
            for k in 0..m {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..m {
                    out.data[i * m + j] += a * rhs.data[k * m + j];
                }
            }
        }
        out
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.m, rhs.m, "matrix dimensions differ");
        Matrix {
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.m, rhs.m, "matrix dimensions differ");
        Matrix {
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    m: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Factors `a`, failing with [`Error::SingularMatrix`] when a pivot falls
    /// below `1e-12 · ‖A‖_max`.
    pub fn factor(a: &Matrix) -> Result<Lu> {
        let threshold = SINGULAR_RTOL * a.max_abs();
        let (lu, perm, sign, min_pivot) = eliminate(a);
        if min_pivot == 0.0 || min_pivot < threshold {
            return Err(Error::SingularMatrix {
                pivot: min_pivot,
                threshold,
            });
        }
        Ok(Lu {
            m: a.dim(),
            lu,
            perm,
            sign,
        })
    }

    pub fn solve(&self, b: &Vector) -> Vector {
        let m = self.m;
        assert_eq!(m, b.dim(), "right-hand side has wrong dimension");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..m {
            let row = &self.lu[i * m..i * m + i];
            x[i] = row.iter().zip(&x[..i]).fold(x[i], |s, (l, v)| s - l * v);
        }
        for i in (0..m).rev() {
            let row = &self.lu[i * m + i + 1..(i + 1) * m];
            let s = row
                .iter()
                .zip(&x[i + 1..])
                .fold(x[i], |s, (u, v)| s - u * v);
            x[i] = s / self.lu[i * m + i];
        }
        Vector(x)
    }

    pub fn det(&self) -> f64 {
        (0..self.m).fold(self.sign, |acc, i| acc * self.lu[i * self.m + i])
    }
}

// Gaussian elimination with partial pivoting. Returns the packed factors, the
// row permutation, the permutation sign and the smallest pivot magnitude.
fn eliminate(a: &Matrix) -> (Vec<f64>, Vec<usize>, f64, f64) {
    let m = a.dim();
    let mut lu = a.data.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut sign = 1.0;
    let mut min_pivot = f64::INFINITY;
    for k in 0..m {
        let p = (k..m)
            .max_by(|&i, &j| lu[i * m + k].abs().total_cmp(&lu[j * m + k].abs()))
            .unwrap_or(k);
        let pivot = lu[p * m + k];
        min_pivot = min_pivot.min(pivot.abs());
        if p != k {
            for c in 0..m {
                lu.swap(p * m + c, k * m + c);
            }
            perm.swap(p, k);
            sign = -sign;
        }
        if pivot == 0.0 {
            continue;
        }
        for i in (k + 1)..m {
            let f = lu[i * m + k] / pivot;
            lu[i * m + k] = f;
            if f != 0.0 {
                for c in (k + 1)..m {
                    lu[i * m + c] -= f * lu[k * m + c];
                }
            }
        }
    }
    if m == 0 {
        min_pivot = 0.0;
    }
    (lu, perm, sign, min_pivot)
}

/// Determinant by elimination; never fails, returns exactly `0` when an
/// exact zero pivot is met.
pub fn determinant(a: &Matrix) -> f64 {
    let m = a.dim();
    let (lu, _, sign, min_pivot) = eliminate(a);
    if min_pivot == 0.0 {
        return 0.0;
    }
    (0..m).fold(sign, |acc, i| acc * lu[i * m + i])
}

pub fn lu_solve(a: &Matrix, b: &Vector) -> Result<Vector> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(Lu::factor(a)?.solve(b))
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let lu = Lu::factor(a)?;
    let m = a.dim();
    let cols: Vec<Vector> = (0..m).map(|j| lu.solve(&Vector::unit(m, j))).collect();
    Matrix::from_columns(&cols)
}

/// Spectral decomposition `S = O · diag(λ) · Oᵀ` of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vector,
    /// Orthogonal matrix whose columns are the matching eigenvectors.
    pub basis: Matrix,
}

impl SymEigen {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.min()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.max()
    }

    pub fn eigenvector(&self, k: usize) -> Vector {
        self.basis.column(k)
    }

    /// `O · diag(λ) · Oᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let o = &self.basis;
        let m = o.dim();
        Matrix::from_fn(m, |i, j| {
            (0..m)
                .map(|k| o[(i, k)] * self.eigenvalues[k] * o[(j, k)])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Eigenvalues come out descending (ties keep their diagonal order) and each
/// eigenvector is signed so its largest-magnitude entry is positive.
pub fn sym_eigen(s: &Matrix) -> Result<SymEigen> {
    let asymmetry = s.asymmetry();
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let m = s.dim();
    let mut a = Matrix::from_fn(m, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let mut v = Matrix::identity(m);
    let target = JACOBI_RTOL * a.frobenius();

    let mut converged = false;
    for _ in 0..=JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::IterationLimit {
            what: "Jacobi eigensolver",
            limit: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let eigenvalues = Vector::from_fn(m, |k| a[(order[k], order[k])]);
    let mut basis = Matrix::from_fn(m, |i, k| v[(i, order[k])]);
    for k in 0..m {
        let col = basis.column(k);
        let peak = col.norm_inf();
        let lead = col
            .iter()
            .position(|c| c.abs() >= peak - 1e-12)
            .unwrap_or(0);
        if col[lead] < 0.0 {
            for i in 0..m {
                basis[(i, k)] = -basis[(i, k)];
            }
        }
    }
    Ok(SymEigen { eigenvalues, basis })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let m = a.dim();
    let mut sum = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

fn jacobi_rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let m = a.dim();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // A ← Jᵀ A J with J the rotation in the (p, q) plane.
    for k in 0..m {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..m {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..m {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Symmetric square root `R = O · diag(√λ) · Oᵀ` of a symmetric positive
/// definite matrix.
pub fn sqrt_spd(a: &Matrix) -> Result<Matrix> {
    let eig = sym_eigen(a)?;
    let lambda_min = eig.lambda_min();
    if lambda_min <= SPD_EIGEN_FLOOR {
        return Err(Error::NotPositiveDefinite { lambda_min });
    }
    let root = SymEigen {
        eigenvalues: Vector::from_fn(a.dim(), |k| eig.eigenvalues[k].sqrt()),
        basis: eig.basis,
    };
    let r = root.reconstruct();
    Ok(Matrix::from_fn(a.dim(), |i, j| {
        0.5 * (r[(i, j)] + r[(j, i)])
    }))
}

/// Determinant of the principal submatrix on `idx` (0-based indices).
pub fn principal_minor(a: &Matrix, idx: &[usize]) -> Result<f64> {
    let m = a.dim();
    let mut seen = vec![false; m];
    let bad = idx.is_empty()
        || idx.iter().any(|&i| {
            if i >= m || seen[i] {
                true
            } else {
                seen[i] = true;
                false
            }
        });
    if bad {
        return Err(Error::BadIndexSet {
            indices: idx.to_vec(),
            dim: m,
        });
    }
    Ok(determinant(&a.principal_submatrix(idx)))
}
