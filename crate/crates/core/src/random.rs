//! Seeded generators for test matrices and problem instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::classify::{is_p_matrix, trichotomy, TrichotomyClass, DEFAULT_TOL};
use crate::linalg::{inverse, Lu, Matrix, Vector};

/// Condition bound (in the max-norm) for random congruence factors.
pub const MAX_FACTOR_CONDITION: f64 = 1e4;
const MAX_REJECTIONS: usize = 10_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vector<R: Rng>(rng: &mut R, m: usize) -> Vector {
    Vector::from_fn(m, |_| rng.sample(StandardNormal))
}

pub fn normal_matrix<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    Matrix::from_fn(m, |_, _| rng.sample(StandardNormal))
}

/// `GᵀG + 0.1·I`.
pub fn spd<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    let g = normal_matrix(rng, m);
    &(&g.transpose() * &g) + &Matrix::identity(m).scale(0.1)
}

/// `(G − Gᵀ)/2`; its symmetrizant is exactly zero.
pub fn skew<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    let g = normal_matrix(rng, m);
    Matrix::from_fn(m, |i, j| (g[(i, j)] - g[(j, i)]) / 2.0)
}

/// Positive definite (in the quadratic-form sense), generally non-symmetric:
/// an SPD matrix plus a skew part.
pub fn positive_definite<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    let s = spd(rng, m);
    let k = skew(rng, m);
    &s + &k
}

/// Unit-normal matrices resampled until invertible and indefinite.
pub fn indefinite<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    for _ in 0..MAX_REJECTIONS {
        let g = normal_matrix(rng, m);
        if matches!(trichotomy(&g, DEFAULT_TOL), Ok(t) if t.class == TrichotomyClass::Indefinite) {
            return g;
        }
    }
    // Unreachable in practice for m ≥ 2; keep a valid indefinite fallback.
    Matrix::from_fn(m, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (i, j) if i == j => -1.0,
        _ => 0.0,
    })
}

/// Matrices with `⟨Ax, x⟩ ≤ 0` everywhere, cycling through three families
/// by `variant`: pure skew (even `m` only, odd skew matrices are singular),
/// skew minus an SPD part, and negated SPD.
pub fn nonpositive_form<R: Rng>(rng: &mut R, m: usize, variant: usize) -> Matrix {
    match (variant % 3, m % 2) {
        (0, 0) => skew(rng, m),
        (0, _) | (1, _) => {
            let k = skew(rng, m);
            let s = spd(rng, m);
            &k - &s.scale(0.5)
        }
        _ => spd(rng, m).scale(-1.0),
    }
}

/// An SPD matrix plus a non-symmetric perturbation, kept only when every
/// principal minor stays positive.
pub fn p_matrix<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    let base = spd(rng, m);
    for _ in 0..MAX_REJECTIONS {
        let scale = 2.0 * rng.random::<f64>();
        let candidate = &base + &normal_matrix(rng, m).scale(scale);
        if matches!(is_p_matrix(&candidate, DEFAULT_TOL), Ok(v) if v.is_true()) {
            return candidate;
        }
    }
    base
}

/// `|G| + 0.1` entrywise.
pub fn positive<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    let g = normal_matrix(rng, m);
    Matrix::from_fn(m, |i, j| g[(i, j)].abs() + 0.1)
}

/// A unit-normal factor with max-norm condition number at most
/// [`MAX_FACTOR_CONDITION`].
pub fn invertible<R: Rng>(rng: &mut R, m: usize) -> Matrix {
    loop {
        let g = normal_matrix(rng, m);
        if Lu::factor(&g).is_err() {
            continue;
        }
        let Ok(inv) = inverse(&g) else { continue };
        let cond = g.max_abs() * inv.max_abs() * m as f64;
        if cond <= MAX_FACTOR_CONDITION {
            return g;
        }
    }
}

/// Offset drawn from a uniformly chosen complementary cone of `a`: a random
/// support `α`, then `q = w − A·z` with `z ≥ 0` on `α` and `w ≥ 0` off it.
/// Small cones get as much weight as large ones, which makes overlaps
/// (several solutions) and gaps (none) far easier to hit than with normal
/// offsets.
pub fn complementary_cone_offset<R: Rng>(rng: &mut R, a: &Matrix) -> Vector {
    let m = a.dim();
    let support: Vec<bool> = (0..m).map(|_| rng.random::<bool>()).collect();
    let g = normal_vector(rng, m);
    let z = Vector::from_fn(m, |i| if support[i] { g[i].abs() } else { 0.0 });
    let w = Vector::from_fn(m, |i| if support[i] { 0.0 } else { g[i].abs() });
    &w - &a.mul_vec(&z)
}

/// Kinds accepted by the instance generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Pd,
    Indefinite,
    Skew,
    PMatrix,
    Positive,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 5] = [
        MatrixKind::Pd,
        MatrixKind::Indefinite,
        MatrixKind::Skew,
        MatrixKind::PMatrix,
        MatrixKind::Positive,
    ];

    pub fn generate(self, m: usize, seed: u64) -> Matrix {
        let mut rng = rng(seed);
        match self {
            MatrixKind::Pd => spd(&mut rng, m),
            MatrixKind::Indefinite => indefinite(&mut rng, m),
            MatrixKind::Skew => skew(&mut rng, m),
            MatrixKind::PMatrix => p_matrix(&mut rng, m),
            MatrixKind::Positive => positive(&mut rng, m),
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Pd => "pd",
            MatrixKind::Indefinite => "indefinite",
            MatrixKind::Skew => "skew",
            MatrixKind::PMatrix => "pmatrix",
            MatrixKind::Positive => "positive",
        })
    }
}

impl FromStr for MatrixKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MatrixKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown matrix kind `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{form_class, is_positive_definite, symmetrizant};

    #[test]
    fn generators_are_deterministic() {
        for kind in MatrixKind::ALL {
            assert_eq!(kind.generate(4, 11), kind.generate(4, 11));
            assert_eq!(kind.to_string().parse::<MatrixKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<MatrixKind>().is_err());
    }

    #[test]
    fn pd_example() {
        let a = MatrixKind::Pd.generate(3, 7);
        assert!(is_positive_definite(&a, DEFAULT_TOL).unwrap().is_true());
    }

    #[test]
    fn skew_example() {
        let a = MatrixKind::Skew.generate(2, 1);
        assert_eq!(symmetrizant(&a), Matrix::zeros(2));
    }

    #[test]
    fn nonpositive_families() {
        let mut r = rng(5);
        for m in 1..6 {
            for variant in 0..3 {
                let a = nonpositive_form(&mut r, m, variant);
                let t = trichotomy(&a, DEFAULT_TOL).unwrap();
                assert_eq!(t.class, TrichotomyClass::NonpositiveForm);
                assert!(form_class(&a, DEFAULT_TOL).unwrap().lambda_max <= DEFAULT_TOL);
            }
        }
    }

    #[test]
    fn cone_offsets_are_solvable() {
        use crate::lcp::{enumerate_solutions, ClassicalLcp};
        let mut r = rng(3);
        for m in 1..6 {
            let a = normal_matrix(&mut r, m);
            let q = complementary_cone_offset(&mut r, &a);
            let p = ClassicalLcp::new(a, q).unwrap();
            assert!(!enumerate_solutions(&p, 1e-9).unwrap().is_empty());
        }
    }

    #[test]
    fn invertible_factor_condition() {
        let mut r = rng(9);
        for m in 1..7 {
            let g = invertible(&mut r, m);
            let inv = inverse(&g).unwrap();
            assert!(g.max_abs() * inv.max_abs() * m as f64 <= MAX_FACTOR_CONDITION);
        }
    }
}
