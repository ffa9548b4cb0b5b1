//! SU(N) matrices, the generators of su(N), and the maps from a
//! fundamental link into the fermion representations.
//!
//! Conventions used throughout:
//!
//! * generators are normalized as `tr(T_a T_b) = δ_ab / 2`, ordered as the
//!   symmetric/antisymmetric off-diagonal pair for each `j < k` followed by
//!   the `N - 1` diagonal ones (for N = 2 this reproduces σ1/2, σ2/2, σ3/2);
//! * two-index bases are ordered lexicographically in `(i, j)` with `i < j`
//!   for the antisymmetric and `i <= j` for the symmetric representation.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_rank(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidGroupRank(n))
    } else {
        Ok(())
    }
}

/// Fermion representation of the gauge group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Fundamental,
    Adjoint,
    Symmetric,
    Antisymmetric,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Fundamental,
        Representation::Adjoint,
        Representation::Symmetric,
        Representation::Antisymmetric,
    ];

    /// Adjoint matrices are real; every other representation is complex.
    pub fn is_real(self) -> bool {
        matches!(self, Representation::Adjoint)
    }

    pub fn name(self) -> &'static str {
        match self {
            Representation::Fundamental => "fundamental",
            Representation::Adjoint => "adjoint",
            Representation::Symmetric => "symmetric",
            Representation::Antisymmetric => "antisymmetric",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fundamental" | "f" | "fund" => Ok(Representation::Fundamental),
            "adjoint" | "a" | "adj" => Ok(Representation::Adjoint),
            "symmetric" | "s" | "sym" => Ok(Representation::Symmetric),
            "antisymmetric" | "as" | "asym" => Ok(Representation::Antisymmetric),
            other => Err(format!("unknown representation `{other}`")),
        }
    }
}

/// Dimension `D_R(N)` of a representation.
pub fn rep_dim(rep: Representation, n: usize) -> Result<usize> {
    check_rank(n)?;
    Ok(match rep {
        Representation::Fundamental => n,
        Representation::Adjoint => n * n - 1,
        Representation::Antisymmetric => n * (n - 1) / 2,
        Representation::Symmetric => n * (n + 1) / 2,
    })
}

/// An SU(N) matrix in the fundamental representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMatrix {
    m: DMatrix<Complex64>,
}

impl GroupMatrix {
    pub fn identity(n: usize) -> Result<Self> {
        check_rank(n)?;
        Ok(Self {
            m: DMatrix::identity(n, n),
        })
    }

    /// Wraps a matrix without checking the group invariants.
    pub fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        assert!(m.is_square(), "group matrix must be square");
        Self { m }
    }

    /// Wraps a matrix, rejecting anything that is not special unitary to 1e-12.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ContractViolation(
                "group matrix must be square".into(),
            ));
        }
        check_rank(m.nrows())?;
        let g = Self { m };
        if g.unitarity_error() >= 1e-12 || g.determinant_error() >= 1e-12 {
            return Err(Error::ContractViolation("matrix is not in SU(N)".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn mul(&self, other: &GroupMatrix) -> GroupMatrix {
        GroupMatrix {
            m: &self.m * &other.m,
        }
    }

    pub fn adjoint(&self) -> GroupMatrix {
        GroupMatrix {
            m: self.m.adjoint(),
        }
    }

    /// `max |(U†U - 1)_ij|`
    pub fn unitarity_error(&self) -> f64 {
        max_abs(&(self.m.adjoint() * &self.m - DMatrix::<Complex64>::identity(self.n(), self.n())))
    }

    /// `|det U - 1|`
    pub fn determinant_error(&self) -> f64 {
        (self.m.determinant() - Complex64::new(1.0, 0.0)).norm()
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Draws a generic SU(N) element: Gaussian complex fill, column-by-column
/// Gram-Schmidt, then the determinant phase is divided out.
pub fn random_group_element<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<GroupMatrix> {
    check_rank(n)?;
    loop {
        let mut m = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if orthonormalize_columns(&mut m) {
            let det = m.determinant();
            let phase = Complex64::from_polar(1.0, -det.arg() / n as f64);
            m *= phase;
            return Ok(GroupMatrix { m });
        }
    }
}

/// Modified Gram-Schmidt; returns false if the columns were (numerically) dependent.
fn orthonormalize_columns(m: &mut DMatrix<Complex64>) -> bool {
    let n = m.ncols();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..m.nrows()).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..m.nrows() {
                let v = m[(i, k)];
                m[(i, j)] -= proj * v;
            }
        }
        let norm = (0..m.nrows())
            .map(|i| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm < 1e-8 {
            return false;
        }
        for i in 0..m.nrows() {
            m[(i, j)] /= norm;
        }
    }
    true
}

/// Generators of su(N) with `tr(T_a T_b) = δ_ab / 2`.
pub fn generators(n: usize) -> Result<Vec<DMatrix<Complex64>>> {
    check_rank(n)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = DMatrix::from_element(n, n, zero);
            sym[(j, k)] = Complex64::new(0.5, 0.0);
            sym[(k, j)] = Complex64::new(0.5, 0.0);
            out.push(sym);

            let mut anti = DMatrix::from_element(n, n, zero);
            anti[(j, k)] = Complex64::new(0.0, -0.5);
            anti[(k, j)] = Complex64::new(0.0, 0.5);
            out.push(anti);
        }
    }
    for l in 1..n {
        let norm = 1.0 / (2.0 * (l * (l + 1)) as f64).sqrt();
        let mut diag = DMatrix::from_element(n, n, zero);
        for i in 0..l {
            diag[(i, i)] = Complex64::new(norm, 0.0);
        }
        diag[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        out.push(diag);
    }
    Ok(out)
}

/// Entries of a represented link.
#[derive(Debug, Clone, PartialEq)]
pub enum RepEntries {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// A `D_R x D_R` matrix acting on colour vectors of a fermion representation.
#[derive(Debug, Clone, PartialEq)]
pub struct RepMatrix {
    entries: RepEntries,
}

impl RepMatrix {
    pub fn identity(dim: usize, real: bool) -> Self {
        let entries = if real {
            RepEntries::Real(DMatrix::identity(dim, dim))
        } else {
            RepEntries::Complex(DMatrix::identity(dim, dim))
        };
        Self { entries }
    }

    pub fn from_row_major_real(dim: usize, entries: &[f64]) -> Self {
        Self {
            entries: RepEntries::Real(DMatrix::from_row_slice(dim, dim, entries)),
        }
    }

    pub fn from_row_major_complex(dim: usize, entries: &[Complex64]) -> Self {
        Self {
            entries: RepEntries::Complex(DMatrix::from_row_slice(dim, dim, entries)),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.entries {
            RepEntries::Real(m) => m.nrows(),
            RepEntries::Complex(m) => m.nrows(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.entries, RepEntries::Real(_))
    }

    pub fn entries(&self) -> &RepEntries {
        &self.entries
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match &self.entries {
            RepEntries::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            RepEntries::Complex(m) => m.clone(),
        }
    }

    pub fn mul(&self, other: &RepMatrix) -> RepMatrix {
        let entries = match (&self.entries, &other.entries) {
            (RepEntries::Real(a), RepEntries::Real(b)) => RepEntries::Real(a * b),
            _ => RepEntries::Complex(self.to_complex() * other.to_complex()),
        };
        RepMatrix { entries }
    }

    pub fn max_abs_diff(&self, other: &RepMatrix) -> f64 {
        max_abs(&(self.to_complex() - other.to_complex()))
    }

    pub fn unitarity_error(&self) -> f64 {
        let c = self.to_complex();
        let d = self.dim();
        max_abs(&(c.adjoint() * &c - DMatrix::<Complex64>::identity(d, d)))
    }

    /// Row-major entries as complex numbers.
    pub fn row_major_complex(&self) -> Vec<Complex64> {
        let c = self.to_complex();
        let d = self.dim();
        (0..d * d).map(|k| c[(k / d, k % d)]).collect()
    }

    /// Row-major entries; only meaningful for real representations.
    pub fn row_major_real(&self) -> Option<Vec<f64>> {
        match &self.entries {
            RepEntries::Real(m) => {
                let d = m.nrows();
                Some((0..d * d).map(|k| m[(k / d, k % d)]).collect())
            }
            RepEntries::Complex(_) => None,
        }
    }
}

/// Maps a fundamental link into the requested representation.
pub fn represent(u: &GroupMatrix, rep: Representation) -> Result<RepMatrix> {
    let n = u.n();
    check_rank(n)?;
    let out = match rep {
        Representation::Fundamental => RepMatrix {
            entries: RepEntries::Complex(u.m.clone()),
        },
        Representation::Adjoint => adjoint_rep(u)?,
        Representation::Antisymmetric => two_index_rep(u, false),
        Representation::Symmetric => two_index_rep(u, true),
    };
    let expected = rep_dim(rep, n)?;
    if out.dim() != expected {
        return Err(Error::ContractViolation(format!(
            "{rep} matrix has dimension {} instead of {expected}",
            out.dim()
        )));
    }
    Ok(out)
}

fn adjoint_rep(u: &GroupMatrix) -> Result<RepMatrix> {
    let gens = generators(u.n())?;
    let d = gens.len();
    let udag = u.m.adjoint();
    // U T_b U† for every b, then project on T_a.
    let rotated: Vec<DMatrix<Complex64>> = gens.iter().map(|t| &u.m * t * &udag).collect();
    let m = DMatrix::<f64>::from_fn(d, d, |a, b| {
        // tr(T_a M) = sum_ij T_a[i,j] M[j,i]
        let tr: Complex64 = gens[a]
            .iter()
            .zip(rotated[b].transpose().iter())
            .map(|(x, y)| x * y)
            .sum();
        2.0 * tr.re
    });
    Ok(RepMatrix {
        entries: RepEntries::Real(m),
    })
}

/// Index pairs spanning the two-index basis, in lexicographic order.
pub fn two_index_basis(n: usize, symmetric: bool) -> Vec<(usize, usize)> {
    let mut basis = Vec::new();
    for i in 0..n {
        let start = if symmetric { i } else { i + 1 };
        for j in start..n {
            basis.push((i, j));
        }
    }
    basis
}

fn two_index_rep(u: &GroupMatrix, symmetric: bool) -> RepMatrix {
    let basis = two_index_basis(u.n(), symmetric);
    // basis vector (i,j) = c_ij (e_i ⊗ e_j ± e_j ⊗ e_i) with c = 1/√2 off the
    // diagonal and 1/2 on it, so that every basis vector has unit norm.
    let coeff = |(i, j): (usize, usize)| {
        if i == j {
            0.5
        } else {
            std::f64::consts::FRAC_1_SQRT_2
        }
    };
    let sign = if symmetric { 1.0 } else { -1.0 };
    let d = basis.len();
    let m = DMatrix::from_fn(d, d, |r, c| {
        let (i, j) = basis[r];
        let (k, l) = basis[c];
        let val = u.m[(i, k)] * u.m[(j, l)] + sign * u.m[(i, l)] * u.m[(j, k)];
        val * (2.0 * coeff(basis[r]) * coeff(basis[c]))
    });
    RepMatrix {
        entries: RepEntries::Complex(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trace(m: &DMatrix<Complex64>) -> Complex64 {
        (0..m.nrows()).map(|i| m[(i, i)]).sum()
    }

    #[test]
    fn dimensions() {
        assert_eq!(rep_dim(Representation::Fundamental, 3).unwrap(), 3);
        assert_eq!(rep_dim(Representation::Adjoint, 2).unwrap(), 3);
        assert_eq!(rep_dim(Representation::Antisymmetric, 4).unwrap(), 6);
        assert_eq!(rep_dim(Representation::Symmetric, 6).unwrap(), 21);
        assert_eq!(
            rep_dim(Representation::Adjoint, 1),
            Err(Error::InvalidGroupRank(1))
        );
    }

    #[test]
    fn random_elements_are_special_unitary_and_deterministic() {
        for n in [2, 3, 4, 6] {
            let mut rng = ChaCha8Rng::seed_from_u64(7 + n as u64);
            for _ in 0..20 {
                let u = random_group_element(n, &mut rng).unwrap();
                assert!(u.unitarity_error() < 1e-12);
                assert!(u.determinant_error() < 1e-12);
            }
        }
        let a = random_group_element(2, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = random_group_element(2, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
        assert!(random_group_element(1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn su2_generators_are_half_pauli() {
        let g = generators(2).unwrap();
        let z = c(0.0, 0.0);
        let s1 = DMatrix::from_row_slice(2, 2, &[z, c(0.5, 0.0), c(0.5, 0.0), z]);
        let s2 = DMatrix::from_row_slice(2, 2, &[z, c(0.0, -0.5), c(0.0, 0.5), z]);
        let s3 = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), z, z, c(-0.5, 0.0)]);
        assert_eq!(g, vec![s1, s2, s3]);
    }

    #[test]
    fn generator_normalization() {
        for n in 2..=6 {
            let g = generators(n).unwrap();
            assert_eq!(g.len(), n * n - 1);
            for (a, ta) in g.iter().enumerate() {
                assert!(trace(ta).norm() < 1e-14);
                assert!(max_abs(&(ta - ta.adjoint())) < 1e-15);
                for (b, tb) in g.iter().enumerate() {
                    let expect = if a == b { 0.5 } else { 0.0 };
                    assert!((trace(&(ta * tb)) - c(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn identity_maps_to_identity() {
        for n in [2, 3, 4] {
            let one = GroupMatrix::identity(n).unwrap();
            for rep in Representation::ALL {
                let r = represent(&one, rep).unwrap();
                let d = rep_dim(rep, n).unwrap();
                assert!(r.max_abs_diff(&RepMatrix::identity(d, rep.is_real())) < 1e-14);
            }
        }
    }

    #[test]
    fn adjoint_of_diagonal_su2_matches_direct_trace() {
        let theta: f64 = 0.3;
        let z = c(0.0, 0.0);
        let u = GroupMatrix::from_matrix(DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(1.0, theta),
                z,
                z,
                Complex64::from_polar(1.0, -theta),
            ],
        ))
        .unwrap();
        let r = represent(&u, Representation::Adjoint).unwrap();
        let RepEntries::Real(m) = r.entries() else {
            panic!("adjoint must be real")
        };
        let g = generators(2).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let direct = trace(&(&g[a] * u.matrix() * &g[b] * u.matrix().adjoint())) * 2.0;
                assert!((direct.re - m[(a, b)]).abs() < 1e-14);
                assert!(direct.im.abs() < 1e-14);
            }
        }
        // a rotation by 2θ in the (1,2) plane
        let (s, co) = (2.0 * theta).sin_cos();
        assert!((m[(0, 0)] - co).abs() < 1e-14);
        assert!((m[(1, 1)] - co).abs() < 1e-14);
        assert!((m[(0, 1)].abs() - s).abs() < 1e-14);
        assert!((m[(2, 2)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn homomorphism_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in [2, 3, 4] {
            for rep in Representation::ALL {
                for _ in 0..10 {
                    let u = random_group_element(n, &mut rng).unwrap();
                    let v = random_group_element(n, &mut rng).unwrap();
                    let ru = represent(&u, rep).unwrap();
                    let rv = represent(&v, rep).unwrap();
                    let ruv = represent(&u.mul(&v), rep).unwrap();
                    assert!(ruv.max_abs_diff(&ru.mul(&rv)) < 1e-10, "{rep} N={n}");
                    assert!(ru.unitarity_error() < 1e-10);
                    assert_eq!(ru.is_real(), rep.is_real());
                }
            }
        }
    }

    #[test]
    fn representation_parsing() {
        assert_eq!(
            "adjoint".parse::<Representation>(),
            Ok(Representation::Adjoint)
        );
        assert_eq!(
            "AS".parse::<Representation>(),
            Ok(Representation::Antisymmetric)
        );
        assert!("spinorial".parse::<Representation>().is_err());
    }
}
