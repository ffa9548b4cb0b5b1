//! Euclidean gamma matrices in a chiral basis.
//!
//! ```text
//! γ0 = [[0, 1], [1, 0]]      γk = [[0, -iσk], [iσk, 0]]      γ5 = γ0γ1γ2γ3 = diag(-1, -1, 1, 1)
//! ```
//!
//! Every γμ is block off-diagonal with exactly one unit-phase entry per
//! row. The Wilson kernel relies only on that structure (see
//! [`SpinProjectors`]), so another basis of the same shape can be dropped in.

use num_complex::Complex64;

use super::arith::Phase;
use crate::lattice::NDIM;

pub type SpinMatrix = [[Complex64; 4]; 4];

const Z: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GammaBasis {
    pub gamma: [SpinMatrix; NDIM],
    pub gamma5: SpinMatrix,
}

pub fn spin_mul(a: &SpinMatrix, b: &SpinMatrix) -> SpinMatrix {
    let mut out = [[Z; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn spin_identity() -> SpinMatrix {
    let mut m = [[Z; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn spin_adjoint(a: &SpinMatrix) -> SpinMatrix {
    let mut out = [[Z; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

impl GammaBasis {
    pub fn chiral() -> Self {
        let g0 = [
            [Z, Z, ONE, Z],
            [Z, Z, Z, ONE],
            [ONE, Z, Z, Z],
            [Z, ONE, Z, Z],
        ];
        let g1 = [[Z, Z, Z, -I], [Z, Z, -I, Z], [Z, I, Z, Z], [I, Z, Z, Z]];
        let g2 = [
            [Z, Z, Z, -ONE],
            [Z, Z, ONE, Z],
            [Z, ONE, Z, Z],
            [-ONE, Z, Z, Z],
        ];
        let g3 = [[Z, Z, -I, Z], [Z, Z, Z, I], [I, Z, Z, Z], [Z, -I, Z, Z]];
        let gamma5 = spin_mul(&spin_mul(&g0, &g1), &spin_mul(&g2, &g3));
        Self {
            gamma: [g0, g1, g2, g3],
            gamma5,
        }
    }
}

impl Default for GammaBasis {
    fn default() -> Self {
        Self::chiral()
    }
}

/// Sparse form of `(1 ∓ γμ)` used by the Wilson stencil.
///
/// Row `r` of `γμ` has its single entry `phase[μ][r]` in column `col[μ][r]`.
/// Because γμ² = 1 and γμ maps the upper spin pair onto the lower one, the
/// lower half of `(1 - sγμ)ψ` equals `-s · phase[μ][r] · h[col[μ][r]]`
/// where `h` is the upper half, so only two spin components need the link
/// multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinProjectors {
    pub col: [[usize; 4]; NDIM],
    pub phase: [[Phase; 4]; NDIM],
}

impl SpinProjectors {
    /// Extracts the sparse structure; panics if the basis is not block
    /// off-diagonal with unit-phase entries.
    pub fn new(basis: &GammaBasis) -> Self {
        let mut col = [[0; 4]; NDIM];
        let mut phase = [[Phase::One; 4]; NDIM];
        for mu in 0..NDIM {
            for r in 0..4 {
                let nz: Vec<usize> = (0..4).filter(|&c| basis.gamma[mu][r][c] != Z).collect();
                assert_eq!(nz.len(), 1, "gamma_{mu} row {r} is not monomial");
                let c = nz[0];
                assert!((r < 2) != (c < 2), "gamma_{mu} is not block off-diagonal");
                col[mu][r] = c;
                phase[mu][r] = Phase::from_value(basis.gamma[mu][r][c])
                    .expect("gamma entries must be unit phases");
            }
        }
        Self { col, phase }
    }
}

impl Default for SpinProjectors {
    fn default() -> Self {
        Self::new(&GammaBasis::chiral())
    }
}
