use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lattice::{NDIM, NSPIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    SqNorm,
    MulAdd,
    Dirac,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::SqNorm, Kernel::MulAdd, Kernel::Dirac];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::SqNorm => "sqnorm",
            Kernel::MulAdd => "muladd",
            Kernel::Dirac => "dirac",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kernel `{s}`"))
    }
}

/// Floating-point operation conventions, in real operations.
pub struct FlopModel;

impl FlopModel {
    pub const COMPLEX_ADD: u64 = 2;
    pub const COMPLEX_MUL: u64 = 6;
    pub const COMPLEX_MAC: u64 = 8;
    pub const REAL_COMPLEX_MAC: u64 = 4;
    /// `acc += |z|²`
    pub const NORM_ACC: u64 = 4;
    /// `a·x + b·y` with real `a`, `b`
    pub const REAL_AXPBY: u64 = 6;

    /// Cost of one link-matrix entry times a complex number.
    pub fn link_mac(real_rep: bool) -> u64 {
        if real_rep {
            Self::REAL_COMPLEX_MAC
        } else {
            Self::COMPLEX_MAC
        }
    }

    /// Operations of one Wilson hopping term: project to two spin
    /// components, two matrix-vector products, rebuild and accumulate four.
    pub fn dirac_hop(dim: u64, real_rep: bool) -> u64 {
        let project = 2 * dim * Self::COMPLEX_ADD;
        let multiply = 2 * dim * dim * Self::link_mac(real_rep);
        let accumulate = NSPIN as u64 * dim * Self::COMPLEX_ADD;
        project + multiply + accumulate
    }
}

/// Real floating-point operations per lattice site for one application of `kernel`.
///
/// * sqnorm: `16 D`
/// * muladd: `32 D`
/// * dirac: `8 (12 D + 2 κ D²) + 24 D` with κ = 8 for complex and 4 for
///   real (adjoint) links
pub fn flops_per_site(kernel: Kernel, dim: usize, real_rep: bool) -> u64 {
    let d = dim as u64;
    let components = NSPIN as u64 * d;
    match kernel {
        Kernel::SqNorm => components * FlopModel::NORM_ACC,
        Kernel::MulAdd => components * FlopModel::COMPLEX_MAC,
        Kernel::Dirac => {
            2 * NDIM as u64 * FlopModel::dirac_hop(d, real_rep) + components * FlopModel::REAL_AXPBY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(flops_per_site(Kernel::SqNorm, 3, false), 48);
        assert_eq!(flops_per_site(Kernel::MulAdd, 1, false), 32);
        for d in 1..40usize {
            let du = d as u64;
            assert_eq!(flops_per_site(Kernel::SqNorm, d, true), 16 * du);
            assert_eq!(flops_per_site(Kernel::MulAdd, d, true), 32 * du);
            for (real, kappa) in [(true, 4), (false, 8)] {
                assert_eq!(
                    flops_per_site(Kernel::Dirac, d, real),
                    8 * (12 * du + 2 * kappa * du * du) + 24 * du
                );
            }
        }
        assert!(flops_per_site(Kernel::Dirac, 3, true) < flops_per_site(Kernel::Dirac, 3, false));
    }

    #[test]
    fn kernel_names_round_trip() {
        for k in Kernel::ALL {
            assert_eq!(k.name().parse::<Kernel>().unwrap(), k);
        }
    }
}
