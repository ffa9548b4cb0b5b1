use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{rep_dim, Representation};
use crate::kernels::Kernel;
use crate::lattice::{format_extents, Coords, Geometry};
use crate::solver::CgSettings;

/// The three stock workloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Comms,
    Balance,
    Compute,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Comms, Regime::Balance, Regime::Compute];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Comms => "comms",
            Regime::Balance => "balance",
            Regime::Compute => "compute",
        }
    }

    /// Gauge group rank and fermion representation of the stock test.
    pub fn theory(self) -> (usize, Representation) {
        match self {
            Regime::Comms => (2, Representation::Adjoint),
            Regime::Balance => (3, Representation::Fundamental),
            Regime::Compute => (6, Representation::Fundamental),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown regime `{s}` (expected comms, balance or compute)"))
    }
}

/// Preset lattice size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 8x4x4x4 on one worker, for workstations.
    Desk,
    /// 64x32x32x32 over an 8x8x8x8 process grid.
    Full,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Scale::Desk),
            "full" => Ok(Scale::Full),
            _ => Err(format!("unknown scale `{s}` (expected desk or full)")),
        }
    }
}

/// Optional per-kernel reference FLOP/s figures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct References {
    pub sqnorm: Option<f64>,
    pub muladd: Option<f64>,
    pub dirac: Option<f64>,
}

impl References {
    pub fn get(&self, kernel: Kernel) -> Option<f64> {
        match kernel {
            Kernel::SqNorm => self.sqnorm,
            Kernel::MulAdd => self.muladd,
            Kernel::Dirac => self.dirac,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    pub regime: Regime,
    pub group_rank: usize,
    pub representation: Representation,
    /// Random spinor fields to allocate.
    pub fields: usize,
    pub mass: f64,
    pub lattice: Coords,
    pub grid: Coords,
    /// Seconds per kernel before the doubling loop stops.
    pub time_budget: f64,
    pub check: bool,
    pub cg: CgSettings,
    pub seed: u64,
    /// Reject local volumes below the halo floor.
    pub enforce_floor: bool,
    pub references: References,
}

impl RegimeConfig {
    pub fn preset(regime: Regime, scale: Scale) -> Self {
        let (group_rank, representation) = regime.theory();
        let (lattice, grid, time_budget, check) = match scale {
            Scale::Desk => ([8, 4, 4, 4], [1, 1, 1, 1], 5.0, true),
            Scale::Full => ([64, 32, 32, 32], [8, 8, 8, 8], 60.0, false),
        };
        Self {
            regime,
            group_rank,
            representation,
            fields: 6,
            mass: 0.1,
            lattice,
            grid,
            time_budget,
            check,
            cg: CgSettings::default(),
            seed: 1,
            enforce_floor: true,
            references: References::default(),
        }
    }

    pub fn workers(&self) -> usize {
        self.grid.iter().product()
    }

    pub fn dim(&self) -> Result<usize> {
        rep_dim(self.representation, self.group_rank)
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.lattice, self.grid, self.enforce_floor)
    }

    pub fn validate(&self) -> Result<()> {
        self.dim()?;
        self.geometry()?;
        self.cg.validate()?;
        if self.fields < 2 {
            return Err(Error::Config(format!(
                "need at least 2 spinor fields, got {}",
                self.fields
            )));
        }
        if !(self.time_budget.is_finite() && self.time_budget >= 0.0) {
            return Err(Error::Config(format!(
                "time budget {} is not a non-negative number",
                self.time_budget
            )));
        }
        if !self.mass.is_finite() {
            return Err(Error::Config("mass must be finite".into()));
        }
        for k in Kernel::ALL {
            if let Some(r) = self.references.get(k) {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::Config(format!("reference for {k} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "{} SU({}) {} on {} over {}",
            self.regime,
            self.group_rank,
            self.representation,
            format_extents(&self.lattice),
            format_extents(&self.grid)
        )
    }
}
