//! Lattice geometry, domain decomposition and field storage.

mod field;
mod geometry;
pub mod rng;

pub use field::{init_gauge_random, init_spinor_random, GaugeField, LinkStore, SpinorField, NSPIN};
pub use geometry::{
    format_extents, parse_extents, Coords, Face, Geometry, Sign, SiteRef, Sublattice, LOCAL_FLOOR,
    NDIM,
};
