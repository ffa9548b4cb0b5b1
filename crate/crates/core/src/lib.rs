//! Lattice gauge theory benchmark: SU(N) group algebra, a decomposed 4D
//! lattice, the sqnorm / muladd / Wilson-Dirac kernels, a CG check and the
//! timing harness.

pub mod bench;
pub mod error;
pub mod group;
pub mod kernels;
pub mod lattice;
pub mod solver;
pub mod transport;

pub use error::{Error, Result};
