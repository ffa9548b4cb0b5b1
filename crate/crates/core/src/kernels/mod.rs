//! Benchmark kernels: square norm, complex multiply-add and the
//! Wilson-Dirac operator, with the gamma algebra and FLOP accounting.

pub mod arith;
mod blas;
pub mod counting;
mod dirac;
mod flops;
pub mod gamma;
pub mod site;

pub use blas::{axpy, dot, local_dot, local_sqnorm, mul_add, sqnorm, xpby};
pub use dirac::{apply_dirac, WilsonDirac};
pub use flops::{flops_per_site, FlopModel, Kernel};
