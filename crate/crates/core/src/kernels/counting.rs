//! Instrumented scalar for counting floating-point operations.
//!
//! [`Counted`] behaves like `f64` but every add, subtract and multiply bumps
//! a thread-local counter. Negation and conversions are free. Running a
//! kernel on `Counted` data therefore counts exactly the real operations it
//! performs, independently of any closed-form model.

use std::cell::Cell;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

use super::arith::{Cplx, Real};
use super::flops::Kernel;
use super::gamma::SpinProjectors;
use super::site::{dirac_site, mul_add_site, sqnorm_site, DiracScratch, DiracStencil};
use crate::lattice::{init_spinor_random, GaugeField, LinkStore};

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Counted(pub f64);

#[inline]
fn tick() {
    OPS.with(|c| c.set(c.get() + 1));
}

/// Runs `f` and returns its result with the number of counted operations.
pub fn count_ops<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = OPS.with(|c| c.get());
    let r = f();
    let after = OPS.with(|c| c.get());
    (r, after - before)
}

impl Add for Counted {
    type Output = Counted;
    fn add(self, rhs: Counted) -> Counted {
        tick();
        Counted(self.0 + rhs.0)
    }
}

impl Sub for Counted {
    type Output = Counted;
    fn sub(self, rhs: Counted) -> Counted {
        tick();
        Counted(self.0 - rhs.0)
    }
}

impl Mul for Counted {
    type Output = Counted;
    fn mul(self, rhs: Counted) -> Counted {
        tick();
        Counted(self.0 * rhs.0)
    }
}

impl Neg for Counted {
    type Output = Counted;
    fn neg(self) -> Counted {
        Counted(-self.0)
    }
}

impl AddAssign for Counted {
    fn add_assign(&mut self, rhs: Counted) {
        *self = *self + rhs;
    }
}

impl SubAssign for Counted {
    fn sub_assign(&mut self, rhs: Counted) {
        *self = *self - rhs;
    }
}

impl Real for Counted {
    fn from_f64(v: f64) -> Self {
        Counted(v)
    }

    fn to_f64(self) -> f64 {
        self.0
    }
}

fn counted(v: &[Complex<f64>]) -> Vec<Cplx<Counted>> {
    v.iter()
        .map(|z| Complex::new(Counted(z.re), Counted(z.im)))
        .collect()
}

/// Operations of one sweep of `kernel` over every interior site of the
/// gauge field's lattice, run on instrumented scalars.
pub fn count_sweep(kernel: Kernel, gauge: &GaugeField, mass: f64) -> u64 {
    let lattice = gauge.lattice();
    let dim = gauge.dim();
    let sl = 4 * dim;
    let a = counted(init_spinor_random(lattice, dim, 1, 0).data());
    let mut b = counted(init_spinor_random(lattice, dim, 1, 1).data());
    let volume = lattice.volume();
    match kernel {
        Kernel::SqNorm => {
            count_ops(|| {
                let mut acc = Counted(0.0);
                for site in a[..volume * sl].chunks_exact(sl) {
                    sqnorm_site(site, &mut acc);
                }
                acc
            })
            .1
        }
        Kernel::MulAdd => {
            let c = Complex::new(Counted(0.5), Counted(-0.25));
            count_ops(|| {
                for (x, y) in b[..volume * sl]
                    .chunks_exact_mut(sl)
                    .zip(a.chunks_exact(sl))
                {
                    mul_add_site(x, c, y);
                }
            })
            .1
        }
        Kernel::Dirac => {
            let projectors = SpinProjectors::default();
            let neighbors = lattice.neighbor_table();
            let diagonal = Counted(4.0 + mass);
            let mut sweep = |links_run: &mut dyn FnMut(usize, &mut [Cplx<Counted>])| {
                count_ops(|| {
                    for (site, o) in b[..volume * sl].chunks_exact_mut(sl).enumerate() {
                        links_run(site, o);
                    }
                })
                .1
            };
            match gauge.links() {
                LinkStore::Real(v) => {
                    let links: Vec<Counted> = v.iter().map(|&x| Counted(x)).collect();
                    let st = DiracStencil {
                        dim,
                        neighbors,
                        links: &links,
                        diagonal,
                        projectors: &projectors,
                    };
                    let mut scratch = DiracScratch::new(dim);
                    sweep(&mut |site, o| dirac_site(&st, site, &a, o, &mut scratch))
                }
                LinkStore::Complex(v) => {
                    let links = counted(v);
                    let st = DiracStencil {
                        dim,
                        neighbors,
                        links: &links,
                        diagonal,
                        projectors: &projectors,
                    };
                    let mut scratch = DiracScratch::new(dim);
                    sweep(&mut |site, o| dirac_site(&st, site, &a, o, &mut scratch))
                }
            }
        }
    }
}

/// [`count_sweep`] divided by the number of sites. Panics if the sweep
/// did not cost the same on every site.
pub fn counted_flops_per_site(kernel: Kernel, gauge: &GaugeField, mass: f64) -> u64 {
    let volume = gauge.lattice().volume() as u64;
    let total = count_sweep(kernel, gauge, mass);
    assert_eq!(
        total % volume,
        0,
        "operation count is not uniform over sites"
    );
    total / volume
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::arith::{cadd, cmac, rmac};
    use num_complex::Complex;

    #[test]
    fn conventions() {
        let z = Complex::new(Counted(1.0), Counted(2.0));
        let (_, n) = count_ops(|| cadd(z, z));
        assert_eq!(n, 2);
        let (_, n) = count_ops(|| {
            let mut acc = z;
            cmac(&mut acc, z, z)
        });
        assert_eq!(n, 8);
        let (_, n) = count_ops(|| {
            let mut acc = z;
            rmac(&mut acc, Counted(3.0), z)
        });
        assert_eq!(n, 4);
        let (_, n) = count_ops(|| -Counted(1.0));
        assert_eq!(n, 0);
    }
}
