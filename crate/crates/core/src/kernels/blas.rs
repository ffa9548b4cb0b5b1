use num_complex::Complex64;

use super::site::{mul_add_site, sqnorm_site};
use crate::error::Result;
use crate::lattice::SpinorField;
use crate::transport::WorkerGroup;

/// Square norm of this worker's interior sites.
pub fn local_sqnorm(field: &SpinorField) -> f64 {
    let mut acc = 0.0;
    for site in field.interior().chunks_exact(field.site_len()) {
        sqnorm_site(site, &mut acc);
    }
    acc
}

/// `Σ |ψ|²` over the whole lattice; identical on every worker.
pub fn sqnorm(field: &SpinorField, group: &mut WorkerGroup) -> Result<f64> {
    group.global_sum(local_sqnorm(field))
}

/// `psi2 += c * psi1` on interior sites. Halos are left alone.
pub fn mul_add(psi2: &mut SpinorField, c: Complex64, psi1: &SpinorField) -> Result<()> {
    psi2.ensure_compatible(psi1)?;
    let l = psi2.site_len();
    for (a, b) in psi2
        .interior_mut()
        .chunks_exact_mut(l)
        .zip(psi1.interior().chunks_exact(l))
    {
        mul_add_site(a, c, b);
    }
    Ok(())
}

/// Local part of `<a, b> = Σ conj(a) b`.
pub fn local_dot(a: &SpinorField, b: &SpinorField) -> Complex64 {
    a.interior()
        .iter()
        .zip(b.interior())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

pub fn dot(a: &SpinorField, b: &SpinorField, group: &mut WorkerGroup) -> Result<Complex64> {
    a.ensure_compatible(b)?;
    group.global_sum_complex(local_dot(a, b))
}

/// `y = x + beta * y` on interior sites.
pub fn xpby(x: &SpinorField, beta: f64, y: &mut SpinorField) -> Result<()> {
    y.ensure_compatible(x)?;
    for (yi, xi) in y.interior_mut().iter_mut().zip(x.interior()) {
        *yi = xi + *yi * beta;
    }
    Ok(())
}

/// `y += alpha * x` with real `alpha`, interior sites only.
pub fn axpy(alpha: f64, x: &SpinorField, y: &mut SpinorField) -> Result<()> {
    y.ensure_compatible(x)?;
    for (yi, xi) in y.interior_mut().iter_mut().zip(x.interior()) {
        *yi += xi * alpha;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{init_spinor_random, Geometry, Sublattice};
    use std::sync::Arc;

    fn lattice() -> Arc<Sublattice> {
        Arc::new(
            Sublattice::new(&Geometry::new([8, 4, 4, 4], [1, 1, 1, 1], true).unwrap(), 0).unwrap(),
        )
    }

    #[test]
    fn sqnorm_simple_values() {
        let l = lattice();
        let mut g = WorkerGroup::solo();
        let mut f = SpinorField::zeros(&l, 3);
        assert_eq!(sqnorm(&f, &mut g).unwrap(), 0.0);
        f.site_mut(17)[5] = Complex64::new(3.0, 4.0);
        assert_eq!(sqnorm(&f, &mut g).unwrap(), 25.0);
    }

    #[test]
    fn mul_add_identities() {
        let l = lattice();
        let a = init_spinor_random(&l, 2, 1, 0);
        let mut b = init_spinor_random(&l, 2, 1, 1);
        let before = b.clone();
        mul_add(&mut b, Complex64::new(0.0, 0.0), &a).unwrap();
        assert_eq!(b.data(), before.data());

        let mut neg = a.clone();
        for z in neg.interior_mut() {
            *z = -*z;
        }
        let mut x = a.clone();
        mul_add(&mut x, Complex64::new(1.0, 0.0), &neg).unwrap();
        assert!(x.interior().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn mul_add_matches_scalar_loop() {
        let l = lattice();
        let a = init_spinor_random(&l, 3, 9, 0);
        let mut b = init_spinor_random(&l, 3, 9, 1);
        let c = Complex64::new(0.37, -1.21);
        let expect: Vec<Complex64> = b
            .interior()
            .iter()
            .zip(a.interior())
            .map(|(y, x)| y + c * x)
            .collect();
        mul_add(&mut b, c, &a).unwrap();
        for (got, want) in b.interior().iter().zip(&expect) {
            assert!((got - want).norm() < 1e-15);
        }
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let l = lattice();
        let a = SpinorField::zeros(&l, 2);
        let mut b = SpinorField::zeros(&l, 3);
        assert!(mul_add(&mut b, Complex64::new(1.0, 0.0), &a).is_err());
    }
}
