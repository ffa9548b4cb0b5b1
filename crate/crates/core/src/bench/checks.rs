//! Quick invariant and oracle checks runnable on any machine, independent
//! of timing.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::Regime;
use crate::error::Result;
use crate::group::{random_group_element, rep_dim, represent, Representation};
use crate::kernels::counting::counted_flops_per_site;
use crate::kernels::{apply_dirac, flops_per_site, local_sqnorm, Kernel};
use crate::lattice::{
    init_gauge_random, init_spinor_random, GaugeField, Geometry, SpinorField, Sublattice,
};
use crate::solver::{cg_solve, CgSettings};
use crate::transport::WorkerGroup;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn item(name: &'static str, result: Result<(bool, String)>) -> CheckItem {
    match result {
        Ok((passed, detail)) => CheckItem {
            name,
            passed,
            detail,
        },
        Err(e) => CheckItem {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn sublattice(global: [usize; 4], grid: [usize; 4], rank: usize) -> Result<Arc<Sublattice>> {
    Ok(Arc::new(Sublattice::new(
        &Geometry::new(global, grid, false)?,
        rank,
    )?))
}

fn representation_dimensions() -> Result<(bool, String)> {
    for n in 2..=6 {
        let expect = [n, n * n - 1, n * (n + 1) / 2, n * (n - 1) / 2];
        for (rep, want) in Representation::ALL.into_iter().zip(expect) {
            if rep_dim(rep, n)? != want {
                return Ok((false, format!("SU({n}) {rep}")));
            }
        }
    }
    Ok((true, "N = 2..6, four representations".into()))
}

fn homomorphism() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for n in [2, 3, 4, 6] {
        for rep in Representation::ALL {
            for _ in 0..10 {
                let u = random_group_element(n, &mut rng)?;
                let v = random_group_element(n, &mut rng)?;
                let lhs = represent(&u.mul(&v), rep)?;
                let rhs = represent(&u, rep)?.mul(&represent(&v, rep)?);
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
    }
    Ok((worst < 1e-10, format!("max deviation {worst:.1e}")))
}

fn flop_model() -> Result<(bool, String)> {
    let l = sublattice([2, 2, 2, 2], [1, 1, 1, 1], 0)?;
    for regime in Regime::ALL {
        let (n, rep) = regime.theory();
        let gauge = init_gauge_random(&l, n, rep, 3)?;
        for k in Kernel::ALL {
            let counted = counted_flops_per_site(k, &gauge, 0.1);
            let model = flops_per_site(k, gauge.dim(), rep.is_real());
            if counted != model {
                return Ok((
                    false,
                    format!("{regime} {k}: counted {counted}, model {model}"),
                ));
            }
        }
    }
    Ok((true, "counted operations equal the model".into()))
}

fn unit_gauge_identity() -> Result<(bool, String)> {
    let l = sublattice([4, 4, 4, 4], [1, 1, 1, 1], 0)?;
    let gauge = GaugeField::unit(&l, 3, Representation::Fundamental)?;
    let mut psi = SpinorField::zeros(&l, 3);
    let pattern = init_spinor_random(&l, 3, 1, 0).site(0).to_vec();
    for s in 0..l.volume() {
        psi.site_mut(s).copy_from_slice(&pattern);
    }
    let mut out = SpinorField::zeros(&l, 3);
    let m = 0.1;
    apply_dirac(&mut out, &gauge, &mut psi, m, &mut WorkerGroup::solo())?;
    let worst = out
        .interior()
        .iter()
        .zip(psi.interior())
        .map(|(o, p)| (o - p * m).norm())
        .fold(0.0, f64::max);
    Ok((worst < 1e-13, format!("max deviation {worst:.1e}")))
}

fn serial_parallel() -> Result<(bool, String)> {
    let global = [8, 4, 4, 4];
    let (n, rep) = Regime::Balance.theory();
    let run = |grid: [usize; 4], group: &mut WorkerGroup| -> Result<Vec<(usize, f64)>> {
        let l = sublattice(global, grid, group.rank())?;
        let gauge = init_gauge_random(&l, n, rep, 11)?;
        let mut psi = init_spinor_random(&l, gauge.dim(), 11, 0);
        let mut out = SpinorField::zeros(&l, gauge.dim());
        apply_dirac(&mut out, &gauge, &mut psi, 0.1, group)?;
        Ok((0..l.volume())
            .map(|s| (l.global_index(s), local_sqnorm_site(&out, s)))
            .collect())
    };
    let mut serial = vec![0.0; 512];
    for (gi, v) in run([1, 1, 1, 1], &mut WorkerGroup::solo())? {
        serial[gi] = v;
    }
    let parts = WorkerGroup::run_in_process(4, |g| run([2, 2, 1, 1], g));
    let mut worst = 0.0f64;
    for part in parts {
        for (gi, v) in part? {
            worst = worst.max((serial[gi] - v).abs() / serial[gi].max(1.0));
        }
    }
    Ok((
        worst < 1e-12,
        format!("1 vs 4 workers, max deviation {worst:.1e}"),
    ))
}

fn local_sqnorm_site(field: &SpinorField, s: usize) -> f64 {
    field.site(s).iter().map(|z| z.norm_sqr()).sum()
}

fn cg_convergence() -> Result<(bool, String)> {
    let l = sublattice([4, 4, 4, 4], [1, 1, 1, 1], 0)?;
    let gauge = init_gauge_random(&l, 2, Representation::Fundamental, 5)?;
    let rhs = init_spinor_random(&l, 2, 5, 0);
    let settings = CgSettings::default();
    let out = cg_solve(&gauge, &rhs, 0.1, &settings, &mut WorkerGroup::solo())?;
    let ok =
        out.true_residual < 2.0 * settings.threshold && local_sqnorm(&out.solution).is_finite();
    Ok((
        ok,
        format!(
            "{} iterations, true residual {:.1e}",
            out.iterations, out.true_residual
        ),
    ))
}

/// Runs every check; nothing here depends on the clock.
pub fn self_check() -> Vec<CheckItem> {
    vec![
        item("representation dimensions", representation_dimensions()),
        item("representation homomorphism", homomorphism()),
        item("flop model", flop_model()),
        item("unit gauge identity", unit_gauge_identity()),
        item("serial vs parallel dirac", serial_parallel()),
        item("cg convergence", cg_convergence()),
    ]
}
