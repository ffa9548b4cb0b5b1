//! Conjugate gradient on the normal operator `H = D†D`, used as the
//! benchmark's correctness check.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{axpy, dot, sqnorm, xpby, WilsonDirac};
use crate::lattice::SpinorField;
use crate::transport::WorkerGroup;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgSettings {
    /// Stop once `|r| / |b|` drops below this.
    pub threshold: f64,
    pub max_iterations: usize,
}

impl Default for CgSettings {
    fn default() -> Self {
        Self {
            threshold: 1e-7,
            max_iterations: 10_000,
        }
    }
}

impl CgSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config(format!(
                "CG threshold {} must lie in (0, 1)",
                self.threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("CG needs at least one iteration".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: SpinorField,
    pub iterations: usize,
    /// Relative residual carried by the recurrence.
    pub residual: f64,
    /// `|b - H x| / |b|` recomputed from the returned solution.
    pub true_residual: f64,
    pub seconds: f64,
    /// Recurrence residual after every iteration.
    pub history: Vec<f64>,
}

/// A hermitian positive (semi-)definite operator CG can invert.
pub trait HermitianOperator {
    fn apply(
        &mut self,
        out: &mut SpinorField,
        input: &mut SpinorField,
        group: &mut WorkerGroup,
    ) -> Result<()>;
}

/// `H = D†D` with `D† = γ5 D γ5`.
pub struct NormalOperator<'a> {
    dirac: WilsonDirac<'a>,
    tmp: Option<SpinorField>,
}

impl<'a> NormalOperator<'a> {
    pub fn new(dirac: WilsonDirac<'a>) -> Self {
        Self { dirac, tmp: None }
    }

    pub fn dirac(&self) -> &WilsonDirac<'a> {
        &self.dirac
    }
}

impl HermitianOperator for NormalOperator<'_> {
    fn apply(
        &mut self,
        out: &mut SpinorField,
        input: &mut SpinorField,
        group: &mut WorkerGroup,
    ) -> Result<()> {
        let tmp = self
            .tmp
            .get_or_insert_with(|| SpinorField::zeros(input.lattice(), input.dim()));
        self.dirac.apply(tmp, input, group)?;
        tmp.apply_gamma5();
        self.dirac.apply(out, tmp, group)?;
        out.apply_gamma5();
        Ok(())
    }
}

/// `out = D†D input`
pub fn apply_h(
    out: &mut SpinorField,
    gauge: &crate::lattice::GaugeField,
    input: &mut SpinorField,
    mass: f64,
    group: &mut WorkerGroup,
) -> Result<()> {
    NormalOperator::new(WilsonDirac::new(gauge, mass)).apply(out, input, group)
}

/// Relative residual `|b - A x| / |b|`.
pub fn relative_residual<O: HermitianOperator>(
    op: &mut O,
    x: &SpinorField,
    rhs: &SpinorField,
    group: &mut WorkerGroup,
) -> Result<f64> {
    let mut x = x.clone();
    let mut ax = SpinorField::zeros(x.lattice(), x.dim());
    op.apply(&mut ax, &mut x, group)?;
    let mut r = rhs.clone();
    axpy(-1.0, &ax, &mut r)?;
    let bb = sqnorm(rhs, group)?;
    let rr = sqnorm(&r, group)?;
    Ok(if bb == 0.0 {
        rr.sqrt()
    } else {
        (rr / bb).sqrt()
    })
}

/// Solves `A x = rhs` by plain conjugate gradient from `x = 0`.
///
/// When the recurrence residual drops below the threshold the true residual
/// is recomputed; if drift left it above the threshold the recurrence is
/// restarted from the true residual and iteration continues.
pub fn cg_solve_with<O: HermitianOperator>(
    op: &mut O,
    rhs: &SpinorField,
    settings: &CgSettings,
    group: &mut WorkerGroup,
) -> Result<CgOutcome> {
    settings.validate()?;
    let start = Instant::now();
    let lattice = rhs.lattice();
    let dim = rhs.dim();
    let mut x = SpinorField::zeros(lattice, dim);
    let bb = sqnorm(rhs, group)?;
    if bb == 0.0 {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            residual: 0.0,
            true_residual: 0.0,
            seconds: start.elapsed().as_secs_f64(),
            history: Vec::new(),
        });
    }
    if !bb.is_finite() {
        return Err(Error::ContractViolation(
            "right-hand side is not finite".into(),
        ));
    }
    let bnorm = bb.sqrt();

    let mut r = rhs.clone();
    let mut p = rhs.clone();
    let mut ap = SpinorField::zeros(lattice, dim);
    let mut rr = bb;
    let mut history = Vec::new();
    let mut best = 1.0f64;

    for iteration in 1..=settings.max_iterations {
        op.apply(&mut ap, &mut p, group)?;
        let pap = dot(&p, &ap, group)?.re;
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::NonConvergence {
                iterations: iteration,
                best_residual: best,
            });
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x)?;
        axpy(-alpha, &ap, &mut r)?;
        let rr_new = sqnorm(&r, group)?;
        let rel = rr_new.sqrt() / bnorm;
        history.push(rel);
        best = best.min(rel);

        if rel < settings.threshold {
            let true_residual = relative_residual(op, &x, rhs, group)?;
            if true_residual < settings.threshold {
                return Ok(CgOutcome {
                    solution: x,
                    iterations: iteration,
                    residual: rel,
                    true_residual,
                    seconds: start.elapsed().as_secs_f64(),
                    history,
                });
            }
            // restart from the true residual
            let mut xc = x.clone();
            op.apply(&mut ap, &mut xc, group)?;
            r.copy_from(rhs)?;
            axpy(-1.0, &ap, &mut r)?;
            p.copy_from(&r)?;
            rr = sqnorm(&r, group)?;
            continue;
        }
        let beta = rr_new / rr;
        xpby(&r, beta, &mut p)?;
        rr = rr_new;
    }
    Err(Error::NonConvergence {
        iterations: settings.max_iterations,
        best_residual: best,
    })
}

/// Inverts `H = D†D` for the Wilson operator on `gauge`.
pub fn cg_solve(
    gauge: &crate::lattice::GaugeField,
    rhs: &SpinorField,
    mass: f64,
    settings: &CgSettings,
    group: &mut WorkerGroup,
) -> Result<CgOutcome> {
    let mut op = NormalOperator::new(WilsonDirac::new(gauge, mass));
    cg_solve_with(&mut op, rhs, settings, group)
}

/// Outcome of the optional inversion check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckOutcome {
    NotRun,
    Passed {
        iterations: usize,
        residual: f64,
        true_residual: f64,
        seconds: f64,
    },
    Failed {
        iterations: usize,
        residual: f64,
        true_residual: f64,
        seconds: f64,
    },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        !matches!(self, CheckOutcome::Failed { .. })
    }
}

/// Solves with `solve_op`, then verifies the answer against `verify_op`.
/// The recomputed residual must stay below twice the threshold.
pub fn consistency_check_with<S: HermitianOperator, V: HermitianOperator>(
    solve_op: &mut S,
    verify_op: &mut V,
    rhs: &SpinorField,
    settings: &CgSettings,
    group: &mut WorkerGroup,
) -> Result<(CheckOutcome, CgOutcome)> {
    let outcome = cg_solve_with(solve_op, rhs, settings, group)?;
    let verified = relative_residual(verify_op, &outcome.solution, rhs, group)?;
    let fields = (
        outcome.iterations,
        outcome.residual,
        verified,
        outcome.seconds,
    );
    let check = if verified < 2.0 * settings.threshold {
        CheckOutcome::Passed {
            iterations: fields.0,
            residual: fields.1,
            true_residual: fields.2,
            seconds: fields.3,
        }
    } else {
        CheckOutcome::Failed {
            iterations: fields.0,
            residual: fields.1,
            true_residual: fields.2,
            seconds: fields.3,
        }
    };
    Ok((check, outcome))
}
