use std::hint::black_box;
use std::sync::Arc;

use num_complex::Complex64;

use super::clock::Clock;
use super::config::RegimeConfig;
use super::report::{BenchReport, GeometrySummary, KernelResult, ModelSummary, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::kernels::{flops_per_site, mul_add, sqnorm, Kernel, WilsonDirac};
use crate::lattice::{init_gauge_random, init_spinor_random, GaugeField, SpinorField, Sublattice};
use crate::solver::{consistency_check_with, CheckOutcome, NormalOperator};
use crate::transport::{InProcessTransport, Transport, WorkerGroup};

/// Coefficient of the multiply-add test; small enough that repeated
/// application over a long run cannot overflow the fields.
const MULADD_COEFF: Complex64 = Complex64::new(1e-6, -1e-6);

/// Doublings after which the loop gives up on a clock that does not advance.
const MAX_BATCHES: usize = 62;

/// Gauge background and random spinor fields of one worker.
pub struct BenchState {
    config: RegimeConfig,
    gauge: GaugeField,
    fields: Vec<SpinorField>,
    /// Next unused spinor stream index.
    next_stream: u64,
}

impl BenchState {
    pub fn new(config: &RegimeConfig, rank: usize) -> Result<Self> {
        config.validate()?;
        let geometry = config.geometry()?;
        if geometry.workers() <= rank {
            return Err(Error::Config(format!(
                "rank {rank} outside a grid of {} workers",
                geometry.workers()
            )));
        }
        let lattice = Arc::new(Sublattice::new(&geometry, rank)?);
        let gauge = init_gauge_random(
            &lattice,
            config.group_rank,
            config.representation,
            config.seed,
        )?;
        let dim = gauge.dim();
        let fields = (0..config.fields as u64)
            .map(|i| init_spinor_random(&lattice, dim, config.seed, i))
            .collect();
        Ok(Self {
            config: config.clone(),
            gauge,
            fields,
            next_stream: config.fields as u64,
        })
    }

    pub fn config(&self) -> &RegimeConfig {
        &self.config
    }

    pub fn gauge(&self) -> &GaugeField {
        &self.gauge
    }

    pub fn fields(&self) -> &[SpinorField] {
        &self.fields
    }

    fn rerandomize(&mut self, index: usize) {
        let lattice = Arc::clone(self.gauge.lattice());
        self.fields[index] = init_spinor_random(
            &lattice,
            self.gauge.dim(),
            self.config.seed,
            self.next_stream,
        );
        self.next_stream += 1;
    }
}

/// `(&mut fields[a], &fields[b])` for `a != b`.
fn pair(fields: &mut [SpinorField], a: usize, b: usize) -> (&mut SpinorField, &SpinorField) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = fields.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = fields.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

/// Times `kernel` with batches of 1, 2, 4, ... iterations until a batch
/// ends past the time budget. Collective: every worker returns the same
/// result, with times taken from rank 0's clock.
pub fn run_kernel_benchmark(
    kernel: Kernel,
    state: &mut BenchState,
    group: &mut WorkerGroup,
    clock: &mut dyn Clock,
) -> Result<KernelResult> {
    let config = &state.config;
    let nfields = state.fields.len();
    let per_iteration = flops_per_site(kernel, state.gauge.dim(), config.representation.is_real())
        .checked_mul(config.geometry()?.global_volume() as u64)
        .ok_or_else(|| Error::Config("FLOP count overflows".into()))?;
    let dirac = WilsonDirac::new(&state.gauge, config.mass);
    let fields = &mut state.fields;

    let mut step = |i: u64, group: &mut WorkerGroup| -> Result<()> {
        match kernel {
            Kernel::SqNorm => {
                black_box(sqnorm(&fields[i as usize % nfields], group)?);
            }
            Kernel::MulAdd => {
                let j = i as usize % nfields;
                let (dst, src) = pair(fields, (j + 1) % nfields, j);
                mul_add(dst, MULADD_COEFF, src)?;
            }
            Kernel::Dirac => {
                let k = i as usize % (nfields / 2);
                let (lo, hi) = fields.split_at_mut(2 * k + 1);
                dirac.apply(&mut hi[0], &mut lo[2 * k], group)?;
            }
        }
        Ok(())
    };

    group.barrier()?;
    let start = clock.now();
    let mut batches = Vec::new();
    let mut iterations = 0u64;
    let mut previous = 0.0;
    let seconds = loop {
        let batch = 1u64 << batches.len();
        for i in iterations..iterations + batch {
            step(i, group)?;
        }
        iterations += batch;
        batches.push(batch);
        group.barrier()?;
        let elapsed = group.broadcast(&[clock.now() - start])?[0];
        if elapsed > config.time_budget {
            break elapsed;
        }
        if elapsed <= previous || batches.len() >= MAX_BATCHES {
            return Err(Error::Config("clock is not advancing".into()));
        }
        previous = elapsed;
    };

    let flops = per_iteration
        .checked_mul(iterations)
        .ok_or_else(|| Error::Config("FLOP count overflows".into()))?;
    let flops_per_sec = flops as f64 / seconds;
    Ok(KernelResult {
        kernel,
        iterations,
        seconds,
        flops,
        flops_per_sec,
        flops_per_sec_per_worker: flops_per_sec / group.size() as f64,
        short_run: batches.len() == 1,
        batches,
        primary: kernel == Kernel::Dirac,
        reference_ratio: config.references.get(kernel).map(|r| flops_per_sec / r),
    })
}

/// Inverts `D†D` on the first field, verifies the answer and re-randomises
/// the fields involved. Non-convergence is an error.
pub fn run_consistency_check(
    state: &mut BenchState,
    group: &mut WorkerGroup,
) -> Result<CheckOutcome> {
    let config = state.config.clone();
    let (check, _) = {
        let mut solve = NormalOperator::new(WilsonDirac::new(&state.gauge, config.mass));
        let mut verify = NormalOperator::new(WilsonDirac::new(&state.gauge, config.mass));
        consistency_check_with(&mut solve, &mut verify, &state.fields[0], &config.cg, group)?
    };
    state.rerandomize(0);
    state.rerandomize(1);
    Ok(check)
}

/// Allocation, optional check, then sqnorm, muladd and Dirac in turn.
pub fn run_suite(
    config: &RegimeConfig,
    group: &mut WorkerGroup,
    clock: &mut dyn Clock,
) -> Result<BenchReport> {
    let geometry = config.geometry()?;
    if geometry.workers() != group.size() {
        return Err(Error::Config(format!(
            "process grid needs {} workers but the group has {}",
            geometry.workers(),
            group.size()
        )));
    }
    let mut state = BenchState::new(config, group.rank())?;
    let check = if config.check {
        run_consistency_check(&mut state, group)?
    } else {
        CheckOutcome::NotRun
    };
    let kernels = Kernel::ALL
        .into_iter()
        .map(|k| run_kernel_benchmark(k, &mut state, group, clock))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport {
        format_version: FORMAT_VERSION,
        regime: config.regime,
        group_rank: config.group_rank,
        representation: config.representation,
        fields: config.fields,
        mass: config.mass,
        seed: config.seed,
        time_budget: config.time_budget,
        geometry: GeometrySummary {
            lattice: geometry.global(),
            grid: geometry.grid(),
            local: geometry.local(),
            global_volume: geometry.global_volume(),
            local_volume: geometry.local_volume(),
        },
        workers: group.size(),
        kernels,
        check,
        model: ModelSummary::for_config(config)?,
        timestamp: clock.timestamp(),
    })
}

/// Runs the suite on `config.workers()` in-process workers and returns
/// rank 0's report.
pub fn run_suite_in_process<C, F>(config: &RegimeConfig, make_clock: F) -> Result<BenchReport>
where
    C: Clock,
    F: Fn() -> C + Sync,
{
    config.validate()?;
    run_suite_with(
        config,
        InProcessTransport::group(config.workers()),
        make_clock,
    )
}

/// As [`run_suite_in_process`] over caller-supplied endpoints, one per rank.
pub fn run_suite_with<T, C, F>(
    config: &RegimeConfig,
    endpoints: Vec<T>,
    make_clock: F,
) -> Result<BenchReport>
where
    T: Transport + 'static,
    C: Clock,
    F: Fn() -> C + Sync,
{
    config.validate()?;
    if endpoints.len() != config.workers() {
        return Err(Error::Config(format!(
            "process grid needs {} workers, got {} endpoints",
            config.workers(),
            endpoints.len()
        )));
    }
    let mut results = WorkerGroup::run_with(endpoints, |group| {
        let mut clock = make_clock();
        run_suite(config, group, &mut clock)
    });
    results.swap_remove(0)
}
