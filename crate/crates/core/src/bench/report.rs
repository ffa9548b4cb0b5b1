use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{Regime, RegimeConfig};
use crate::error::{Error, Result};
use crate::group::Representation;
use crate::kernels::{flops_per_site, Kernel};
use crate::lattice::{format_extents, Coords, Sublattice};
use crate::solver::CheckOutcome;
use crate::transport::ExchangePlan;

pub const FORMAT_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 6] = [
    "kernel",
    "iterations",
    "seconds",
    "flops",
    "flops_per_sec",
    "flops_per_sec_per_worker",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown format `{s}` (expected text, json or csv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelResult {
    pub kernel: Kernel,
    /// Sum of all batch sizes.
    pub iterations: u64,
    pub seconds: f64,
    pub flops: u64,
    pub flops_per_sec: f64,
    pub flops_per_sec_per_worker: f64,
    pub batches: Vec<u64>,
    /// The first batch alone overran the budget.
    pub short_run: bool,
    pub primary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub lattice: Coords,
    pub grid: Coords,
    pub local: Coords,
    pub global_volume: usize,
    pub local_volume: usize,
}

/// Per-worker cost of one Dirac application, from the FLOP model and the
/// halo exchange schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub dim: usize,
    pub real_links: bool,
    pub dirac_flops_per_site: u64,
    pub local_volume: usize,
    /// Spinor halo bytes received per application, all eight faces.
    pub halo_bytes: usize,
    /// Dirac FLOPs per halo byte.
    pub arithmetic_intensity: f64,
}

impl ModelSummary {
    pub fn for_config(config: &RegimeConfig) -> Result<Self> {
        let dim = config.dim()?;
        let real_links = config.representation.is_real();
        let geometry = config.geometry()?;
        let lattice = Sublattice::new(&geometry, 0)?;
        let plan = ExchangePlan::new(&lattice, dim);
        let dirac_flops_per_site = flops_per_site(Kernel::Dirac, dim, real_links);
        let local_volume = geometry.local_volume();
        let halo_bytes = plan.total_bytes();
        Ok(Self {
            dim,
            real_links,
            dirac_flops_per_site,
            local_volume,
            halo_bytes,
            arithmetic_intensity: (dirac_flops_per_site * local_volume as u64) as f64
                / halo_bytes as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub format_version: u32,
    pub regime: Regime,
    pub group_rank: usize,
    pub representation: Representation,
    pub fields: usize,
    pub mass: f64,
    pub seed: u64,
    pub time_budget: f64,
    pub geometry: GeometrySummary,
    pub workers: usize,
    pub kernels: Vec<KernelResult>,
    pub check: CheckOutcome,
    pub model: ModelSummary,
    pub timestamp: String,
}

impl BenchReport {
    pub fn kernel(&self, kernel: Kernel) -> Option<&KernelResult> {
        self.kernels.iter().find(|k| k.kernel == kernel)
    }

    /// True iff every requested check passed.
    pub fn passed(&self) -> bool {
        self.check.passed()
    }
}

pub fn format_report(report: &BenchReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out =
                serde_json::to_vec_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Config(e.to_string());
            w.write_record(CSV_HEADER).map_err(io)?;
            for k in &report.kernels {
                w.serialize((
                    k.kernel.name(),
                    k.iterations,
                    k.seconds,
                    k.flops,
                    k.flops_per_sec,
                    k.flops_per_sec_per_worker,
                ))
                .map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Config(e.to_string()))
        }
        ReportFormat::Text => Ok(format_text(report).into_bytes()),
    }
}

fn si(v: f64) -> String {
    const PREFIX: [(f64, &str); 5] = [(1e15, "P"), (1e12, "T"), (1e9, "G"), (1e6, "M"), (1e3, "k")];
    for (scale, p) in PREFIX {
        if v.abs() >= scale {
            return format!("{:.3} {p}", v / scale);
        }
    }
    format!("{v:.3} ")
}

fn format_text(r: &BenchReport) -> String {
    let g = &r.geometry;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "regime      {} (SU({}) {}, dimension {})",
        r.regime, r.group_rank, r.representation, r.model.dim
    );
    let _ = writeln!(
        s,
        "lattice     {} on grid {} (local {}, {} worker{})",
        format_extents(&g.lattice),
        format_extents(&g.grid),
        format_extents(&g.local),
        r.workers,
        if r.workers == 1 { "" } else { "s" }
    );
    let _ = writeln!(
        s,
        "fields      {}, mass {}, seed {}, budget {} s",
        r.fields, r.mass, r.seed, r.time_budget
    );
    let check = match &r.check {
        CheckOutcome::NotRun => "not run".to_string(),
        CheckOutcome::Passed {
            iterations,
            true_residual,
            seconds,
            ..
        } => {
            format!(
                "passed ({iterations} CG iterations, residual {true_residual:.2e}, {seconds:.2} s)"
            )
        }
        CheckOutcome::Failed {
            iterations,
            true_residual,
            ..
        } => {
            format!("FAILED ({iterations} CG iterations, residual {true_residual:.2e})")
        }
    };
    let _ = writeln!(s, "check       {check}");
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<8} {:>12} {:>10} {:>14} {:>14} {:>10}",
        "kernel", "iterations", "seconds", "FLOP/s", "per worker", "ref ratio"
    );
    for k in &r.kernels {
        let _ = writeln!(
            s,
            "{:<8} {:>12} {:>10.3} {:>13}FLOP/s {:>9}FLOP/s {:>6}{}",
            k.kernel.name(),
            k.iterations,
            k.seconds,
            si(k.flops_per_sec),
            si(k.flops_per_sec_per_worker),
            k.reference_ratio
                .map_or("-".to_string(), |x| format!("{x:.3}")),
            if k.primary { "  *" } else { "" }
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "model       {} FLOP/site dirac, {} halo bytes/worker, {:.2} FLOP/byte",
        r.model.dirac_flops_per_site, r.model.halo_bytes, r.model.arithmetic_intensity
    );
    let _ = writeln!(s, "timestamp   {}", r.timestamp);
    s
}

/// FLOP and intensity table for the stock regimes on `lattice` / `grid`.
pub fn model_table(configs: &[RegimeConfig]) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<8} {:>3} {:<14} {:>3} {:>8} {:>8} {:>8} {:>12} {:>10}",
        "regime", "N", "rep", "D", "sqnorm", "muladd", "dirac", "halo bytes", "FLOP/byte"
    );
    for c in configs {
        let m = ModelSummary::for_config(c)?;
        let _ = writeln!(
            s,
            "{:<8} {:>3} {:<14} {:>3} {:>8} {:>8} {:>8} {:>12} {:>10.2}",
            c.regime.name(),
            c.group_rank,
            c.representation.name(),
            m.dim,
            flops_per_site(Kernel::SqNorm, m.dim, m.real_links),
            flops_per_site(Kernel::MulAdd, m.dim, m.real_links),
            m.dirac_flops_per_site,
            m.halo_bytes,
            m.arithmetic_intensity
        );
    }
    Ok(s)
}
