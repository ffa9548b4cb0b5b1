//! Benchmark harness: presets, parameter files, timing loops and reports.

mod checks;
mod clock;
mod config;
mod harness;
mod params;
mod report;

pub use checks::{self_check, CheckItem};
pub use clock::{Clock, MockClock, SystemClock};
pub use config::{References, Regime, RegimeConfig, Scale};
pub use harness::{
    run_consistency_check, run_kernel_benchmark, run_suite, run_suite_in_process, run_suite_with,
    BenchState,
};
pub use params::{parse_params, ParamOverrides, KEYS};
pub use report::{
    format_report, model_table, BenchReport, GeometrySummary, KernelResult, ModelSummary,
    ReportFormat, CSV_HEADER, FORMAT_VERSION,
};
