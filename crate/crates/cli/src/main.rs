use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use latbench_core::bench::{
    format_report, model_table, parse_params, run_suite_in_process, run_suite_with, self_check,
    ParamOverrides, Regime, RegimeConfig, ReportFormat, Scale, SystemClock,
};
use latbench_core::lattice::{parse_extents, Coords, Geometry};
use latbench_core::transport::TcpTransport;
use latbench_core::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "latbench",
    version,
    about = "Lattice gauge theory kernel benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the benchmark suite for one regime.
    Run(RunArgs),
    /// Run the built-in invariant and oracle checks.
    Check,
    /// Print the FLOP and arithmetic-intensity model for each regime.
    Model(ModelArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Stock test: comms, balance or compute.
    #[arg(long, value_parser = parse_regime)]
    test: Option<Regime>,
    /// Preset size: desk (8x4x4x4) or full (64x32x32x32).
    #[arg(long, default_value = "desk", value_parser = parse_scale)]
    scale: Scale,
    /// key = value parameter file applied over the preset.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Global lattice, TxXxYxZ.
    #[arg(long, value_parser = parse_coords)]
    lattice: Option<Coords>,
    /// Process grid, PtxPxxPyxPz.
    #[arg(long, value_parser = parse_coords)]
    grid: Option<Coords>,
    /// Worker count; picks a grid when --grid is absent.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Message passing between workers: inproc (channels) or tcp (loopback sockets).
    #[arg(long, default_value = "inproc", value_parser = ["inproc", "tcp"])]
    transport: String,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "desk", value_parser = parse_scale)]
    scale: Scale,
    #[arg(long, value_parser = parse_coords)]
    lattice: Option<Coords>,
    #[arg(long, value_parser = parse_coords)]
    grid: Option<Coords>,
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse()
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

fn parse_coords(s: &str) -> Result<Coords, String> {
    parse_extents(s)
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::Parse { .. }
            | Error::Decomposition(_)
            | Error::FloorViolation { .. }
            | Error::InvalidGroupRank(_)
    )
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("latbench: {e}");
    ExitCode::from(if is_config_error(e) {
        EXIT_CONFIG
    } else {
        EXIT_CHECK_FAILED
    })
}

fn resolve(args: &RunArgs) -> Result<RegimeConfig, Error> {
    let overrides = match &args.params {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_params(&text)?
        }
        None => ParamOverrides::default(),
    };
    let regime = args.test.or(overrides.regime).unwrap_or(Regime::Balance);
    let mut config = RegimeConfig::preset(regime, args.scale);
    overrides.apply(&mut config);
    config.regime = regime;
    if let Some(l) = args.lattice {
        config.lattice = l;
        if args.grid.is_none() && args.workers.is_none() && overrides.grid.is_none() {
            config.grid = [1; 4];
        }
    }
    if let Some(g) = args.grid {
        config.grid = g;
    }
    if let Some(w) = args.workers {
        if args.grid.is_some() {
            if config.workers() != w {
                return Err(Error::Config(format!(
                    "--workers {w} does not match a grid of {} workers",
                    config.workers()
                )));
            }
        } else {
            config.grid = Geometry::auto_grid(config.lattice, w)?;
        }
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs) -> ExitCode {
    let config = match resolve(&args) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    eprintln!("latbench: {}", config.summary());
    let result = match args.transport.as_str() {
        "tcp" => TcpTransport::local_group(config.workers())
            .and_then(|t| run_suite_with(&config, t, SystemClock::new)),
        _ => run_suite_in_process(&config, SystemClock::new),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let bytes = match format_report(&report, args.format) {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    let written = match &args.output {
        Some(path) => {
            fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("latbench: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("latbench: consistency check failed");
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn check() -> ExitCode {
    let items = self_check();
    for c in &items {
        println!(
            "{} {:<28} {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if items.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn model(args: ModelArgs) -> ExitCode {
    let configs: Vec<RegimeConfig> = Regime::ALL
        .into_iter()
        .map(|r| {
            let mut c = RegimeConfig::preset(r, args.scale);
            if let Some(l) = args.lattice {
                c.lattice = l;
            }
            if let Some(g) = args.grid {
                c.grid = g;
            }
            c.enforce_floor = false;
            c
        })
        .collect();
    match model_table(&configs) {
        Ok(table) => {
            print!("{table}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Check => check(),
        Command::Model(args) => model(args),
    }
}
