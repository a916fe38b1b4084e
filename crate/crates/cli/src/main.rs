//! `cvqkd`: key rates, excess-noise frontiers, parameter sweeps and figure
//! datasets for one-way Gaussian CV QKD with trusted noise.
//!
//! Exit codes: 0 secure (K > 0) or output written, 3 insecure (K <= 0),
//! 2 invalid flags or configuration, 4 trusted-noise coupling not converged,
//! 5 non-physical state, 1 any other error.

mod config;
mod output;
mod scenario;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cvqkd_core::analysis::{
    figure_panels, optimize_key_rate, run_sweep_with, Axis, ExecutionMode, Figure, KeyRateRow,
    Objective, Parameter, SweepRow, SweepSpec,
};
use cvqkd_core::protocols::{ChannelParams, Direction, Method};
use serde_json::json;

use config::RunConfig;
use output::{Cells, DEFAULT_PRECISION};
use scenario::{LossArgs, ScenarioArgs};

/// Invalid flags or configuration (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_SECURE: u8 = 0;
const EXIT_OTHER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INSECURE: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;
const EXIT_NON_PHYSICAL: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "cvqkd",
    version,
    about = "Key-rate bounds for Gaussian CV QKD with trusted preparation and detection noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the key rate of one scenario.
    Keyrate(KeyrateArgs),
    /// Maximum tolerable excess noise along a loss axis.
    Frontier(FrontierArgs),
    /// Write the datasets of a figure, one CSV per panel.
    Reproduce(ReproduceArgs),
    /// Run a sweep described by a JSON configuration.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
struct KeyrateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    loss: LossArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    out: Format,
    /// Significant digits of printed numbers.
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = parse_precision)]
    precision: usize,
}

#[derive(Parser, Debug)]
struct ExecArgs {
    /// Significant digits of printed numbers.
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = parse_precision)]
    precision: usize,
    /// Evaluate grid points on one thread instead of the worker pool.
    #[arg(long)]
    sequential: bool,
}

impl ExecArgs {
    fn mode(&self) -> ExecutionMode {
        if self.sequential {
            ExecutionMode::Sequential
        } else {
            ExecutionMode::Parallel
        }
    }

    fn cells(&self) -> Cells {
        Cells {
            precision: self.precision,
        }
    }
}

#[derive(Parser, Debug)]
struct FrontierArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// First loss of the axis in dB (default 0.1 for dr, 0.5 for rr).
    #[arg(long)]
    db_start: Option<f64>,
    /// Last loss of the axis in dB (default 4 for dr, 30 for rr).
    #[arg(long)]
    db_stop: Option<f64>,
    /// Loss step in dB (default 0.1 for dr, 0.5 for rr).
    #[arg(long)]
    db_step: Option<f64>,
    /// CSV file to write (with a JSON sidecar); standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Parser, Debug)]
struct ReproduceArgs {
    /// Figure id: fig3 ... fig8, or 'all'.
    figure: String,
    /// Directory for the CSV files and their sidecars.
    #[arg(long, default_value = "data")]
    out_dir: PathBuf,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Parser, Debug)]
struct SweepArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV file to write; the sidecar goes next to it with a .json extension.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    exec: ExecArgs,
}

fn parse_precision(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(p @ 1..=17) => Ok(p),
        _ => Err(format!("expected 1 to 17 significant digits, got '{s}'")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Keyrate(a) => cmd_keyrate(&a),
        Command::Frontier(a) => cmd_frontier(&a),
        Command::Reproduce(a) => cmd_reproduce(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// `CVQKD_THREADS` caps the worker pool used by sweeps.
fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("CVQKD_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            UsageError(format!(
                "CVQKD_THREADS must be a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use cvqkd_core::Error as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Domain(_) => EXIT_USAGE,
                E::NotConverged { .. } => EXIT_NOT_CONVERGED,
                E::NonPhysical { .. }
                | E::NotPositiveDefinite
                | E::NotSymmetric { .. }
                | E::DegenerateMeasurement(_) => EXIT_NON_PHYSICAL,
                _ => EXIT_OTHER,
            };
        }
    }
    EXIT_OTHER
}

fn cmd_keyrate(a: &KeyrateArgs) -> Result<u8> {
    let s = a.scenario.resolve()?;
    let channel = a.loss.channel()?;
    let best = optimize_key_rate(&s.protocol, &channel, &s.purification, s.method, &s.over)?;
    let report = best.report;
    let row = KeyRateRow {
        scenario_id: "keyrate".to_string(),
        protocol: best.protocol,
        channel,
        result: Ok(report),
    };
    let cells = Cells {
        precision: a.precision,
    };
    let stdout = io::stdout().lock();
    match a.out {
        Format::Csv => output::write_csv(stdout, &[SweepRow::KeyRate(row)], cells)?,
        Format::Json => {
            let mut stdout = stdout;
            serde_json::to_writer_pretty(&mut stdout, &cells.key_rate_json(&row))?;
            writeln!(stdout)?;
        }
    }
    if !report.diagnostics.converged {
        eprintln!(
            "error: trusted-noise coupling not converged: estimated bias {:e} bits > tol_K = {:e}",
            report.diagnostics.t_bias, s.purification.tol_k
        );
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(if report.k > 0.0 {
        EXIT_SECURE
    } else {
        EXIT_INSECURE
    })
}

fn cmd_frontier(a: &FrontierArgs) -> Result<u8> {
    let s = a.scenario.resolve()?;
    if s.method == Method::Asymptotic {
        bail!(UsageError(
            "frontiers need excess noise, which the asymptotic method does not model".to_string()
        ));
    }
    let (start, stop, step) = match s.protocol.direction {
        Direction::Direct => (0.1, 4.0, 0.1),
        Direction::Reverse => (0.5, 30.0, 0.5),
    };
    let axis = Axis::range(
        Parameter::LossDb,
        a.db_start.unwrap_or(start),
        a.db_stop.unwrap_or(stop),
        a.db_step.unwrap_or(step),
    )
    .map_err(|e| UsageError(e.to_string()))?;
    let mut spec = SweepSpec::new("frontier", s.protocol, ChannelParams::new(1.0, 0.0)?)
        .with_objective(Objective::Frontier)
        .with_method(s.method)
        .optimizing(&s.over)
        .with_axis(axis);
    spec.purification = s.purification;
    let rows = run_checked(&spec, a.exec.mode())?;
    match &a.out {
        Some(path) => {
            let config = serde_json::to_value(RunConfig::from_spec(&spec))?;
            write_table(path, &rows, a.exec.precision, a.exec.cells(), config)?;
        }
        None => output::write_csv(io::stdout().lock(), &rows, a.exec.cells())?,
    }
    report_row_errors(&rows);
    Ok(EXIT_SECURE)
}

fn cmd_reproduce(a: &ReproduceArgs) -> Result<u8> {
    let figures: Vec<Figure> = if a.figure.eq_ignore_ascii_case("all") {
        Figure::ALL.to_vec()
    } else {
        vec![a
            .figure
            .parse()
            .map_err(|e: cvqkd_core::Error| UsageError(e.to_string()))?]
    };
    std::fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("creating {}", a.out_dir.display()))?;
    for figure in figures {
        for panel in figure_panels(figure)? {
            let rows = panel.run(a.exec.mode())?;
            let path = a.out_dir.join(format!("{}.csv", panel.name));
            let series: Vec<RunConfig> = panel.series.iter().map(RunConfig::from_spec).collect();
            let config = json!({
                "figure": figure,
                "panel": panel.name,
                "description": panel.description,
                "series": series,
            });
            if rows.is_empty() {
                let mut w = BufWriter::new(create(&path)?);
                output::write_header(&mut w, panel.objective() == Objective::Frontier)?;
                w.flush()?;
                config::write_json(
                    &path.with_extension("json"),
                    &config::sidecar(config, a.exec.precision, &rows),
                )?;
            } else {
                write_table(&path, &rows, a.exec.precision, a.exec.cells(), config)?;
            }
            report_row_errors(&rows);
            eprintln!("wrote {} ({} rows)", path.display(), rows.len());
        }
    }
    Ok(EXIT_SECURE)
}

fn cmd_sweep(a: &SweepArgs) -> Result<u8> {
    let cfg = RunConfig::load(&a.config)?;
    let spec = cfg.spec();
    let rows = run_checked(&spec, a.exec.mode())?;
    if rows.is_empty() {
        bail!("the sweep produced no rows");
    }
    write_table(
        &a.out,
        &rows,
        a.exec.precision,
        a.exec.cells(),
        serde_json::to_value(&cfg)?,
    )?;
    report_row_errors(&rows);
    Ok(EXIT_SECURE)
}

fn run_checked(spec: &SweepSpec, mode: ExecutionMode) -> Result<Vec<SweepRow>> {
    spec.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(run_sweep_with(spec, mode)?)
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// CSV at `path` and its sidecar at `path` with a `.json` extension.
fn write_table(
    path: &Path,
    rows: &[SweepRow],
    precision: usize,
    cells: Cells,
    config: serde_json::Value,
) -> Result<()> {
    let sidecar = path.with_extension("json");
    if sidecar == path {
        bail!(UsageError(format!(
            "output {} would be overwritten by its JSON sidecar; use a .csv name",
            path.display()
        )));
    }
    let mut w = BufWriter::new(create(path)?);
    output::write_csv(&mut w, rows, cells)?;
    w.flush()?;
    config::write_json(&sidecar, &config::sidecar(config, precision, rows))
}

fn report_row_errors(rows: &[SweepRow]) {
    let failed: Vec<&SweepRow> = rows.iter().filter(|r| r.error().is_some()).collect();
    if failed.is_empty() {
        return;
    }
    eprintln!("warning: {} of {} rows failed", failed.len(), rows.len());
    for r in failed.iter().take(5) {
        if let Some(e) = r.error() {
            eprintln!("  {}: {e}", r.scenario_id());
        }
    }
}
