mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qubit_landscape::checks::{run_checks, CheckConfig};
use qubit_landscape::montecarlo::{hadamard_scan, probability_map, write_scan_csv, SamplingConfig};
use qubit_landscape::optimizer::{multistart, AscentConfig};
use qubit_landscape::{classify, LandscapeError};

use config::{GridSpec, RunConfig, CLASSIFY_HORIZON, OPTIMIZE_HORIZON, SCAN_HORIZON};

#[derive(Debug)]
pub enum AppError {
    /// Bad flags, gate names or config files. Exit code 1.
    Usage(String),
    /// Inputs the library rejects, or I/O failures. Exit code 2.
    Invalid(String),
}

impl From<LandscapeError> for AppError {
    fn from(e: LandscapeError) -> Self {
        AppError::Invalid(e.to_string())
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Invalid(e.to_string())
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Invalid(_) => 2,
        }
    }
}

/// Control-landscape experiments for a driven qubit `H0 + f(t) V`.
#[derive(Parser, Debug)]
#[command(name = "qlandscape", version)]
struct Cli {
    /// TOML file with default values; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the trap structure at the special control and print a JSON verdict.
    Classify(ClassifyArgs),
    /// Estimate P(J < J0) over a grid of coupling angles and diagonal targets.
    ScanMap(MapArgs),
    /// Estimate P(J < J0) for the Hadamard target over coupling angles.
    ScanHadamard(HadamardArgs),
    /// Multistart gradient ascent; prints a JSON summary.
    Optimize(OptimizeArgs),
    /// Randomized self-checks of derivatives and invariances.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Drift H0 as 4 Pauli coefficients `c0,ax,ay,az` or 8 reals (row-major re,im).
    #[arg(long, allow_hyphen_values = true, value_parser = reals)]
    h0: Option<::std::vec::Vec<f64>>,
    /// Control Hamiltonian V, same forms as --h0.
    #[arg(long, allow_hyphen_values = true, value_parser = reals)]
    v: Option<::std::vec::Vec<f64>>,
    /// Target gate: hadamard, phase, phase:<phi> or custom:<8 reals>.
    #[arg(long)]
    gate: Option<String>,
    /// Phase angle for `--gate phase`.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Time horizon T [default: pi].
    #[arg(long)]
    t: Option<f64>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SamplingArgs {
    /// Time horizon T [default: pi/3].
    #[arg(long)]
    t: Option<f64>,
    /// Piecewise-constant segments per random control [default: 100].
    #[arg(long)]
    segments: Option<usize>,
    /// Random controls per estimate [default: 1000].
    #[arg(long)]
    samples: Option<usize>,
    /// Standard deviation of the random perturbations [default: 1].
    #[arg(long)]
    scale: Option<f64>,
    /// Random seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Coupling angles: a point count over [0, 2pi) or a comma-separated list [default: 64].
    #[arg(long, allow_hyphen_values = true, value_parser = GridSpec::parse)]
    alpha_grid: Option<GridSpec>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Target angles: a point count over (0, pi] or a comma-separated list [default: 64].
    #[arg(long, allow_hyphen_values = true, value_parser = GridSpec::parse)]
    phiw_grid: Option<GridSpec>,
}

#[derive(Args, Debug)]
struct HadamardArgs {
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Time horizon T [default: pi].
    #[arg(long)]
    t: Option<f64>,
    /// Control segments [default: 100].
    #[arg(long)]
    segments: Option<usize>,
    /// Number of random starts [default: 20].
    #[arg(long)]
    starts: Option<usize>,
    /// Initial step size of each line search [default: 0.1].
    #[arg(long)]
    step: Option<f64>,
    /// Iteration cap per run [default: 2000].
    #[arg(long)]
    max_iters: Option<usize>,
    /// Gradient-norm stopping tolerance [default: 1e-8].
    #[arg(long)]
    tol: Option<f64>,
    /// Random seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Random seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Override every check tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn reals(s: &str) -> Result<Vec<f64>, String> {
    config::parse_reals(s)
}

impl SystemArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            h0: self.h0,
            v: self.v,
            gate: self.gate,
            phi: self.phi,
            ..RunConfig::default()
        }
    }
}

impl SamplingArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            t: self.t,
            segments: self.segments,
            samples: self.samples,
            scale: self.scale,
            seed: self.seed,
            alpha_grid: self.alpha_grid,
            out: self.out,
            ..RunConfig::default()
        }
    }
}

fn sampling_config(cfg: &RunConfig) -> Result<SamplingConfig, AppError> {
    let defaults = SamplingConfig::new(cfg.horizon(SCAN_HORIZON)?);
    let sampling = SamplingConfig {
        n_segments: cfg.segments.unwrap_or(defaults.n_segments),
        n_samples: cfg.samples.unwrap_or(defaults.n_samples),
        seed: cfg.seed.unwrap_or(defaults.seed),
        amplitude_scale: cfg.scale.unwrap_or(defaults.amplitude_scale),
        ..defaults
    };
    sampling.validate()?;
    Ok(sampling)
}

fn output(cfg: &RunConfig) -> Result<Box<dyn Write>, AppError> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            AppError::Invalid(format!("cannot write {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(cfg: &RunConfig, value: &T) -> Result<(), AppError> {
    let mut out = output(cfg)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| AppError::Invalid(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };

    match cli.command {
        Command::Classify(args) => {
            let flags = RunConfig {
                t: args.t,
                out: args.out,
                ..args.system.into_config()
            };
            let cfg = file.overlay(flags);
            let sys = cfg.system()?;
            let w = cfg.target()?;
            let horizon = cfg.horizon(CLASSIFY_HORIZON)?;
            let verdict = classify(&sys, &w, horizon)?;
            write_json(&cfg, &verdict.record())?;
            eprintln!(
                "T = {horizon}: {}",
                if verdict.trap_free_at_horizon {
                    "trap-free"
                } else {
                    "no trap-free guarantee"
                }
            );
        }
        Command::ScanMap(args) => {
            let flags = RunConfig {
                phiw_grid: args.phiw_grid,
                ..args.sampling.into_config()
            };
            let cfg = file.overlay(flags);
            let sampling = sampling_config(&cfg)?;
            let map = probability_map(&cfg.alpha_grid(), &cfg.phi_w_grid(), &sampling)?;
            let mut out = output(&cfg)?;
            map.write_csv(&mut out)?;
            out.flush()?;
            let (i, j) = map.argmax_p();
            eprintln!(
                "max p = {} at alpha = {}, phi_w = {} (j0 = {})",
                map.max_p(),
                map.alpha_grid[i],
                map.phi_w_grid[j],
                map.j0[i][j]
            );
        }
        Command::ScanHadamard(args) => {
            let cfg = file.overlay(args.sampling.into_config());
            let sampling = sampling_config(&cfg)?;
            let points = hadamard_scan(&cfg.alpha_grid(), &sampling)?;
            let mut out = output(&cfg)?;
            write_scan_csv(&points, &mut out)?;
            out.flush()?;
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.p), hi.max(p.p)));
            eprintln!("p in [{lo}, {hi}] over {} angles", points.len());
        }
        Command::Optimize(args) => {
            let flags = RunConfig {
                t: args.t,
                segments: args.segments,
                starts: args.starts,
                step: args.step,
                max_iters: args.max_iters,
                tol: args.tol,
                seed: args.seed,
                out: args.out,
                ..args.system.into_config()
            };
            let cfg = file.overlay(flags);
            let sys = cfg.system()?;
            let w = cfg.target()?;
            let horizon = cfg.horizon(OPTIMIZE_HORIZON)?;
            let defaults = AscentConfig::default();
            let ascent = AscentConfig {
                step_size: cfg.step.unwrap_or(defaults.step_size),
                max_iters: cfg.max_iters.unwrap_or(defaults.max_iters),
                grad_tolerance: cfg.tol.unwrap_or(defaults.grad_tolerance),
                n_segments: cfg.segments.unwrap_or(defaults.n_segments),
                seed: cfg.seed.unwrap_or(defaults.seed),
            };
            let summary = multistart(&sys, &w, horizon, cfg.starts.unwrap_or(20), &ascent)?;
            write_json(&cfg, &summary)?;
            eprintln!(
                "best J = {}, success fraction = {}, suspected traps = {}",
                summary.best_j,
                summary.success_fraction,
                summary.suspected_traps().len()
            );
        }
        Command::Check(args) => {
            let cfg = file.overlay(RunConfig {
                seed: args.seed,
                tol: args.tol,
                ..RunConfig::default()
            });
            if let Some(tol) = cfg.tol {
                if !(tol > 0.0) {
                    return Err(AppError::Usage(format!("--tol must be positive, got {tol}")));
                }
            }
            let results = run_checks(&CheckConfig {
                seed: cfg.seed.unwrap_or(0),
                tolerance: cfg.tol,
                ..CheckConfig::default()
            })?;
            let mut stdout = io::stdout().lock();
            for r in &results {
                writeln!(
                    stdout,
                    "{} {} worst={:.3e} tol={:.1e}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.worst,
                    r.tolerance
                )?;
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let (AppError::Usage(msg) | AppError::Invalid(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
