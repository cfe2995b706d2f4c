//! Command-line front end: single runs, sweeps, stability certification,
//! and SVG charts.
//!
//! Exit codes: 0 success; 1 certification found violations; 2 usage or
//! config error; 3 numeric integration fault.

mod config;
mod manifest;
mod svg;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use attikit::control::ControlLawId;
use attikit::dynamics::{simulate, SimError};
use attikit::experiments::{
    self, case_seed, make_tumble_config, read_results, read_trajectory, run_sweep,
    stabilization_time, write_results, write_trajectory, ExperimentError,
    STABILIZATION_THRESHOLD_DEG,
};
use attikit::lyapunov::{
    decrease_check, kinematic_identity_check, max_feasible_c, pq_matrices, LyapunovFn,
    StabilityMatrices,
};
use attikit::Gains;

use config::ConfigFile;
use manifest::RunManifest;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config, unreadable or unwritable files. Exit 2.
    Usage(String),
    /// A certification check reported violations. Exit 1.
    CheckFailed(String),
    /// The integrator produced non-finite state. Exit 3.
    Fault(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::CheckFailed(m) | Self::Fault(m) => m,
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Self::CheckFailed(_) => 1,
            Self::Usage(_) => 2,
            Self::Fault(_) => 3,
        }
    }
}

fn from_sim_error(e: SimError) -> CliError {
    match e {
        SimError::IntegrationFault { .. } => CliError::Fault(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn from_experiment_error(e: ExperimentError) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "attikit",
    version,
    about = "Rigid-body attitude control: simulations, sweeps, certification, plots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one tumble-recovery maneuver and write the trajectory CSV
    Simulate(SimulateArgs),
    /// Stabilization-time sweep over theta0 = 1..=359 degrees per law
    Sweep(SweepArgs),
    /// Certify the Lyapunov decrease bound and kinematic identities
    Lyapunov(LyapunovArgs),
    /// Render an SVG chart from sweep or trajectory CSVs
    Plot(PlotArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config file overriding the built-in defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Control law: b, sea1, or sea2
    #[arg(long)]
    law: ControlLawId,
    /// Initial rotation error in whole degrees, 1..=359
    #[arg(long)]
    theta0: u32,
    /// Seed for the random initial rotation axis
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trajectory CSV output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated laws, e.g. b,sea1,sea2
    #[arg(long, value_delimiter = ',', required = true)]
    laws: Vec<ControlLawId>,
    /// Base seed; per-case seeds derive from it and theta0
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// Sweep CSV output path
    #[arg(long)]
    out: PathBuf,
    /// CI mode: dt = 1e-3 s instead of 1e-4 s
    #[arg(long)]
    fast: bool,
}

#[derive(Args)]
struct LyapunovArgs {
    /// Law to certify: sea1 or sea2
    #[arg(long)]
    law: ControlLawId,
    /// Coupling constant: a number, or "auto" for min(feasible edge, 1e-3)
    #[arg(long, default_value = "auto")]
    c: String,
    /// Initial rotation error in whole degrees, 1..=359
    #[arg(long)]
    theta0: u32,
    /// JSON report output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    /// Stabilization time vs initial rotation error, per law
    Sweep,
    /// Rotation error over time, one curve per input trajectory
    Theta,
    /// Proportional-term vector norms over time for one trajectory
    Seanorms,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV file(s); `theta` accepts several, the others exactly one
    #[arg(long = "in", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// SVG output path
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let started = Instant::now();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(args, started),
        Command::Sweep(args) => run_sweep_cmd(args, started),
        Command::Lyapunov(args) => run_lyapunov(args, started),
        Command::Plot(args) => run_plot(args, started),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn worker_threads() -> Result<usize, CliError> {
    match std::env::var("ATTIKIT_THREADS") {
        Err(_) => Ok(0),
        Ok(raw) => raw.parse().map_err(|_| {
            CliError::usage(format!("ATTIKIT_THREADS must be an integer, got '{raw}'"))
        }),
    }
}

fn run_simulate(args: SimulateArgs, started: Instant) -> Result<(), CliError> {
    let mut sim_config =
        make_tumble_config(args.theta0, args.law, args.seed).map_err(from_experiment_error)?;
    let mut inputs = Vec::new();
    if let Some(path) = &args.config {
        ConfigFile::load(path)?.apply(&mut sim_config)?;
        inputs.push(path.display().to_string());
    }
    let traj = simulate(&sim_config).map_err(from_sim_error)?;
    write_trajectory(&traj, &args.out).map_err(from_experiment_error)?;

    match stabilization_time(&traj, STABILIZATION_THRESHOLD_DEG).map_err(from_experiment_error)? {
        Some(t) => println!(
            "law {} theta0 {} deg: stabilization time {t} s ({} samples) -> {}",
            args.law,
            args.theta0,
            traj.samples.len(),
            args.out.display()
        ),
        None => println!(
            "law {} theta0 {} deg: no stabilization within {} s -> {}",
            args.law,
            args.theta0,
            sim_config.t_final,
            args.out.display()
        ),
    }
    RunManifest::new(inputs, vec![args.seed]).write_beside(&args.out, started)?;
    Ok(())
}

fn run_sweep_cmd(args: SweepArgs, started: Instant) -> Result<(), CliError> {
    let threads = worker_threads()?;
    let rows = run_sweep(&args.laws, 1..=359, args.base_seed, threads, args.fast)
        .map_err(from_experiment_error)?;
    if !rows.is_empty() && rows.iter().all(|r| r.final_theta_e_rad.is_nan()) {
        return Err(CliError::Fault("every sweep case faulted".into()));
    }
    let faulted = rows.iter().filter(|r| r.final_theta_e_rad.is_nan()).count();
    write_results(&rows, &args.out).map_err(from_experiment_error)?;
    println!(
        "swept {} cases ({} laws x 359) -> {}{}",
        rows.len(),
        rows.len() / 359,
        args.out.display(),
        if faulted > 0 {
            format!(" ({faulted} cases faulted)")
        } else {
            String::new()
        }
    );
    let seeds = (1u32..=359)
        .map(|theta| case_seed(args.base_seed, theta))
        .collect();
    RunManifest::new(Vec::new(), seeds).write_beside(&args.out, started)?;
    Ok(())
}

fn run_lyapunov(args: LyapunovArgs, started: Instant) -> Result<(), CliError> {
    let which = match args.law {
        ControlLawId::Sea1 => LyapunovFn::V1,
        ControlLawId::Sea2 => LyapunovFn::V2,
        ControlLawId::Benchmark => {
            return Err(CliError::usage("certification covers sea1 and sea2 only"))
        }
    };
    let gains = Gains::new(experiments::DEFAULT_K_THETA, experiments::DEFAULT_K_OMEGA)
        .expect("defaults are positive");

    let c = match args.c.as_str() {
        "auto" => {
            let edge = max_feasible_c(&gains).map_err(|e| CliError::usage(e.to_string()))?;
            edge.min(1e-3)
        }
        raw => {
            let c: f64 = raw.parse().map_err(|_| {
                CliError::usage(format!("--c must be a number or 'auto', got '{raw}'"))
            })?;
            let matrices = pq_matrices(&gains, c);
            if !matrices.both_pd() {
                let (name, m) = if matrices.lambda_min_p <= 0.0 {
                    ("P", &matrices.p)
                } else {
                    ("Q", &matrices.q)
                };
                let (m1, m2) = StabilityMatrices::minors(m);
                return Err(CliError::usage(format!(
                    "c = {c} infeasible: {name} has leading minors {m1}, {m2}"
                )));
            }
            c
        }
    };

    let mut sim_config =
        make_tumble_config(args.theta0, args.law, 0).map_err(from_experiment_error)?;
    sim_config.t_final = 2.0;
    let traj = simulate(&sim_config).map_err(from_sim_error)?;

    let decrease =
        decrease_check(&traj, which, &gains, c).map_err(|e| CliError::usage(e.to_string()))?;
    let kinematics = kinematic_identity_check(&traj);

    let report = serde_json::json!([decrease, kinematics]);
    let body = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::usage(format!("report serialization: {e}")))?;
    std::fs::write(&args.out, body)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", args.out.display())))?;

    println!(
        "{}: c = {c}, worst decrease margin {} (tol {}), {} violations",
        decrease.check, decrease.worst_margin, decrease.params.tol_decrease, decrease.violations
    );
    println!(
        "{}: worst margin {}, {} violations ({} angle samples skipped near folds)",
        kinematics.check,
        kinematics.worst_margin,
        kinematics.violations,
        kinematics.params.theta_samples_skipped
    );
    RunManifest::new(Vec::new(), vec![sim_config.seed]).write_beside(&args.out, started)?;

    let total = decrease.violations + kinematics.violations;
    if total > 0 {
        return Err(CliError::CheckFailed(format!(
            "{total} violations; see {}",
            args.out.display()
        )));
    }
    println!("certified: zero violations -> {}", args.out.display());
    Ok(())
}

fn law_color(law: ControlLawId) -> &'static str {
    match law {
        ControlLawId::Benchmark => svg::PALETTE[0],
        ControlLawId::Sea1 => svg::PALETTE[1],
        ControlLawId::Sea2 => svg::PALETTE[2],
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn expect_one_input(args: &PlotArgs) -> Result<&PathBuf, CliError> {
    match args.inputs.as_slice() {
        [one] => Ok(one),
        _ => Err(CliError::usage(format!(
            "--kind {:?} takes exactly one --in file",
            args.kind
        ))),
    }
}

fn run_plot(args: PlotArgs, started: Instant) -> Result<(), CliError> {
    let (title, x_label, y_label, series) = match args.kind {
        PlotKind::Sweep => {
            let input = expect_one_input(&args)?;
            let rows = read_results(input).map_err(from_experiment_error)?;
            if rows.is_empty() {
                return Err(CliError::usage(format!(
                    "{} has no data rows",
                    input.display()
                )));
            }
            let mut series = Vec::new();
            for law in ControlLawId::ALL {
                let mut law_rows: Vec<_> = rows.iter().filter(|r| r.law == law).collect();
                if law_rows.is_empty() {
                    continue;
                }
                law_rows.sort_by_key(|r| r.theta0_deg);
                let mut segments = Vec::new();
                let mut current = Vec::new();
                for row in law_rows {
                    match row.stab_time_s {
                        Some(t) => current.push((row.theta0_deg as f64, t)),
                        None => {
                            if !current.is_empty() {
                                segments.push(std::mem::take(&mut current));
                            }
                        }
                    }
                }
                if !current.is_empty() {
                    segments.push(current);
                }
                series.push(svg::Series {
                    label: law.to_string(),
                    color: law_color(law).to_string(),
                    segments,
                });
            }
            (
                "Stabilization time vs initial rotation error".to_string(),
                "theta0 (deg)",
                "stabilization time (s)",
                series,
            )
        }
        PlotKind::Theta => {
            let mut series = Vec::new();
            for (i, input) in args.inputs.iter().enumerate() {
                let points = read_trajectory(input).map_err(from_experiment_error)?;
                if points.is_empty() {
                    return Err(CliError::usage(format!(
                        "{} has no data rows",
                        input.display()
                    )));
                }
                series.push(svg::Series::contiguous(
                    file_stem(input),
                    svg::PALETTE[i % svg::PALETTE.len()],
                    points
                        .iter()
                        .map(|p| (p.t, p.theta_e.to_degrees()))
                        .collect(),
                ));
            }
            (
                "Rotation error over time".to_string(),
                "t (s)",
                "theta_e (deg)",
                series,
            )
        }
        PlotKind::Seanorms => {
            let input = expect_one_input(&args)?;
            let points = read_trajectory(input).map_err(from_experiment_error)?;
            if points.is_empty() {
                return Err(CliError::usage(format!(
                    "{} has no data rows",
                    input.display()
                )));
            }
            let pick = |label: &str, color: &str, f: fn(&experiments::TrajPoint) -> f64| {
                svg::Series::contiguous(label, color, points.iter().map(|p| (p.t, f(p))).collect())
            };
            (
                format!("Proportional-term norms ({})", file_stem(input)),
                "t (s)",
                "vector norm",
                vec![
                    pick("|n_e|", svg::PALETTE[0], |p| p.n_norm),
                    pick("|p_e,1|", svg::PALETTE[1], |p| p.p1_norm),
                    pick("|p_e,2|", svg::PALETTE[2], |p| p.p2_norm),
                ],
            )
        }
    };

    let body = svg::render(&title, x_label, y_label, &series)
        .ok_or_else(|| CliError::usage("nothing to plot"))?;
    std::fs::write(&args.out, body)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", args.out.display())))?;
    println!("plotted {:?} -> {}", args.kind, args.out.display());

    let inputs = args
        .inputs
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    RunManifest::new(inputs, Vec::new()).write_beside(&args.out, started)?;
    Ok(())
}
