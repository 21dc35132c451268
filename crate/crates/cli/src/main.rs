//! `sweep`: critical velocities, plans, simulations and comparison studies
//! for multi-agent sweeps of a disk-shaped evader region.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sweep_core::sim::{self, Outcome, RunOptions};
use sweep_core::study::{self, Family};
use sweep_core::{RadiusMode, ScenarioParams, Strategy, SweepError};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_ESCAPE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sweep",
    version,
    about = "Plan and verify guaranteed-detection sweeps of a disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one critical velocity, or a table over swarm sizes.
    CriticalVelocity(CriticalArgs),
    /// Emit the phase list of a trajectory plan as CSV.
    Plan(RunArgs),
    /// Run a plan on the grid simulator.
    Simulate(SimulateArgs),
    /// Same-direction vs pincer total times over a grid of sizes and margins.
    Compare(StudyArgs),
    /// SVG line plot of the comparison ratios or the critical velocities.
    Plot(PlotArgs),
}

#[derive(Args, Debug, Clone)]
struct ScenarioArgs {
    /// Swarm size (even).
    #[arg(long = "n", env = "SWEEP_N", default_value_t = 2)]
    n: u32,
    /// Sensor half-length.
    #[arg(long = "r", env = "SWEEP_R", default_value_t = 10.0)]
    r: f64,
    /// Initial region radius.
    #[arg(long = "R0", env = "SWEEP_R0", default_value_t = 100.0)]
    r0: f64,
    /// Evader speed.
    #[arg(long = "vt", env = "SWEEP_VT", default_value_t = 1.0)]
    vt: f64,
}

impl ScenarioArgs {
    fn params(&self) -> ScenarioParams {
        ScenarioParams::new(self.r0, self.r, self.vt, self.n, 0.0)
    }
}

#[derive(Args, Debug)]
struct CriticalArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// circular-pincer, spiral-pincer, circular-same or spiral-same.
    #[arg(long, env = "SWEEP_STRATEGY")]
    strategy: Option<Strategy>,
    /// Tabulate every even size from 2 to this value.
    #[arg(long = "n-max", env = "SWEEP_N_MAX")]
    n_max: Option<u32>,
    #[arg(long, env = "SWEEP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, env = "SWEEP_STRATEGY")]
    strategy: Strategy,
    /// Speed above the strategy's own critical velocity; may be negative.
    #[arg(
        long,
        env = "SWEEP_DV",
        default_value_t = 10.0,
        allow_negative_numbers = true
    )]
    dv: f64,
    /// verbatim, band or tracked (spiral-same only).
    #[arg(long = "radius-mode", env = "SWEEP_RADIUS_MODE", default_value_t = RadiusMode::Verbatim)]
    radius_mode: RadiusMode,
    #[arg(long, env = "SWEEP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Grid cell size; defaults to R0/300.
    #[arg(long, env = "SWEEP_CELL")]
    cell: Option<f64>,
    /// Time step; defaults to the largest stable step for the plan.
    #[arg(long, env = "SWEEP_DT")]
    dt: Option<f64>,
    /// Write a per-step CSV trace to this file.
    #[arg(long, env = "SWEEP_TRACE")]
    trace: Option<PathBuf>,
    /// Steps between trace rows.
    #[arg(long = "trace-every", env = "SWEEP_TRACE_EVERY", default_value_t = 1)]
    trace_every: usize,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// circular or spiral.
    #[arg(long, env = "SWEEP_FAMILY", default_value = "circular")]
    family: Family,
    #[arg(long = "n-max", env = "SWEEP_N_MAX", default_value_t = 32)]
    n_max: u32,
    /// Comma-separated speed margins above the two-agent baseline.
    #[arg(long, env = "SWEEP_DV", value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0, 35.0], allow_negative_numbers = true)]
    dv: Vec<f64>,
    #[arg(long = "radius-mode", env = "SWEEP_RADIUS_MODE", default_value_t = RadiusMode::Verbatim)]
    radius_mode: RadiusMode,
    #[arg(long, env = "SWEEP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    study: StudyArgs,
    /// Plot critical velocities instead of comparison ratios.
    #[arg(long = "critical-velocity")]
    critical_velocity: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Sweep(SweepError),
    Io(io::Error),
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        CliError::Sweep(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Sweep(
                SweepError::SubcriticalVelocity { .. }
                | SweepError::SlowSweeper { .. }
                | SweepError::EndgameInfeasible { .. }
                | SweepError::LinearScanInfeasible { .. }
                | SweepError::NoConvergence { .. },
            ) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Sweep(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
        }
    }
}

fn output(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sizes(max: u32) -> Result<Vec<u32>, CliError> {
    let sizes = study::even_sizes(max);
    if sizes.is_empty() {
        return Err(CliError::Usage(format!(
            "--n-max must be at least 2, got {max}"
        )));
    }
    Ok(sizes)
}

fn critical_velocity(args: CriticalArgs) -> Result<u8, CliError> {
    let params = sweep_core::validate_scenario(args.scenario.params())?;
    let mut out = output(args.out.as_ref())?;
    if let Some(strategy) = args.strategy {
        let v_c = study::critical_velocity(strategy, &params)?;
        writeln!(out, "{}", study::format_number(v_c))?;
    } else {
        let sizes = match args.n_max {
            Some(max) => sizes(max)?,
            None => vec![params.swarm_size],
        };
        let rows = study::study_critical_velocities(&params, &sizes);
        for row in rows.iter().filter(|r| !r.ordered()) {
            eprintln!(
                "warning: n={} breaks the expected ordering of critical velocities",
                row.swarm_size
            );
        }
        study::write_critical_velocity_csv(&rows, &mut out)?;
    }
    out.flush()?;
    Ok(0)
}

fn sweeper_speed(args: &RunArgs) -> Result<(ScenarioParams, f64), CliError> {
    let params = sweep_core::validate_scenario(args.scenario.params())?;
    let v_c = study::critical_velocity(args.strategy, &params)?;
    Ok((params, v_c + args.dv))
}

fn plan(args: RunArgs) -> Result<u8, CliError> {
    let (params, v_s) = sweeper_speed(&args)?;
    let plan = study::trajectory_plan(args.strategy, &params, v_s, args.radius_mode)?;
    let mut out = output(args.out.as_ref())?;
    study::write_plan_csv(&plan, &mut out)?;
    out.flush()?;
    eprintln!(
        "{} at V_s = {}: total time {}",
        args.strategy,
        study::format_number(v_s),
        study::format_number(plan.total_duration())
    );
    Ok(0)
}

fn simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let run = &args.run;
    let (params, v_s) = sweeper_speed(run)?;
    let analytic = study::total_time(run.strategy, &params, v_s, run.radius_mode)?;
    let plan = study::trajectory_plan(run.strategy, &params, v_s, run.radius_mode)?;
    let cell = args.cell.unwrap_or(params.region_radius / 300.0);
    let dt = args
        .dt
        .unwrap_or_else(|| sim::stable_time_step(&plan, params.evader_speed, cell));
    let mut world = sim::init_world(&params, cell, dt)?;
    sim::check_plan_resolution(&world, &plan)?;

    let mut trace_file = match &args.trace {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };
    let options = RunOptions {
        wall_budget: None,
        trace: trace_file.as_mut().map(|w| w as &mut dyn Write),
        trace_every: args.trace_every,
    };
    let outcome = sim::run_with(&plan, &mut world, options)?;
    if let Some(mut w) = trace_file {
        w.flush()?;
    }

    let (label, code) = match outcome {
        Outcome::Cleaned(_) => ("cleaned", 0),
        Outcome::Escape(_) => ("escape", EXIT_ESCAPE),
        Outcome::Timeout(_) => ("timeout", EXIT_ESCAPE),
    };
    let mut out = output(run.out.as_ref())?;
    writeln!(out, "strategy,n,V_s,outcome,time,analytic_time")?;
    writeln!(
        out,
        "{},{},{},{label},{},{}",
        run.strategy,
        params.swarm_size,
        study::format_number(v_s),
        study::format_number(outcome.time()),
        study::format_number(analytic)
    )?;
    out.flush()?;
    Ok(code)
}

fn comparison(args: &StudyArgs) -> Result<Vec<study::ComparisonRecord>, CliError> {
    if args.dv.is_empty() {
        return Err(CliError::Usage("--dv needs at least one value".into()));
    }
    let template = sweep_core::validate_scenario(args.scenario.params().with_swarm_size(2))?;
    let records = study::study_family(
        args.family,
        &template,
        &sizes(args.n_max)?,
        &args.dv,
        args.radius_mode,
    )?;
    if let Some(first) = records.first() {
        eprintln!(
            "baseline speed {} (two-agent {} critical velocity), radius mode {}",
            study::format_number(first.baseline),
            first.strategy_a,
            args.radius_mode
        );
    }
    Ok(records)
}

fn compare(args: StudyArgs) -> Result<u8, CliError> {
    let records = comparison(&args)?;
    let mut out = output(args.out.as_ref())?;
    study::write_comparison_csv(&records, &mut out)?;
    out.flush()?;
    Ok(0)
}

fn plot(args: PlotArgs) -> Result<u8, CliError> {
    let study_args = &args.study;
    let svg = if args.critical_velocity {
        let template =
            sweep_core::validate_scenario(study_args.scenario.params().with_swarm_size(2))?;
        let rows = study::study_critical_velocities(&template, &sizes(study_args.n_max)?);
        study::render_svg(
            "Critical velocity",
            "swarm size n",
            "speed",
            &study::critical_velocity_series(&rows),
        )
    } else {
        let records = comparison(study_args)?;
        let (a, b) = study_args.family.pair();
        study::render_svg(
            &format!("Total time ratio {a} / {b}"),
            "swarm size n",
            "ratio",
            &study::comparison_series(&records),
        )
    };
    let mut out = output(study_args.out.as_ref())?;
    out.write_all(svg.as_bytes())?;
    out.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::CriticalVelocity(a) => critical_velocity(a),
        Command::Plan(a) => plan(a),
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
