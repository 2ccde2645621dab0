//! `otto` — command-line front end for the coupled-spin Otto refrigerator
//! simulator: single-cycle trajectories, period sweeps with transition
//! refinement, quantized landmarks, and a self-validation suite.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use otto_core::checks::{all_passed, run_validation, CheckStatus, ValidationOptions};
use otto_core::cycle::{assemble_global, solve_limit_cycle, AssembleOptions, SolveOptions};
use otto_core::observables::cycle_report;
use otto_core::sweep::{
    annotate_landmarks, find_transitions, landmark_times, run_sweep, Landmark, SweepSpec,
};

use config::{CliError, Mode, OutputFormat, RunConfig, SpacingArg};

#[derive(Parser, Debug)]
#[command(
    name = "otto",
    version,
    about = "Coupled-spin quantum Otto refrigerator: exact-propagator cycle simulator"
)]
pub struct Cli {
    /// What to run (defaults to a single cycle).
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,

    /// Bundled parameter family to start from.
    #[arg(long)]
    pub preset: Option<String>,

    /// JSON configuration file; unknown keys are rejected.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Cycle period (overrides preset and config).
    #[arg(long)]
    pub tau: Option<f64>,

    /// Shortest period of the sweep grid.
    #[arg(long)]
    pub tau_min: Option<f64>,

    /// Longest period of the sweep grid.
    #[arg(long)]
    pub tau_max: Option<f64>,

    /// Number of sweep grid points.
    #[arg(long)]
    pub tau_count: Option<usize>,

    /// Grid spacing rule.
    #[arg(long, value_enum)]
    pub tau_spacing: Option<SpacingArg>,

    /// Export format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Trajectory samples per stroke.
    #[arg(long)]
    pub samples_per_segment: Option<usize>,

    /// Zero both coherence quadratures at every stroke switch.
    #[arg(long)]
    pub dephase: bool,

    /// Shorthand for `--mode validate`.
    #[arg(long)]
    pub validate: bool,

    /// Flip the pump sign in the bath generators. The thermal fixed-point
    /// check must then fail; this exists to prove the validation suite
    /// has teeth.
    #[arg(long, hide = true)]
    pub corrupt_eeq_sign: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config::resolve(cli)?;
    match cfg.mode {
        Mode::Cycle => run_cycle(&cfg),
        Mode::Sweep => run_sweep_mode(&cfg),
        Mode::Landmarks => run_landmarks(&cfg),
        Mode::Validate => run_validate(&cfg),
    }
}

/// Solver failures surface as exit 1: the configuration was well-formed,
/// the run itself did not hold up.
fn solver_err(e: otto_core::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn run_cycle(cfg: &RunConfig) -> Result<(), CliError> {
    let global = assemble_global(&cfg.params, &AssembleOptions { dephase: cfg.dephase })
        .map_err(solver_err)?;
    let lc = solve_limit_cycle(
        &global,
        &SolveOptions { samples_per_segment: cfg.samples_per_segment, ..Default::default() },
    )
    .map_err(solver_err)?;
    let report = cycle_report(&lc, &cfg.params).map_err(solver_err)?;
    let rendered = match cfg.format {
        OutputFormat::Csv => output::cycle_csv(&lc, &report),
        OutputFormat::Json => output::cycle_json(&cfg.params, &lc, &report)?,
    };
    output::write_output(cfg.out.as_deref(), &rendered)
}

fn sweep_spec(cfg: &RunConfig) -> SweepSpec {
    SweepSpec {
        base: cfg.params,
        tau_min: cfg.tau_min,
        tau_max: cfg.tau_max,
        tau_count: cfg.tau_count,
        spacing: cfg.spacing,
        dephase: cfg.dephase,
        samples_per_segment: cfg.samples_per_segment,
    }
}

/// Landmarks are computed where the quantization condition allows; a
/// family with degenerate field endpoints simply has none.
fn landmarks_or_empty(cfg: &RunConfig) -> Vec<Landmark> {
    match landmark_times(&cfg.params, &cfg.winding) {
        Ok(lms) => lms,
        Err(e) => {
            eprintln!("warning: landmarks unavailable: {e}");
            Vec::new()
        }
    }
}

fn run_sweep_mode(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = sweep_spec(cfg);
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let records = run_sweep(&spec).map_err(solver_err)?;
    let transitions = find_transitions(&spec, &records).map_err(solver_err)?;
    let mut landmarks = landmarks_or_empty(cfg);
    annotate_landmarks(&mut landmarks, &transitions);
    let rendered = match cfg.format {
        OutputFormat::Csv => output::sweep_csv(&records, &transitions, &landmarks),
        OutputFormat::Json => {
            output::sweep_json(&cfg.params, &records, &transitions, &landmarks)?
        }
    };
    output::write_output(cfg.out.as_deref(), &rendered)
}

fn run_landmarks(cfg: &RunConfig) -> Result<(), CliError> {
    let mut landmarks = landmark_times(&cfg.params, &cfg.winding).map_err(solver_err)?;

    // Annotate window membership from a coarse scouting sweep wide enough
    // to contain every landmark.
    let max_tau = landmarks.iter().map(|lm| lm.tau_cycle).fold(cfg.tau_max, f64::max);
    let spec =
        SweepSpec { tau_max: 1.05 * max_tau, samples_per_segment: 16, ..sweep_spec(cfg) };
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let records = run_sweep(&spec).map_err(solver_err)?;
    let transitions = find_transitions(&spec, &records).map_err(solver_err)?;
    annotate_landmarks(&mut landmarks, &transitions);

    let rendered = match cfg.format {
        OutputFormat::Csv => output::landmarks_csv(&landmarks),
        OutputFormat::Json => output::landmarks_json(&cfg.params, &landmarks)?,
    };
    output::write_output(cfg.out.as_deref(), &rendered)
}

fn run_validate(cfg: &RunConfig) -> Result<(), CliError> {
    let opts =
        ValidationOptions { corrupt_pump_sign: cfg.corrupt_pump_sign, ..Default::default() };
    let outcomes = run_validation(&cfg.params, &opts);
    let rendered = match cfg.format {
        OutputFormat::Csv => output::validation_text(&outcomes),
        OutputFormat::Json => output::validation_json(&cfg.params, &outcomes)?,
    };
    output::write_output(cfg.out.as_deref(), &rendered)?;
    if all_passed(&outcomes) {
        Ok(())
    } else {
        let failed: Vec<&str> =
            outcomes.iter().filter(|o| o.status == CheckStatus::Fail).map(|o| o.name).collect();
        Err(CliError::Validation(format!("checks failed: {}", failed.join(", "))))
    }
}
