//! Run configuration: precedence is bundled defaults, then preset, then
//! config file, then command-line flags. The file schema is strict; a
//! misspelled key is an error, never a silently ignored physics parameter.

use std::fmt;
use std::path::PathBuf;

use otto_core::sweep::TauSpacing;
use otto_core::{CycleParams, TimeFractions};
use serde::Deserialize;

/// What a run failed on, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// A self-check or solver failed (exit 1).
    Validation(String),
    /// The configuration is malformed or inconsistent (exit 2).
    Config(String),
    /// Reading or writing a file failed (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Solve one limit cycle and export its trajectory.
    Cycle,
    /// Sweep the period and export per-cycle records with transitions.
    Sweep,
    /// Quantized sweep-duration landmarks and their operating modes.
    Landmarks,
    /// Run the internal cross-validation suite.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SpacingArg {
    Linear,
    Log,
}

impl From<SpacingArg> for TauSpacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Linear => TauSpacing::Linear,
            SpacingArg::Log => TauSpacing::Log,
        }
    }
}

/// Strict config-file schema. Every field is optional; present fields
/// override the preset, and flags override the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub mode: Option<String>,
    pub params: Option<ParamsPatch>,
    pub tau: Option<f64>,
    pub sweep: Option<SweepPatch>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub samples_per_segment: Option<usize>,
    pub dephase: Option<bool>,
    /// Winding numbers for landmark mode.
    pub winding: Option<Vec<f64>>,
}

/// Field-wise overrides for the physical parameters.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsPatch {
    pub j_coupling: Option<f64>,
    pub omega_cold: Option<f64>,
    pub omega_hot: Option<f64>,
    pub t_cold: Option<f64>,
    pub t_hot: Option<f64>,
    pub k_down_cold: Option<f64>,
    pub k_down_hot: Option<f64>,
    pub tau_cycle: Option<f64>,
    pub fractions: Option<TimeFractions>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPatch {
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_count: Option<usize>,
    pub tau_spacing: Option<String>,
}

/// Everything a run needs, fully resolved and validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: CycleParams,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_count: usize,
    pub spacing: TauSpacing,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub samples_per_segment: usize,
    pub dephase: bool,
    pub winding: Vec<f64>,
    pub corrupt_pump_sign: bool,
}

pub const PRESET_NAME: &str = "paper-family";
pub const DEFAULT_WINDING: [f64; 3] = [0.5, 1.0, 1.5];

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s {
        "cycle" => Ok(Mode::Cycle),
        "sweep" => Ok(Mode::Sweep),
        "landmarks" => Ok(Mode::Landmarks),
        "validate" => Ok(Mode::Validate),
        other => Err(CliError::Config(format!(
            "unknown mode '{other}' (expected cycle, sweep, landmarks or validate)"
        ))),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, CliError> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => {
            Err(CliError::Config(format!("unknown format '{other}' (expected csv or json)")))
        }
    }
}

fn parse_spacing(s: &str) -> Result<TauSpacing, CliError> {
    match s {
        "linear" => Ok(TauSpacing::Linear),
        "log" => Ok(TauSpacing::Log),
        other => Err(CliError::Config(format!(
            "unknown tau_spacing '{other}' (expected linear or log)"
        ))),
    }
}

fn params_for_preset(name: &str) -> Result<CycleParams, CliError> {
    match name {
        PRESET_NAME => Ok(CycleParams::paper_family()),
        other => Err(CliError::Config(format!(
            "unknown preset '{other}' (available: {PRESET_NAME})"
        ))),
    }
}

/// Merge preset, config file, and flags into one validated `RunConfig`.
pub fn resolve(cli: &crate::Cli) -> Result<RunConfig, CliError> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    // Base parameters: explicit preset (flag wins over file), falling back
    // to the bundled family so a bare invocation is runnable.
    let preset_name = cli.preset.as_deref().or(file.preset.as_deref()).unwrap_or(PRESET_NAME);
    let mut params = params_for_preset(preset_name)?;

    if let Some(patch) = &file.params {
        apply_params_patch(&mut params, patch);
    }
    if let Some(tau) = file.tau {
        params.tau_cycle = tau;
    }
    if let Some(tau) = cli.tau {
        params.tau_cycle = tau;
    }
    params.validate().map_err(|e| CliError::Config(e.to_string()))?;
    if !params.refrigerator_condition_met() {
        eprintln!(
            "warning: Omega_c/T_c >= Omega_h/T_h; no period of this family can refrigerate"
        );
    }

    let mode = if cli.validate {
        Mode::Validate
    } else if let Some(mode) = cli.mode {
        mode
    } else if let Some(s) = &file.mode {
        parse_mode(s)?
    } else {
        Mode::Cycle
    };

    let format = if let Some(f) = cli.format {
        f
    } else if let Some(s) = &file.format {
        parse_format(s)?
    } else {
        OutputFormat::Csv
    };

    let sweep_file = file.sweep.unwrap_or_default();
    let tau_min = cli.tau_min.or(sweep_file.tau_min).unwrap_or(1e-3);
    let tau_max = cli.tau_max.or(sweep_file.tau_max).unwrap_or(1.2);
    let tau_count = cli.tau_count.or(sweep_file.tau_count).unwrap_or(200);
    let spacing = if let Some(s) = cli.tau_spacing {
        s.into()
    } else if let Some(s) = &sweep_file.tau_spacing {
        parse_spacing(s)?
    } else {
        TauSpacing::Log
    };

    let samples_per_segment =
        cli.samples_per_segment.or(file.samples_per_segment).unwrap_or(200);
    if samples_per_segment < 3 {
        return Err(CliError::Config(format!(
            "samples_per_segment must be at least 3, got {samples_per_segment}"
        )));
    }

    let winding = file.winding.unwrap_or_else(|| DEFAULT_WINDING.to_vec());
    if winding.is_empty() || winding.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(CliError::Config(
            "winding numbers must be a non-empty list of positive values".into(),
        ));
    }

    Ok(RunConfig {
        mode,
        params,
        tau_min,
        tau_max,
        tau_count,
        spacing,
        format,
        out: cli.out.clone().or(file.out),
        samples_per_segment,
        dephase: cli.dephase || file.dephase.unwrap_or(false),
        winding,
        corrupt_pump_sign: cli.corrupt_eeq_sign,
    })
}

fn apply_params_patch(params: &mut CycleParams, patch: &ParamsPatch) {
    if let Some(v) = patch.j_coupling {
        params.j_coupling = v;
    }
    if let Some(v) = patch.omega_cold {
        params.omega_cold = v;
    }
    if let Some(v) = patch.omega_hot {
        params.omega_hot = v;
    }
    if let Some(v) = patch.t_cold {
        params.t_cold = v;
    }
    if let Some(v) = patch.t_hot {
        params.t_hot = v;
    }
    if let Some(v) = patch.k_down_cold {
        params.k_down_cold = v;
    }
    if let Some(v) = patch.k_down_hot {
        params.k_down_hot = v;
    }
    if let Some(v) = patch.tau_cycle {
        params.tau_cycle = v;
    }
    if let Some(v) = patch.fractions {
        params.fractions = v;
    }
}
