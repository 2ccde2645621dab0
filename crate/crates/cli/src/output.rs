//! Deterministic export: CSV tables with full-precision floats and JSON
//! documents with a conventions header. Identical configurations must
//! produce byte-identical files, so nothing here reads the clock.

use std::borrow::Cow;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use otto_core::checks::CheckOutcome;
use otto_core::observables::{dynamical_temperature_profile, CycleReport, IsochoreSide};
use otto_core::sweep::{Landmark, SweepRecord, TransitionReport};
use otto_core::{CycleParams, LimitCycle};
use serde::Serialize;

use crate::config::CliError;

/// 17 significant digits: enough to reproduce any f64 exactly, so
/// regression diffs are bit-level.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_full(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

fn opt_bool(b: Option<bool>) -> String {
    b.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_escape(s: &str) -> Cow<'_, str> {
    if s.contains([',', '"', '\n']) {
        Cow::Owned(format!("\"{}\"", s.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(s)
    }
}

/// Sign conventions and the producing code version, written into every
/// JSON document so downstream consumers never have to guess.
#[derive(Serialize)]
pub struct Metadata {
    pub code_version: &'static str,
    pub conventions: Conventions,
}

#[derive(Serialize)]
pub struct Conventions {
    pub heat: &'static str,
    pub work: &'static str,
    pub bath_energy: &'static str,
}

pub fn metadata() -> Metadata {
    Metadata {
        code_version: env!("CARGO_PKG_VERSION"),
        conventions: Conventions {
            heat: "q_cold and q_hot are positive when heat flows into the working medium",
            work: "work_input is positive when work is invested into the medium over one cycle",
            bath_energy:
                "the bath-contact stationary energy is -Omega tanh(Omega / (2 T)): negative \
                 at every positive temperature",
        },
    }
}

/// One exported trajectory sample; the dynamical temperature is only
/// defined on interior bath-contact samples and is null elsewhere.
#[derive(Serialize)]
pub struct TrajectoryRow {
    pub time: f64,
    pub segment: &'static str,
    pub omega: f64,
    pub omega_big: f64,
    pub e: f64,
    pub l: f64,
    pub c: f64,
    pub d: f64,
    pub s_vn: f64,
    pub s_e: f64,
    pub coherence: f64,
    pub t_dyn: Option<f64>,
    pub singular: Option<bool>,
}

/// Merge the sampled trajectory with the dynamical-temperature profiles of
/// both bath contacts (matched by exact sample time).
pub fn trajectory_rows(lc: &LimitCycle) -> Vec<TrajectoryRow> {
    let mut temperature: HashMap<u64, (Option<f64>, bool)> = HashMap::new();
    for side in [IsochoreSide::Cold, IsochoreSide::Hot] {
        if let Ok(profile) = dynamical_temperature_profile(lc, side) {
            for p in profile.points {
                temperature.insert(p.time.to_bits(), (p.t_dyn, p.singular));
            }
        }
    }
    lc.trajectory
        .iter()
        .map(|p| {
            let (t_dyn, singular) = match temperature.get(&p.time.to_bits()) {
                Some(&(t, s)) => (t, Some(s)),
                None => (None, None),
            };
            TrajectoryRow {
                time: p.time,
                segment: p.label.name(),
                omega: p.omega,
                omega_big: p.omega_big,
                e: p.state.e,
                l: p.state.l,
                c: p.state.c,
                d: p.state.d,
                s_vn: p.s_vn,
                s_e: p.s_e,
                coherence: p.coherence,
                t_dyn,
                singular,
            }
        })
        .collect()
}

const TRAJECTORY_HEADER: &str =
    "time,segment,omega,Omega,E,L,C,D,S_VN,S_E,coherence,T_dyn,singular";

fn push_report_comment(out: &mut String, report: &CycleReport) {
    out.push_str(&format!(
        "# report tau={} classification={} q_cold={} q_hot={} work_input={} \
         cooling_power={} entropy_production={} first_law_residual={} lambda2={} \
         geometry={} dephased={}\n",
        full(report.tau_cycle),
        report.classification.name(),
        full(report.q_cold),
        full(report.q_hot),
        full(report.work_input),
        full(report.cooling_power),
        full(report.entropy_production),
        full(report.first_law_residual),
        full(report.lambda2_modulus),
        report.geometry.name(),
        report.dephased,
    ));
}

pub fn cycle_csv(lc: &LimitCycle, report: &CycleReport) -> String {
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in trajectory_rows(lc) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            full(r.time),
            r.segment,
            full(r.omega),
            full(r.omega_big),
            full(r.e),
            full(r.l),
            full(r.c),
            full(r.d),
            full(r.s_vn),
            full(r.s_e),
            full(r.coherence),
            opt_full(r.t_dyn),
            opt_bool(r.singular),
        ));
    }
    push_report_comment(&mut out, report);
    out
}

#[derive(Serialize)]
struct CycleDoc<'a> {
    metadata: Metadata,
    params: &'a CycleParams,
    report: &'a CycleReport,
    trajectory: Vec<TrajectoryRow>,
}

pub fn cycle_json(
    params: &CycleParams,
    lc: &LimitCycle,
    report: &CycleReport,
) -> Result<String, CliError> {
    to_pretty(&CycleDoc {
        metadata: metadata(),
        params,
        report,
        trajectory: trajectory_rows(lc),
    })
}

const SWEEP_HEADER: &str = "tau,classification,cooling_power,q_cold,q_hot,work_input,\
entropy_production,first_law_residual,lambda2_modulus,convergence_rate,closure_defect,\
route_delta,energy_coherence_ratio,geometry,coherence_mean,coherence_std,coherence_min,\
coherence_max,error";

pub fn sweep_csv(
    records: &[SweepRecord],
    transitions: &TransitionReport,
    landmarks: &[Landmark],
) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in records {
        match (&r.report, &r.error) {
            (Some(rep), _) => out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},\n",
                full(r.tau),
                rep.classification.name(),
                full(rep.cooling_power),
                full(rep.q_cold),
                full(rep.q_hot),
                full(rep.work_input),
                full(rep.entropy_production),
                full(rep.first_law_residual),
                full(rep.lambda2_modulus),
                full(rep.convergence_rate),
                full(rep.closure_defect),
                full(rep.route_delta),
                full(rep.energy_coherence_ratio_at_anchor),
                rep.geometry.name(),
                full(rep.coherence.mean),
                full(rep.coherence.std_dev),
                full(rep.coherence.min),
                full(rep.coherence.max),
            )),
            (None, err) => out.push_str(&format!(
                "{},,,,,,,,,,,,,,,,,,{}\n",
                full(r.tau),
                csv_escape(err.as_deref().unwrap_or("unknown failure")),
            )),
        }
    }
    push_transition_comment(&mut out, transitions, landmarks);
    out
}

fn push_transition_comment(
    out: &mut String,
    transitions: &TransitionReport,
    landmarks: &[Landmark],
) {
    for t in &transitions.transitions {
        out.push_str(&format!(
            "# transition tau_star={} class_below={} class_above={} bracket_low={} bracket_high={}\n",
            full(t.tau_star),
            t.class_below.name(),
            t.class_above.name(),
            full(t.tau_below),
            full(t.tau_above),
        ));
    }
    for (lo, hi) in &transitions.short_circuit_windows {
        out.push_str(&format!("# short_circuit_window low={} high={}\n", full(*lo), full(*hi)));
    }
    if let Some(tau) = transitions.entropy_peak_tau {
        out.push_str(&format!(
            "# entropy_peak tau={} in_short_circuit_window={}\n",
            full(tau),
            opt_bool(transitions.entropy_peak_in_window),
        ));
    }
    out.push_str(&format!("# lambda2_nonincreasing {}\n", transitions.lambda2_nonincreasing));
    for lm in landmarks {
        out.push_str(&format!(
            "# landmark l={} tau_adiabat={} tau_cycle={} classification={} in_short_circuit_window={}\n",
            full(lm.l),
            full(lm.tau_adiabat),
            full(lm.tau_cycle),
            lm.classification.map(|c| c.name()).unwrap_or(""),
            opt_bool(lm.in_short_circuit_window),
        ));
    }
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    metadata: Metadata,
    params: &'a CycleParams,
    records: &'a [SweepRecord],
    transitions: &'a TransitionReport,
    landmarks: &'a [Landmark],
}

pub fn sweep_json(
    params: &CycleParams,
    records: &[SweepRecord],
    transitions: &TransitionReport,
    landmarks: &[Landmark],
) -> Result<String, CliError> {
    to_pretty(&SweepDoc { metadata: metadata(), params, records, transitions, landmarks })
}

const LANDMARK_HEADER: &str = "l,tau_adiabat,tau_cycle,classification,in_short_circuit_window";

pub fn landmarks_csv(landmarks: &[Landmark]) -> String {
    let mut out = String::new();
    out.push_str(LANDMARK_HEADER);
    out.push('\n');
    for lm in landmarks {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            full(lm.l),
            full(lm.tau_adiabat),
            full(lm.tau_cycle),
            lm.classification.map(|c| c.name()).unwrap_or(""),
            opt_bool(lm.in_short_circuit_window),
        ));
    }
    out
}

#[derive(Serialize)]
struct LandmarkDoc<'a> {
    metadata: Metadata,
    params: &'a CycleParams,
    landmarks: &'a [Landmark],
}

pub fn landmarks_json(
    params: &CycleParams,
    landmarks: &[Landmark],
) -> Result<String, CliError> {
    to_pretty(&LandmarkDoc { metadata: metadata(), params, landmarks })
}

pub fn validation_text(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        out.push_str(&format!("{:<4} {}: {}\n", o.status.name(), o.name, o.detail));
    }
    out
}

#[derive(Serialize)]
struct ValidationDoc<'a> {
    metadata: Metadata,
    params: &'a CycleParams,
    outcomes: &'a [CheckOutcome],
}

pub fn validation_json(
    params: &CycleParams,
    outcomes: &[CheckOutcome],
) -> Result<String, CliError> {
    to_pretty(&ValidationDoc { metadata: metadata(), params, outcomes })
}

fn to_pretty<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Write to the given path, or to stdout when none is set.
pub fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
