//! Cycle-time sweeps: how one parameter family behaves as the period runs
//! from sudden to slow.
//!
//! A sweep solves an independent limit cycle per grid point (in parallel,
//! with stable ordering), records the per-cycle report, and then hunts the
//! operating-mode transitions: periods where the cooling power changes
//! sign. Those brackets are refined by bisection on freshly solved cycles,
//! independent of the grid resolution.

use rayon::prelude::*;
use serde::Serialize;

use crate::cycle::{
    anchor_eigen, assemble_global, solve_limit_cycle, AssembleOptions, SolveOptions,
};
use crate::error::{Error, Result};
use crate::observables::{cycle_report, CycleClass, CycleReport};
use crate::params::CycleParams;
use crate::segment::quantization_time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauSpacing {
    Linear,
    Log,
}

/// Grid specification for a period sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub base: CycleParams,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_count: usize,
    pub spacing: TauSpacing,
    pub dephase: bool,
    pub samples_per_segment: usize,
}

impl SweepSpec {
    /// Default grid: 200 log-spaced periods from deep in the sudden limit
    /// to just past the slowest interesting landmark.
    pub fn for_params(base: CycleParams) -> Self {
        Self {
            base,
            tau_min: 1e-3,
            tau_max: 1.2,
            tau_count: 200,
            spacing: TauSpacing::Log,
            dephase: false,
            samples_per_segment: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.tau_min.is_finite() && self.tau_min > 0.0 && self.tau_max > self.tau_min) {
            return Err(Error::InvalidParameter {
                field: "tau_range",
                reason: format!(
                    "need 0 < tau_min < tau_max, got [{}, {}]",
                    self.tau_min, self.tau_max
                ),
            });
        }
        if self.tau_count < 2 {
            return Err(Error::InvalidParameter {
                field: "tau_count",
                reason: format!("{} is too few grid points", self.tau_count),
            });
        }
        Ok(())
    }

    /// The period grid, ascending, endpoints exact.
    pub fn taus(&self) -> Vec<f64> {
        let n = self.tau_count;
        let mut grid: Vec<f64> = match self.spacing {
            TauSpacing::Linear => {
                let step = (self.tau_max - self.tau_min) / (n - 1) as f64;
                (0..n).map(|i| self.tau_min + step * i as f64).collect()
            }
            TauSpacing::Log => {
                let (a, b) = (self.tau_min.ln(), self.tau_max.ln());
                let step = (b - a) / (n - 1) as f64;
                (0..n).map(|i| (a + step * i as f64).exp()).collect()
            }
        };
        grid[0] = self.tau_min;
        grid[n - 1] = self.tau_max;
        grid
    }
}

/// One grid point: either a full report or the error that stopped it.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub tau: f64,
    pub report: Option<CycleReport>,
    pub error: Option<String>,
}

/// Solve every grid point. Failures are recorded per point, never fatal
/// for the sweep as a whole; ordering follows the grid deterministically.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let solve_opts = SolveOptions {
        samples_per_segment: spec.samples_per_segment,
        ..SolveOptions::default()
    };
    let assemble_opts = AssembleOptions { dephase: spec.dephase };
    Ok(spec
        .taus()
        .into_par_iter()
        .map(|tau| {
            let params = spec.base.with_tau(tau);
            let outcome = assemble_global(&params, &assemble_opts)
                .and_then(|g| solve_limit_cycle(&g, &solve_opts))
                .and_then(|lc| cycle_report(&lc, &params));
            match outcome {
                Ok(report) => SweepRecord { tau, report: Some(report), error: None },
                Err(e) => SweepRecord { tau, report: None, error: Some(e.to_string()) },
            }
        })
        .collect())
}

/// Cooling power alone, solved as cheaply as possible: only the anchor and
/// the state leaving the cold stroke are needed, no trajectory.
fn cooling_power_at(base: &CycleParams, dephase: bool, tau: f64) -> Result<f64> {
    let params = base.with_tau(tau);
    let global = assemble_global(&params, &AssembleOptions { dephase })?;
    let anchor = anchor_eigen(&global)?;
    let anchor = if dephase { anchor.dephased() } else { anchor };
    let after_cold = global.segments[0].propagator.apply(&anchor);
    Ok((after_cold.e - anchor.e) / tau)
}

/// An operating-mode boundary located between two grid points.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Transition {
    /// Grid period just below the boundary and its mode.
    pub tau_below: f64,
    pub class_below: CycleClass,
    /// Grid period just above the boundary and its mode.
    pub tau_above: f64,
    pub class_above: CycleClass,
    /// Bisection-refined boundary period.
    pub tau_star: f64,
}

/// Everything the sweep learns about mode boundaries.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionReport {
    pub transitions: Vec<Transition>,
    /// Period intervals whose interior operates as a short circuit.
    pub short_circuit_windows: Vec<(f64, f64)>,
    /// Grid period with the largest entropy production, if any point solved.
    pub entropy_peak_tau: Option<f64>,
    /// Whether that peak lies inside a short-circuit window (`None` when
    /// there are no windows).
    pub entropy_peak_in_window: Option<bool>,
    /// Whether the transient contraction `|lambda_2|` never increased with
    /// the period (within slack 1e-9) across solved grid points.
    pub lambda2_nonincreasing: bool,
}

/// Relative bisection tolerance for transition refinement.
const TRANSITION_REL_TOL: f64 = 1e-4;

/// Locate and refine every cooling-power sign change on the grid.
pub fn find_transitions(spec: &SweepSpec, records: &[SweepRecord]) -> Result<TransitionReport> {
    let valid: Vec<(&SweepRecord, &CycleReport)> =
        records.iter().filter_map(|r| r.report.as_ref().map(|rep| (r, rep))).collect();

    let mut transitions = Vec::new();
    for pair in valid.windows(2) {
        let (lo, lo_rep) = pair[0];
        let (hi, hi_rep) = pair[1];
        let (a, b) = (lo_rep.cooling_power, hi_rep.cooling_power);
        if a == 0.0 || b == 0.0 || a.signum() == b.signum() {
            continue;
        }
        let tau_star = refine_transition(&spec.base, spec.dephase, lo.tau, hi.tau)?;
        transitions.push(Transition {
            tau_below: lo.tau,
            class_below: lo_rep.classification,
            tau_above: hi.tau,
            class_above: hi_rep.classification,
            tau_star,
        });
    }

    // A short-circuit window is a pair of consecutive boundaries whose
    // interior grid points predominantly short-circuit.
    let mut windows = Vec::new();
    for pair in transitions.windows(2) {
        let (left, right) = (pair[0].tau_star, pair[1].tau_star);
        let inside: Vec<&CycleReport> = valid
            .iter()
            .filter(|(r, _)| r.tau > left && r.tau < right)
            .map(|(_, rep)| *rep)
            .collect();
        if inside.is_empty() {
            continue;
        }
        let sc =
            inside.iter().filter(|rep| rep.classification == CycleClass::ShortCircuit).count();
        if 2 * sc >= inside.len() {
            windows.push((left, right));
        }
    }

    let entropy_peak_tau = valid
        .iter()
        .max_by(|(_, a), (_, b)| a.entropy_production.total_cmp(&b.entropy_production))
        .map(|(r, _)| r.tau);
    let entropy_peak_in_window = if windows.is_empty() {
        None
    } else {
        entropy_peak_tau.map(|t| windows.iter().any(|&(lo, hi)| t >= lo && t <= hi))
    };

    let lambda2_nonincreasing = valid
        .windows(2)
        .all(|pair| pair[1].1.lambda2_modulus <= pair[0].1.lambda2_modulus + 1e-9);

    Ok(TransitionReport {
        transitions,
        short_circuit_windows: windows,
        entropy_peak_tau,
        entropy_peak_in_window,
        lambda2_nonincreasing,
    })
}

/// Bisect a cooling-power sign change bracketed by `[lo, hi]` down to a
/// relative width of 1e-4.
pub fn refine_transition(
    base: &CycleParams,
    dephase: bool,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let mut f_lo = cooling_power_at(base, dephase, lo)?;
    let f_hi = cooling_power_at(base, dephase, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket(format!(
            "cooling power does not change sign on [{lo}, {hi}]"
        )));
    }
    while (hi - lo) > TRANSITION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        let f_mid = cooling_power_at(base, dephase, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A quantized sweep landmark: the period at which the internal rotation
/// of the compression stroke completes `l` half-turns.
#[derive(Debug, Clone, Serialize)]
pub struct Landmark {
    pub l: f64,
    /// Sweep-stroke duration satisfying the quantization condition.
    pub tau_adiabat: f64,
    /// Full period with that stroke duration, given the time split.
    pub tau_cycle: f64,
    /// Operating mode of the cycle solved exactly at the landmark.
    pub classification: Option<CycleClass>,
    /// Set when a transition report is available to compare against.
    pub in_short_circuit_window: Option<bool>,
}

/// Compute the landmark periods for the given winding numbers, solving the
/// cycle at each to record its operating mode.
pub fn landmark_times(params: &CycleParams, winding: &[f64]) -> Result<Vec<Landmark>> {
    params.validate()?;
    let mut out = Vec::with_capacity(winding.len());
    for &l in winding {
        let tau_adiabat =
            quantization_time(params.j_coupling, params.omega_cold, params.omega_hot, l)?;
        let tau_cycle = tau_adiabat / params.fractions.compression;
        let classification = (|| -> Result<CycleClass> {
            let p = params.with_tau(tau_cycle);
            let g = assemble_global(&p, &AssembleOptions::default())?;
            let lc = solve_limit_cycle(
                &g,
                &SolveOptions { samples_per_segment: 16, ..SolveOptions::default() },
            )?;
            Ok(cycle_report(&lc, &p)?.classification)
        })()
        .ok();
        out.push(Landmark {
            l,
            tau_adiabat,
            tau_cycle,
            classification,
            in_short_circuit_window: None,
        });
    }
    Ok(out)
}

/// Fill in the window membership of each landmark from a transition report.
pub fn annotate_landmarks(landmarks: &mut [Landmark], report: &TransitionReport) {
    for lm in landmarks {
        lm.in_short_circuit_window = Some(
            report
                .short_circuit_windows
                .iter()
                .any(|&(lo, hi)| lm.tau_cycle >= lo && lm.tau_cycle <= hi),
        );
    }
}
