//! Thermodynamic bookkeeping on a solved limit cycle.
//!
//! Heats are energy changes across the two bath-contact strokes, work is
//! the energy moved by the drive across the two sweeps, and everything else
//! (entropy production, operating-mode classification, dynamical
//! temperature, entropy-coordinate geometry) follows from the steady-state
//! trajectory. Sign convention: positive heat flows *into* the working
//! medium, positive `work_input` is energy pushed in by the drive.

use serde::Serialize;

use crate::cycle::{CyclePoint, LimitCycle, SegmentLabel};
use crate::error::{Error, Result};
use crate::params::CycleParams;
use crate::segment::IsochoreSpec;
use crate::state::StateVector;

/// Heat absorbed from each bath and the work balance over one period.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Heats {
    /// Heat absorbed from the cold bath (positive = refrigeration duty).
    pub q_cold: f64,
    /// Heat absorbed from the hot bath (negative = rejected into it).
    pub q_hot: f64,
    /// Drive energy injected across both sweeps.
    pub work_input: f64,
    /// Energy-closure defect `q_cold + q_hot + work_input`; zero on a
    /// perfectly closed limit cycle.
    pub first_law_residual: f64,
}

pub fn heats(lc: &LimitCycle) -> Heats {
    let e = |s: &StateVector| s.e;
    let a = e(&lc.endpoints[0]);
    let b = e(&lc.endpoints[1]);
    let c = e(&lc.endpoints[2]);
    let d = e(&lc.endpoints[3]);
    let a_closed = e(&lc.endpoints[4]);
    let q_cold = b - a;
    let q_hot = d - c;
    let work_input = (c - b) + (a_closed - d);
    Heats { q_cold, q_hot, work_input, first_law_residual: q_cold + q_hot + work_input }
}

/// Operating mode of a period, judged by the two heat signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleClass {
    /// Pumps heat out of the cold bath into the hot one.
    Refrigerator,
    /// Dissipates drive work into *both* baths: worse than doing nothing.
    ShortCircuit,
    /// Extracts net work from the two baths.
    Engine,
    /// Anything else (degenerate conduction, exact-zero edge cases).
    Other,
}

impl CycleClass {
    pub fn name(&self) -> &'static str {
        match self {
            CycleClass::Refrigerator => "refrigerator",
            CycleClass::ShortCircuit => "short_circuit",
            CycleClass::Engine => "engine",
            CycleClass::Other => "other",
        }
    }
}

pub fn classify(h: &Heats) -> CycleClass {
    if h.q_cold > 0.0 && h.q_hot < 0.0 {
        CycleClass::Refrigerator
    } else if h.q_cold < 0.0 && h.q_hot < 0.0 {
        CycleClass::ShortCircuit
    } else if h.q_hot > 0.0 && h.q_cold < 0.0 && h.q_cold + h.q_hot > 0.0 {
        CycleClass::Engine
    } else {
        CycleClass::Other
    }
}

/// Entropy generated in the two baths per period,
/// `-q_hot / T_hot - q_cold / T_cold`; nonnegative by the second law.
pub fn entropy_production(h: &Heats, params: &CycleParams) -> f64 {
    -h.q_hot / params.t_hot - h.q_cold / params.t_cold
}

/// `|E| / sqrt(L^2 + C^2)` at a state: how dominant the energy component is
/// over the coherences. Infinite for a diagonal state.
pub fn energy_coherence_ratio(state: &StateVector) -> f64 {
    let denom = state.l.hypot(state.c);
    if denom == 0.0 {
        f64::INFINITY
    } else {
        state.e.abs() / denom
    }
}

/// Spread of the coherence measure along the steady-state trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoherenceStats {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

pub fn coherence_stats(trajectory: &[CyclePoint]) -> CoherenceStats {
    let n = trajectory.len().max(1) as f64;
    let mean = trajectory.iter().map(|p| p.coherence).sum::<f64>() / n;
    let var = trajectory.iter().map(|p| (p.coherence - mean).powi(2)).sum::<f64>() / n;
    let min = trajectory.iter().map(|p| p.coherence).fold(f64::INFINITY, f64::min);
    let max = trajectory.iter().map(|p| p.coherence).fold(f64::NEG_INFINITY, f64::max);
    CoherenceStats { mean, std_dev: var.sqrt(), min, max }
}

/// Which bath contact to inspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsochoreSide {
    Cold,
    Hot,
}

/// Below this rate of entropy change the dynamical temperature is reported
/// as singular rather than as a huge unreliable quotient.
pub const ENTROPY_RATE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TemperaturePoint {
    pub time: f64,
    /// `dE/dt / dS_E/dt`; `None` where the entropy rate is below the floor.
    pub t_dyn: Option<f64>,
    /// Time derivative of `t_dyn` by centered differences, where defined.
    pub derivative: Option<f64>,
    pub singular: bool,
}

/// Dynamical temperature along one bath contact of the steady state.
#[derive(Debug, Clone, Serialize)]
pub struct TemperatureProfile {
    pub side: IsochoreSide,
    pub points: Vec<TemperaturePoint>,
    /// True when the entropy rate changes sign inside the stroke: the
    /// temperature runs through a pole there.
    pub crossed_zero_denominator: bool,
}

/// Compute `T_dyn = (dE/dt) / (dS_E/dt)` along the chosen isochore.
/// The energy rate is analytic (`-Gamma (E - E_eq)`); the entropy rate
/// comes from centered differences of the sampled `S_E`, so the profile
/// covers the interior sample points of the stroke.
pub fn dynamical_temperature_profile(
    lc: &LimitCycle,
    side: IsochoreSide,
) -> Result<TemperatureProfile> {
    let (label, spec) = match side {
        IsochoreSide::Cold => (
            SegmentLabel::ColdIsochore,
            IsochoreSpec {
                omega: lc.params.omega_cold,
                j_coupling: lc.params.j_coupling,
                temperature: lc.params.t_cold,
                k_down: lc.params.k_down_cold,
                duration: lc.params.durations()[0],
            },
        ),
        IsochoreSide::Hot => (
            SegmentLabel::HotIsochore,
            IsochoreSpec {
                omega: lc.params.omega_hot,
                j_coupling: lc.params.j_coupling,
                temperature: lc.params.t_hot,
                k_down: lc.params.k_down_hot,
                duration: lc.params.durations()[2],
            },
        ),
    };
    let samples: Vec<&CyclePoint> = lc.trajectory.iter().filter(|p| p.label == label).collect();
    if samples.len() < 3 {
        return Err(Error::InvalidParameter {
            field: "samples_per_segment",
            reason: "need at least 3 samples per stroke for a temperature profile".into(),
        });
    }
    let (gamma, e_eq) = (spec.gamma(), spec.e_eq());
    let dt = samples[1].time - samples[0].time;

    let mut t_dyn: Vec<Option<f64>> = Vec::with_capacity(samples.len().saturating_sub(2));
    let mut times = Vec::with_capacity(t_dyn.capacity());
    let mut entropy_rates = Vec::with_capacity(t_dyn.capacity());
    for k in 1..samples.len() - 1 {
        let de_dt = -gamma * (samples[k].state.e - e_eq);
        let ds_dt = (samples[k + 1].s_e - samples[k - 1].s_e) / (2.0 * dt);
        times.push(samples[k].time);
        entropy_rates.push(ds_dt);
        t_dyn.push(if ds_dt.abs() < ENTROPY_RATE_FLOOR { None } else { Some(de_dt / ds_dt) });
    }

    let crossed = entropy_rates.windows(2).any(|w| w[0] * w[1] < 0.0);

    let points = (0..t_dyn.len())
        .map(|i| {
            let derivative = if i > 0 && i + 1 < t_dyn.len() {
                match (t_dyn[i - 1], t_dyn[i + 1]) {
                    (Some(a), Some(b)) => Some((b - a) / (2.0 * dt)),
                    _ => None,
                }
            } else {
                None
            };
            TemperaturePoint {
                time: times[i],
                t_dyn: t_dyn[i],
                derivative,
                singular: t_dyn[i].is_none(),
            }
        })
        .collect();

    Ok(TemperatureProfile { side, points, crossed_zero_denominator: crossed })
}

/// Shape of the cycle in the `(Omega, S_E)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryClass {
    /// `S_E(Omega)` bulges upward along the sweeps; coherence peaks
    /// mid-sweep and dies at the switch points.
    Concave,
    /// `S_E(Omega)` sags downward; coherence is smallest mid-sweep and
    /// largest at the switches.
    Convex,
    Indeterminate,
}

impl GeometryClass {
    pub fn name(&self) -> &'static str {
        match self {
            GeometryClass::Concave => "concave",
            GeometryClass::Convex => "convex",
            GeometryClass::Indeterminate => "indeterminate",
        }
    }
}

fn curvature_vote(points: &[&CyclePoint]) -> Option<GeometryClass> {
    // Second divided differences of S_E against Omega on the (uneven) grid.
    let mut neg = 0usize;
    let mut total = 0usize;
    for w in points.windows(3) {
        let (x0, x1, x2) = (w[0].omega_big, w[1].omega_big, w[2].omega_big);
        let (y0, y1, y2) = (w[0].s_e, w[1].s_e, w[2].s_e);
        let d2 = 2.0 * ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0);
        if d2.abs() > 0.0 {
            total += 1;
            if d2 < 0.0 {
                neg += 1;
            }
        }
    }
    if total == 0 {
        return None;
    }
    let frac = neg as f64 / total as f64;
    if frac >= 0.65 {
        Some(GeometryClass::Concave)
    } else if frac <= 0.35 {
        Some(GeometryClass::Convex)
    } else {
        None
    }
}

fn coherence_vote(points: &[&CyclePoint]) -> Option<GeometryClass> {
    let n = points.len();
    if n < 7 {
        return None;
    }
    let argmax = (0..n).max_by(|&a, &b| points[a].coherence.total_cmp(&points[b].coherence))?;
    let argmin = (0..n).min_by(|&a, &b| points[a].coherence.total_cmp(&points[b].coherence))?;
    let near_edge = |i: usize| i < 2 || i + 2 >= n;
    if !near_edge(argmax) && near_edge(argmin) {
        Some(GeometryClass::Concave)
    } else if !near_edge(argmin) && near_edge(argmax) {
        Some(GeometryClass::Convex)
    } else {
        None
    }
}

/// Classify the sweep geometry from the steady-state trajectory. Two
/// independent criteria are evaluated on each sweep — the sign of the
/// `S_E(Omega)` curvature and the placement of the coherence extrema — and
/// all four votes must agree.
pub fn classify_geometry(lc: &LimitCycle) -> GeometryClass {
    let mut verdict: Option<GeometryClass> = None;
    for label in [SegmentLabel::Compression, SegmentLabel::Expansion] {
        let points: Vec<&CyclePoint> =
            lc.trajectory.iter().filter(|p| p.label == label).collect();
        for vote in [curvature_vote(&points), coherence_vote(&points)] {
            match (verdict, vote) {
                (_, None) => return GeometryClass::Indeterminate,
                (None, Some(v)) => verdict = Some(v),
                (Some(prev), Some(v)) if prev != v => return GeometryClass::Indeterminate,
                _ => {}
            }
        }
    }
    verdict.unwrap_or(GeometryClass::Indeterminate)
}

/// Everything the CLI and the sweep machinery report about one solved cycle.
#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    pub tau_cycle: f64,
    pub q_cold: f64,
    pub q_hot: f64,
    pub work_input: f64,
    pub cooling_power: f64,
    pub classification: CycleClass,
    pub entropy_production: f64,
    pub first_law_residual: f64,
    pub closure_defect: f64,
    pub route_delta: f64,
    pub lambda2_modulus: f64,
    pub convergence_rate: f64,
    pub energy_coherence_ratio_at_anchor: f64,
    pub geometry: GeometryClass,
    pub coherence: CoherenceStats,
    pub dephased: bool,
}

/// Assemble the per-cycle report. `params` must be the exact parameter set
/// the limit cycle was solved from; anything else is a staleness bug in the
/// caller.
pub fn cycle_report(lc: &LimitCycle, params: &CycleParams) -> Result<CycleReport> {
    if *params != lc.params {
        return Err(Error::StaleCycle);
    }
    let h = heats(lc);
    Ok(CycleReport {
        tau_cycle: params.tau_cycle,
        q_cold: h.q_cold,
        q_hot: h.q_hot,
        work_input: h.work_input,
        cooling_power: h.q_cold / params.tau_cycle,
        classification: classify(&h),
        entropy_production: entropy_production(&h, params),
        first_law_residual: h.first_law_residual,
        closure_defect: lc.closure_defect,
        route_delta: lc.route_delta,
        lambda2_modulus: lc.lambda2_modulus,
        convergence_rate: lc.convergence_rate,
        energy_coherence_ratio_at_anchor: energy_coherence_ratio(&lc.anchor),
        geometry: classify_geometry(lc),
        coherence: coherence_stats(&lc.trajectory),
        dephased: lc.dephased,
    })
}
