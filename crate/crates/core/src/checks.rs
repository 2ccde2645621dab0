//! Runtime self-checks.
//!
//! Every quantity this crate computes has at least two independent routes:
//! closed-form propagators vs. direct integration, linear-algebra anchors
//! vs. iterated cycles, quantization formulas vs. root finding, spectral
//! vs. Padé matrix exponentials. `run_validation` exercises all of them on
//! the caller's own parameters and reports one outcome per check, so a
//! parameter regime that silently breaks an assumption is caught before
//! anyone trusts a sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cycle::{assemble_global, solve_limit_cycle, AssembleOptions, SolveOptions};
use crate::error::Result;
use crate::expm::{expm, expm_pade, expm_spectral, M5};
use crate::observables::{entropy_production, heats};
use crate::ode::{integrate_segment, IntegratorOptions, Segment};
use crate::params::CycleParams;
use crate::segment::{
    adiabat_propagator, isochore_generator_with_pump_sign, isochore_propagator,
    quantization_time, AdiabatSpec, IsochoreSpec,
};
use crate::state::random_valid_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl CheckStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable => "n/a",
        }
    }
}

/// One named self-check with a human-readable summary of the evidence.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        Self { name, status: CheckStatus::Pass, detail }
    }
    fn fail(name: &'static str, detail: String) -> Self {
        Self { name, status: CheckStatus::Fail, detail }
    }
    fn not_applicable(name: &'static str, detail: String) -> Self {
        Self { name, status: CheckStatus::NotApplicable, detail }
    }
    fn gate(name: &'static str, ok: bool, detail: String) -> Self {
        if ok {
            Self::pass(name, detail)
        } else {
            Self::fail(name, detail)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Deliberately flip the pump sign in the bath generators, inverting
    /// the stationary population. The thermal-state check must then fail;
    /// use this to confirm the validation suite has teeth.
    pub corrupt_pump_sign: bool,
    pub seed: u64,
    /// Random stroke specs for the propagator-vs-integrator comparison.
    pub propagator_trials: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { corrupt_pump_sign: false, seed: 0x0770, propagator_trials: 100 }
    }
}

/// True when no check failed (not-applicable outcomes are fine).
pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.status != CheckStatus::Fail)
}

/// Run the full self-check suite against one parameter set.
pub fn run_validation(params: &CycleParams, opts: &ValidationOptions) -> Vec<CheckOutcome> {
    let mut out = Vec::with_capacity(6);
    if let Err(e) = params.validate() {
        out.push(CheckOutcome::fail("parameter_validation", e.to_string()));
        return out;
    }
    out.push(CheckOutcome::pass(
        "parameter_validation",
        format!(
            "parameters well-formed; refrigerator condition {}",
            if params.refrigerator_condition_met() { "met" } else { "NOT met" }
        ),
    ));
    out.push(stationary_thermal_state(params, opts));
    out.push(propagator_vs_integrator(params, opts));
    out.push(quantization_consistency(params));
    out.push(limit_cycle_route_agreement(params));
    out.push(thermodynamic_consistency(params));
    out.push(matrix_exponential_routes(params, opts));
    out
}

fn both_baths_off(params: &CycleParams) -> bool {
    params.k_down_cold == 0.0 && params.k_down_hot == 0.0
}

fn isochore_specs(params: &CycleParams) -> [(&'static str, IsochoreSpec); 2] {
    let d = params.durations();
    [
        (
            "cold",
            IsochoreSpec {
                omega: params.omega_cold,
                j_coupling: params.j_coupling,
                temperature: params.t_cold,
                k_down: params.k_down_cold,
                duration: d[0],
            },
        ),
        (
            "hot",
            IsochoreSpec {
                omega: params.omega_hot,
                j_coupling: params.j_coupling,
                temperature: params.t_hot,
                k_down: params.k_down_hot,
                duration: d[2],
            },
        ),
    ]
}

/// The bath generator must annihilate the thermal state, and holding the
/// contact long enough must relax arbitrary states onto it.
fn stationary_thermal_state(params: &CycleParams, opts: &ValidationOptions) -> CheckOutcome {
    const NAME: &str = "stationary_thermal_state";
    if both_baths_off(params) {
        return CheckOutcome::not_applicable(
            NAME,
            "both bath couplings are zero; no thermal fixed point exists".into(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_residual: f64 = 0.0;
    let mut max_distance: f64 = 0.0;
    for (_, spec) in isochore_specs(params) {
        if spec.k_down == 0.0 {
            continue;
        }
        let g = isochore_generator_with_pump_sign(&spec, opts.corrupt_pump_sign);
        let eq = spec.equilibrium_state();
        let residual = (g * eq.to_vector()).abs().max();
        max_residual = max_residual.max(residual);

        // Hold the contact for fifty relaxation times; anything valid must
        // land on the thermal state to roundoff.
        let hold = expm(&(g * (50.0 / spec.gamma())));
        for _ in 0..3 {
            let s0 = random_valid_state(&mut rng, spec.omega_big());
            let mut v = hold * s0.to_vector();
            v[4] = 1.0;
            let relaxed = crate::state::StateVector::from_vector(&v);
            max_distance = max_distance.max(relaxed.distance(&eq));
        }
    }
    CheckOutcome::gate(
        NAME,
        max_residual < 1e-12 && max_distance < 1e-8,
        format!(
            "generator residual at thermal state {max_residual:.3e} (tol 1e-12); \
             long-hold distance {max_distance:.3e} (tol 1e-8)"
        ),
    )
}

/// Closed-form stroke propagators against high-accuracy direct integration
/// of the same equations of motion, on randomized stroke specs.
fn propagator_vs_integrator(params: &CycleParams, opts: &ValidationOptions) -> CheckOutcome {
    const NAME: &str = "propagator_vs_integrator";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let tol = 1e-8;
    let int_opts = IntegratorOptions::default();
    let mut max_dev: f64 = 0.0;
    let mut count = 0usize;
    // Randomize around the caller's scales so the check exercises the
    // regime actually in use.
    let w_lo = 0.5 * params.omega_cold.min(params.omega_hot);
    let w_hi = 1.5 * params.omega_cold.max(params.omega_hot);
    for _ in 0..opts.propagator_trials {
        let result: Result<f64> = (|| {
            if rng.random_range(0..2) == 0 {
                let spec = IsochoreSpec {
                    omega: rng.random_range(w_lo..w_hi),
                    j_coupling: params.j_coupling * rng.random_range(0.5..2.0),
                    temperature: rng.random_range(0.5..2.0)
                        * 0.5
                        * (params.t_cold + params.t_hot),
                    k_down: rng.random_range(0.0..0.8),
                    duration: rng.random_range(0.01..5.0),
                };
                let s0 = random_valid_state(&mut rng, spec.omega_big());
                let via_expm = isochore_propagator(&spec)?.apply(&s0);
                let via_ode = integrate_segment(&Segment::Isochore(spec), &s0, &int_opts)?;
                Ok(via_expm.distance(&via_ode))
            } else {
                let w0 = rng.random_range(w_lo..w_hi);
                let mut w1 = rng.random_range(w_lo..w_hi);
                if w0 == w1 {
                    w1 *= 1.5;
                }
                let spec = AdiabatSpec {
                    omega_start: w0,
                    omega_end: w1,
                    j_coupling: params.j_coupling * rng.random_range(0.5..2.0),
                    duration: rng.random_range(0.01..3.0),
                };
                let s0 = random_valid_state(&mut rng, spec.omega_big_start());
                let via_expm = adiabat_propagator(&spec)?.apply(&s0);
                let via_ode = integrate_segment(&Segment::Adiabat(spec), &s0, &int_opts)?;
                Ok(via_expm.distance(&via_ode))
            }
        })();
        match result {
            Ok(dev) => {
                max_dev = max_dev.max(dev);
                count += 1;
            }
            Err(e) => {
                return CheckOutcome::fail(NAME, format!("trial errored: {e}"));
            }
        }
    }
    CheckOutcome::gate(
        NAME,
        max_dev < tol,
        format!("max deviation {max_dev:.3e} over {count} random strokes (tol {tol:.0e})"),
    )
}

/// The closed-form quantization times against a bisection root-find on the
/// coherence-mixing entry of the sweep propagator, which changes sign at
/// every half-winding.
fn quantization_consistency(params: &CycleParams) -> CheckOutcome {
    const NAME: &str = "quantization_consistency";
    if params.omega_cold == params.omega_hot {
        return CheckOutcome::not_applicable(
            NAME,
            "field endpoints coincide; the sweep strokes are trivial".into(),
        );
    }
    let mixing_entry = |duration: f64| -> Result<f64> {
        let spec = AdiabatSpec {
            omega_start: params.omega_cold,
            omega_end: params.omega_hot,
            j_coupling: params.j_coupling,
            duration,
        };
        Ok(adiabat_propagator(&spec)?.matrix[(2, 1)])
    };
    let mut max_err: f64 = 0.0;
    for l in [0.5, 1.0, 1.5] {
        let t_formula = match quantization_time(
            params.j_coupling,
            params.omega_cold,
            params.omega_hot,
            l,
        ) {
            Ok(t) => t,
            Err(e) => return CheckOutcome::fail(NAME, format!("l = {l}: {e}")),
        };
        // The formula time must sit on a sign change of the mixing entry;
        // bisect that bracket independently and compare.
        let (mut lo, mut hi) = (t_formula * (1.0 - 1e-3), t_formula * (1.0 + 1e-3));
        let (f_lo, f_hi) = match (mixing_entry(lo), mixing_entry(hi)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return CheckOutcome::fail(NAME, format!("l = {l}: propagator failed")),
        };
        if f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
            return CheckOutcome::fail(
                NAME,
                format!("l = {l}: no sign change around the predicted duration {t_formula:.6}"),
            );
        }
        for _ in 0..200 {
            if (hi - lo) < 1e-13 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = match mixing_entry(mid) {
                Ok(v) => v,
                Err(e) => return CheckOutcome::fail(NAME, format!("l = {l}: {e}")),
            };
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        max_err = max_err.max((0.5 * (lo + hi) - t_formula).abs());
    }
    CheckOutcome::gate(
        NAME,
        max_err < 1e-9,
        format!("formula vs root-find |delta t| <= {max_err:.3e} for l in {{1/2, 1, 3/2}} (tol 1e-9)"),
    )
}

/// Linear-algebra anchor against the iterated-map anchor, plus closure of
/// the periodic orbit.
fn limit_cycle_route_agreement(params: &CycleParams) -> CheckOutcome {
    const NAME: &str = "limit_cycle_route_agreement";
    if both_baths_off(params) {
        return CheckOutcome::not_applicable(
            NAME,
            "both bath couplings are zero; the cycle map has no contraction".into(),
        );
    }
    let solved = assemble_global(params, &AssembleOptions::default())
        .and_then(|g| solve_limit_cycle(&g, &SolveOptions::default()));
    match solved {
        Ok(lc) => CheckOutcome::gate(
            NAME,
            lc.route_delta < 1e-6 && lc.closure_defect < 1e-9,
            format!(
                "route disagreement {:.3e} (tol 1e-6); closure defect {:.3e} (tol 1e-9); \
                 iteration took {} cycles{}",
                lc.route_delta,
                lc.closure_defect,
                lc.iteration_cycles,
                if lc.iteration_accelerated { " (accelerated)" } else { "" }
            ),
        ),
        Err(e) => CheckOutcome::fail(NAME, e.to_string()),
    }
}

/// Energy bookkeeping must close, total entropy must not decrease, and the
/// spectral entropy must dominate the full entropy everywhere.
fn thermodynamic_consistency(params: &CycleParams) -> CheckOutcome {
    const NAME: &str = "thermodynamic_consistency";
    if both_baths_off(params) {
        return CheckOutcome::not_applicable(
            NAME,
            "both bath couplings are zero; no heat is exchanged".into(),
        );
    }
    let mut max_residual: f64 = 0.0;
    let mut min_sigma = f64::INFINITY;
    let mut max_entropy_gap: f64 = 0.0;
    for factor in [0.25, 1.0, 4.0] {
        let p = params.with_tau(params.tau_cycle * factor);
        let solved = assemble_global(&p, &AssembleOptions::default()).and_then(|g| {
            solve_limit_cycle(
                &g,
                &SolveOptions { samples_per_segment: 64, ..Default::default() },
            )
        });
        let lc = match solved {
            Ok(lc) => lc,
            Err(e) => {
                return CheckOutcome::fail(NAME, format!("tau = {:.4}: {e}", p.tau_cycle));
            }
        };
        let h = heats(&lc);
        max_residual = max_residual.max(h.first_law_residual.abs());
        min_sigma = min_sigma.min(entropy_production(&h, &p));
        for point in &lc.trajectory {
            max_entropy_gap = max_entropy_gap.max(point.s_vn - point.s_e);
        }
    }
    CheckOutcome::gate(
        NAME,
        max_residual < 1e-9 && min_sigma >= -1e-9 && max_entropy_gap <= 1e-12,
        format!(
            "first-law residual {max_residual:.3e} (tol 1e-9); \
             entropy production >= {min_sigma:.3e} (floor -1e-9); \
             max S_vn - S_spectral = {max_entropy_gap:.3e} (tol 1e-12)"
        ),
    )
}

/// Spectral matrix exponential against the Pade/scaling-and-squaring route,
/// on the cycle's own generators and on random matrices.
fn matrix_exponential_routes(params: &CycleParams, opts: &ValidationOptions) -> CheckOutcome {
    const NAME: &str = "matrix_exponential_routes";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(2));
    let mut candidates: Vec<M5> = isochore_specs(params)
        .iter()
        .map(|(_, spec)| isochore_generator_with_pump_sign(spec, false) * spec.duration)
        .collect();
    for _ in 0..30 {
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        candidates.push(M5::from_fn(|_, _| scale * rng.random_range(-1.0..1.0)));
    }
    let mut engaged = 0usize;
    let mut max_dev: f64 = 0.0;
    for a in &candidates {
        if let Some(spectral) = expm_spectral(a) {
            engaged += 1;
            let pade = expm_pade(a);
            let scale = pade.abs().max().max(1.0);
            max_dev = max_dev.max((spectral - pade).abs().max() / scale);
        }
    }
    CheckOutcome::gate(
        NAME,
        engaged > 0 && max_dev < 1e-10,
        format!(
            "spectral route engaged on {engaged}/{} matrices; \
             max relative deviation from Pade {max_dev:.3e} (tol 1e-10)",
            candidates.len()
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_family_passes_every_check() {
        let outcomes =
            run_validation(&CycleParams::paper_family(), &ValidationOptions::default());
        assert_eq!(outcomes.len(), 7);
        for o in &outcomes {
            assert_eq!(o.status, CheckStatus::Pass, "{}: {}", o.name, o.detail);
        }
        assert!(all_passed(&outcomes));
    }

    #[test]
    fn corrupted_pump_is_caught_by_the_thermal_check_only() {
        let opts = ValidationOptions { corrupt_pump_sign: true, ..Default::default() };
        let outcomes = run_validation(&CycleParams::paper_family(), &opts);
        assert!(!all_passed(&outcomes));
        for o in &outcomes {
            match o.name {
                "stationary_thermal_state" => {
                    assert_eq!(o.status, CheckStatus::Fail, "{}", o.detail)
                }
                _ => assert_eq!(o.status, CheckStatus::Pass, "{}: {}", o.name, o.detail),
            }
        }
    }

    #[test]
    fn disconnected_baths_mark_thermal_checks_not_applicable() {
        let mut params = CycleParams::paper_family();
        params.k_down_cold = 0.0;
        params.k_down_hot = 0.0;
        let outcomes = run_validation(&params, &ValidationOptions::default());
        let status =
            |name: &str| outcomes.iter().find(|o| o.name == name).map(|o| o.status).unwrap();
        assert_eq!(status("stationary_thermal_state"), CheckStatus::NotApplicable);
        assert_eq!(status("limit_cycle_route_agreement"), CheckStatus::NotApplicable);
        assert_eq!(status("thermodynamic_consistency"), CheckStatus::NotApplicable);
        assert_eq!(status("propagator_vs_integrator"), CheckStatus::Pass);
        assert_eq!(status("quantization_consistency"), CheckStatus::Pass);
        assert_eq!(status("matrix_exponential_routes"), CheckStatus::Pass);
        // Not-applicable is not failure.
        assert!(all_passed(&outcomes));
    }

    #[test]
    fn invalid_parameters_short_circuit_the_suite() {
        let mut params = CycleParams::paper_family();
        params.j_coupling = -1.0;
        let outcomes = run_validation(&params, &ValidationOptions::default());
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].status, CheckStatus::Fail);
        assert!(!all_passed(&outcomes));
    }
}
