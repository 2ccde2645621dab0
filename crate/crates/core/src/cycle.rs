//! Cycle assembly and the limit cycle.
//!
//! The four strokes compose into one affine map per period acting on
//! `(E, L, C, D, 1)`. Its unit eigenvalue carries the periodic steady state
//! (the limit cycle); the second-largest modulus sets how fast transients
//! die. The anchor state is solved twice, by linear algebra on the reduced
//! 4x4 block and by fixed-point iteration, and the two must agree — a cheap
//! end-to-end consistency gate on everything upstream.

use nalgebra::{Matrix4, Vector4, Vector5};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm::M5;
use crate::params::CycleParams;
use crate::segment::{
    adiabat_propagator, identity_propagator, isochore_propagator, AdiabatSpec, IsochoreSpec,
    SegmentKind, SegmentPropagator,
};
use crate::state::{
    coherence_measure, energy_entropy, reconstruct_density, von_neumann_entropy, StateVector,
};

/// Traversal order of the four strokes, starting from the anchor point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLabel {
    ColdIsochore,
    Compression,
    HotIsochore,
    Expansion,
}

impl SegmentLabel {
    pub const ALL: [SegmentLabel; 4] = [
        SegmentLabel::ColdIsochore,
        SegmentLabel::Compression,
        SegmentLabel::HotIsochore,
        SegmentLabel::Expansion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SegmentLabel::ColdIsochore => "cold_isochore",
            SegmentLabel::Compression => "compression",
            SegmentLabel::HotIsochore => "hot_isochore",
            SegmentLabel::Expansion => "expansion",
        }
    }
}

/// One stroke of the assembled cycle.
#[derive(Debug, Clone)]
pub struct CycleSegment {
    pub label: SegmentLabel,
    pub propagator: SegmentPropagator,
    /// Cycle time at which the stroke begins.
    pub start_time: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AssembleOptions {
    /// Erase energy-basis coherence (`L`, `C`) at every stroke switch; an
    /// idealised decoherence gate used to isolate what coherence does.
    pub dephase: bool,
}

/// The full one-period map and its strokes.
#[derive(Debug, Clone)]
pub struct GlobalPropagator {
    pub matrix: M5,
    pub segments: [CycleSegment; 4],
    pub params: CycleParams,
    pub dephased: bool,
    /// True when the two adiabats collapsed to identity maps
    /// (`omega_cold == omega_hot`): a pure heat-conduction cycle.
    pub degenerate_adiabats: bool,
    /// True when all four stroke maps commute pairwise, making the stroke
    /// ordering irrelevant.
    pub commuting_segments: bool,
}

/// Coherence-erasing gate: zero `L` and `C`, keep populations.
fn dephasing_projector() -> M5 {
    M5::from_diagonal(&Vector5::new(1.0, 0.0, 0.0, 1.0, 1.0))
}

/// Build the four stroke propagators for `params` and compose them.
pub fn assemble_global(
    params: &CycleParams,
    options: &AssembleOptions,
) -> Result<GlobalPropagator> {
    params.validate()?;
    let [tau_cold, tau_comp, tau_hot, tau_exp] = params.durations();

    let cold = isochore_propagator(&IsochoreSpec {
        omega: params.omega_cold,
        j_coupling: params.j_coupling,
        temperature: params.t_cold,
        k_down: params.k_down_cold,
        duration: tau_cold,
    })?;
    let hot = isochore_propagator(&IsochoreSpec {
        omega: params.omega_hot,
        j_coupling: params.j_coupling,
        temperature: params.t_hot,
        k_down: params.k_down_hot,
        duration: tau_hot,
    })?;
    let degenerate = params.omega_cold == params.omega_hot;
    let (comp, exp) = if degenerate {
        (identity_propagator(tau_comp), identity_propagator(tau_exp))
    } else {
        (
            adiabat_propagator(&AdiabatSpec {
                omega_start: params.omega_cold,
                omega_end: params.omega_hot,
                j_coupling: params.j_coupling,
                duration: tau_comp,
            })?,
            adiabat_propagator(&AdiabatSpec {
                omega_start: params.omega_hot,
                omega_end: params.omega_cold,
                j_coupling: params.j_coupling,
                duration: tau_exp,
            })?,
        )
    };

    let segments = [
        CycleSegment { label: SegmentLabel::ColdIsochore, propagator: cold, start_time: 0.0 },
        CycleSegment {
            label: SegmentLabel::Compression,
            propagator: comp,
            start_time: tau_cold,
        },
        CycleSegment {
            label: SegmentLabel::HotIsochore,
            propagator: hot,
            start_time: tau_cold + tau_comp,
        },
        CycleSegment {
            label: SegmentLabel::Expansion,
            propagator: exp,
            start_time: tau_cold + tau_comp + tau_hot,
        },
    ];

    let gate = dephasing_projector();
    let mut matrix = M5::identity();
    for seg in &segments {
        matrix = seg.propagator.matrix * matrix;
        if options.dephase {
            matrix = gate * matrix;
        }
    }

    let mut commuting = true;
    'outer: for i in 0..4 {
        for j in (i + 1)..4 {
            let a = &segments[i].propagator.matrix;
            let b = &segments[j].propagator.matrix;
            let scale = (a.amax() * b.amax()).max(1.0);
            if (a * b - b * a).amax() > 1e-12 * scale {
                commuting = false;
                break 'outer;
            }
        }
    }

    Ok(GlobalPropagator {
        matrix,
        segments,
        params: *params,
        dephased: options.dephase,
        degenerate_adiabats: degenerate,
        commuting_segments: commuting,
    })
}

impl GlobalPropagator {
    /// All five eigenvalues of the one-period map, sorted by descending
    /// modulus. The leading one is the exact unit eigenvalue of the steady
    /// state; the second sets the transient decay per cycle.
    pub fn spectrum(&self) -> Result<[Complex64; 5]> {
        let eigs = self.matrix.complex_eigenvalues();
        let mut out = [Complex64::new(0.0, 0.0); 5];
        for (slot, v) in out.iter_mut().zip(eigs.iter()) {
            *slot = *v;
        }
        out.sort_by(|a, b| {
            b.norm()
                .total_cmp(&a.norm())
                .then(b.re.total_cmp(&a.re))
                .then(b.im.total_cmp(&a.im))
        });
        if (out[0].norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Numeric(format!(
                "one-period map lost its unit eigenvalue: leading modulus {}",
                out[0].norm()
            )));
        }
        Ok(out)
    }

    fn reduced(&self) -> (Matrix4<f64>, Vector4<f64>) {
        let a = self.matrix.fixed_view::<4, 4>(0, 0).into_owned();
        let b = Vector4::new(
            self.matrix[(0, 4)],
            self.matrix[(1, 4)],
            self.matrix[(2, 4)],
            self.matrix[(3, 4)],
        );
        (a, b)
    }
}

/// Solve the steady state from the unit-eigenvalue linear system
/// `(A - I) x = -b` on the reduced 4x4 block, via least squares.
pub fn anchor_eigen(global: &GlobalPropagator) -> Result<StateVector> {
    let (a, b) = global.reduced();
    let lhs = a - Matrix4::identity();
    let svd = lhs.svd(true, true);
    let x = svd
        .solve(&(-b), 1e-14)
        .map_err(|e| Error::Numeric(format!("steady-state solve failed: {e}")))?;
    let residual = (lhs * x + b).amax();
    let scale = b.amax().max(1.0);
    if residual > 1e-9 * scale {
        return Err(Error::Numeric(format!("steady-state solve left residual {residual:e}")));
    }
    Ok(StateVector { e: x[0], l: x[1], c: x[2], d: x[3] })
}

#[derive(Debug, Clone, Copy)]
pub struct IterationOptions {
    /// Stop when one further cycle moves the state less than this.
    pub tol: f64,
    /// Give up after this many cycle applications.
    pub max_cycles: u64,
    /// Periodically extrapolate through the residual subspace (minimal
    /// polynomial extrapolation); exact in principle because transients
    /// live in a four-dimensional space.
    pub accelerate: bool,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_cycles: 1_000_000, accelerate: true }
    }
}

/// Outcome of the iterative route.
#[derive(Debug, Clone, Copy)]
pub struct IterationOutcome {
    pub anchor: StateVector,
    pub cycles: u64,
    pub residual: f64,
    pub accelerated: bool,
}

/// Solve the steady state by repeatedly applying the one-period map from
/// the maximally mixed state, optionally with extrapolation.
///
/// The extrapolation is minimal-polynomial: transients live in a
/// four-dimensional space, so six iterates determine the fixed point
/// exactly in principle. Candidates are only accepted when they actually
/// shrink the residual; when the map contracts so slowly that successive
/// differences are indistinguishable, the sampling stride between window
/// entries is widened until the signal re-emerges.
pub fn anchor_iterative(
    global: &GlobalPropagator,
    opts: &IterationOptions,
) -> Result<IterationOutcome> {
    let (a, b) = global.reduced();
    let step = |x: &Vector4<f64>| a * x + b;

    let mut x = Vector4::zeros();
    let mut cycles: u64 = 0;
    let mut accelerated = false;
    let mut window: Vec<Vector4<f64>> = Vec::with_capacity(6);
    let mut stride: u64 = 1; // cycles between window samples
    let mut since_sample: u64 = 0;
    let mut rejects_in_a_row: u32 = 0;

    if opts.accelerate {
        window.push(x);
    }

    loop {
        let next = step(&x);
        cycles += 1;
        since_sample += 1;
        let residual = (next - x).amax();
        if residual < opts.tol {
            return Ok(IterationOutcome {
                anchor: StateVector { e: next[0], l: next[1], c: next[2], d: next[3] },
                cycles,
                residual,
                accelerated,
            });
        }
        if cycles >= opts.max_cycles {
            let lambda2 = global.spectrum().map(|s| s[1].norm()).unwrap_or(f64::NAN);
            return Err(Error::SlowConvergence { max_cycles: opts.max_cycles, lambda2 });
        }
        x = next;

        if !opts.accelerate || since_sample < stride {
            continue;
        }
        since_sample = 0;
        window.push(x);
        if window.len() < 6 {
            continue;
        }

        let candidate = mpe_extrapolate(&window);
        window.remove(0); // slide if the candidate is not taken
        if let Some(xs) = candidate {
            let xs_next = step(&xs);
            cycles += 1;
            let xs_residual = (xs_next - xs).amax();
            if xs_residual < residual {
                // Accept the jump and restart sampling from there.
                accelerated = true;
                x = xs_next;
                window.clear();
                window.push(x);
                rejects_in_a_row = 0;
                if xs_residual < opts.tol {
                    return Ok(IterationOutcome {
                        anchor: StateVector {
                            e: xs_next[0],
                            l: xs_next[1],
                            c: xs_next[2],
                            d: xs_next[3],
                        },
                        cycles,
                        residual: xs_residual,
                        accelerated,
                    });
                }
                continue;
            }
        }
        rejects_in_a_row += 1;
        if rejects_in_a_row >= 3 {
            // Differences too degenerate at this sampling rate; widen it.
            stride = (stride * 4).min(1 << 20);
            window.clear();
            window.push(x);
            rejects_in_a_row = 0;
        }
    }
}

/// Minimal polynomial extrapolation over six window iterates: fit the
/// combination of differences that annihilates the transient and average
/// the iterates with the resulting weights. Returns `None` when the little
/// least-squares problem is too degenerate to trust.
fn mpe_extrapolate(window: &[Vector4<f64>]) -> Option<Vector4<f64>> {
    debug_assert_eq!(window.len(), 6);
    let u: Vec<Vector4<f64>> = window.windows(2).map(|p| p[1] - p[0]).collect();

    // Fix the coefficient of the last difference to 1 and solve
    // min || u_4 + sum_{i<4} c_i u_i || for the rest.
    let mut m = Matrix4::<f64>::zeros();
    for (col, diff) in u.iter().take(4).enumerate() {
        m.set_column(col, diff);
    }
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 || smax.is_nan() {
        return None;
    }
    let c = svd.solve(&(-u[4]), smax * 1e-12).ok()?;
    if !c.iter().all(|v| v.is_finite()) {
        return None;
    }

    // Polynomial coefficients a = (c, 1); the weights gamma = a / sum(a).
    let denom = 1.0 + c.iter().sum::<f64>();
    if !denom.is_finite() || denom.abs() < 1e-10 {
        return None;
    }
    let mut out = window[4] / denom;
    for i in 0..4 {
        out += window[i] * (c[i] / denom);
    }
    Some(out)
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub iteration: IterationOptions,
    /// Maximum allowed disagreement between the two routes.
    pub route_tol: f64,
    /// Trajectory samples per stroke.
    pub samples_per_segment: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            iteration: IterationOptions::default(),
            route_tol: 1e-6,
            samples_per_segment: 200,
        }
    }
}

/// One sampled point along the steady-state trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CyclePoint {
    pub time: f64,
    pub label: SegmentLabel,
    pub omega: f64,
    pub omega_big: f64,
    pub state: StateVector,
    pub s_vn: f64,
    pub s_e: f64,
    pub coherence: f64,
}

/// The periodic steady state of a cycle, with everything downstream needs:
/// anchor and switch-point states, spectrum, decay rate, and a sampled
/// trajectory.
#[derive(Debug, Clone)]
pub struct LimitCycle {
    pub params: CycleParams,
    pub dephased: bool,
    /// Steady state at the start of the cold isochore.
    pub anchor: StateVector,
    /// States at the five switch points: start, after each stroke in order;
    /// the last one closes the loop back at the anchor.
    pub endpoints: [StateVector; 5],
    pub spectrum: [Complex64; 5],
    /// Modulus of the second-largest eigenvalue: transient contraction per cycle.
    pub lambda2_modulus: f64,
    /// Transient decay rate per unit time, `-ln|lambda_2| / tau_cycle`.
    pub convergence_rate: f64,
    /// How far one more period moves the anchor (should be roundoff).
    pub closure_defect: f64,
    /// Disagreement between the linear-algebra and iterative anchors.
    pub route_delta: f64,
    pub iteration_cycles: u64,
    pub iteration_accelerated: bool,
    pub trajectory: Vec<CyclePoint>,
}

impl LimitCycle {
    /// State entering the labelled stroke.
    pub fn state_entering(&self, label: SegmentLabel) -> StateVector {
        self.endpoints[label as usize]
    }

    /// State leaving the labelled stroke.
    pub fn state_leaving(&self, label: SegmentLabel) -> StateVector {
        self.endpoints[label as usize + 1]
    }
}

/// Solve the limit cycle by both routes, cross-check them, and sample the
/// steady-state trajectory.
pub fn solve_limit_cycle(global: &GlobalPropagator, opts: &SolveOptions) -> Result<LimitCycle> {
    let eigen = anchor_eigen(global)?;
    let iter = anchor_iterative(global, &opts.iteration)?;
    let route_delta = eigen.distance(&iter.anchor);
    if route_delta > opts.route_tol {
        return Err(Error::RouteMismatch { delta: route_delta, tol: opts.route_tol });
    }
    // With the decoherence gate in force the anchor is exactly diagonal;
    // scrub the least-squares residue so downstream sees clean zeros.
    let anchor = if global.dephased { eigen.dephased() } else { eigen };

    let spectrum = global.spectrum()?;
    let lambda2_modulus = spectrum[1].norm();
    let convergence_rate = if lambda2_modulus > 0.0 {
        -lambda2_modulus.ln() / global.params.tau_cycle
    } else {
        f64::INFINITY
    };

    let gate_applies = global.dephased;
    let mut endpoints = [anchor; 5];
    for (i, seg) in global.segments.iter().enumerate() {
        let mut next = seg.propagator.apply(&endpoints[i]);
        if gate_applies {
            next = next.dephased();
        }
        endpoints[i + 1] = next;
    }
    let closure_defect = endpoints[4].distance(&anchor);

    let trajectory = sample_trajectory(global, &anchor, opts.samples_per_segment)?;

    Ok(LimitCycle {
        params: global.params,
        dephased: global.dephased,
        anchor,
        endpoints,
        spectrum,
        lambda2_modulus,
        convergence_rate,
        closure_defect,
        route_delta,
        iteration_cycles: iter.cycles,
        iteration_accelerated: iter.accelerated,
        trajectory,
    })
}

/// Walk the steady state through all four strokes with `n` samples per
/// stroke (plus a closing sample), recording entropies and coherence at
/// each point.
pub fn sample_trajectory(
    global: &GlobalPropagator,
    anchor: &StateVector,
    n: usize,
) -> Result<Vec<CyclePoint>> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            field: "samples_per_segment",
            reason: format!("{n} is too few; need at least 2"),
        });
    }
    let mut points = Vec::with_capacity(4 * n + 1);
    let mut state = *anchor;

    let point = |time: f64,
                 label: SegmentLabel,
                 omega: f64,
                 omega_big: f64,
                 state: &StateVector|
     -> Result<CyclePoint> {
        let rho = reconstruct_density(state, omega_big)?;
        Ok(CyclePoint {
            time,
            label,
            omega,
            omega_big,
            state: *state,
            s_vn: von_neumann_entropy(&rho)?,
            s_e: energy_entropy(&rho)?,
            coherence: coherence_measure(&rho),
        })
    };

    for seg in &global.segments {
        let dt = seg.propagator.duration / n as f64;
        match seg.propagator.kind {
            SegmentKind::Isochore | SegmentKind::Identity => {
                let (spec_omega, spec) = match seg.label {
                    SegmentLabel::ColdIsochore => (
                        global.params.omega_cold,
                        IsochoreSpec {
                            omega: global.params.omega_cold,
                            j_coupling: global.params.j_coupling,
                            temperature: global.params.t_cold,
                            k_down: global.params.k_down_cold,
                            duration: dt,
                        },
                    ),
                    SegmentLabel::HotIsochore => (
                        global.params.omega_hot,
                        IsochoreSpec {
                            omega: global.params.omega_hot,
                            j_coupling: global.params.j_coupling,
                            temperature: global.params.t_hot,
                            k_down: global.params.k_down_hot,
                            duration: dt,
                        },
                    ),
                    // Identity adiabat of a degenerate cycle: field parked
                    // at the common value, nothing evolves.
                    _ => (
                        global.params.omega_cold,
                        IsochoreSpec {
                            omega: global.params.omega_cold,
                            j_coupling: global.params.j_coupling,
                            temperature: 1.0,
                            k_down: 0.0,
                            duration: dt,
                        },
                    ),
                };
                let omega_big = spec.omega_big();
                let sub = if seg.propagator.kind == SegmentKind::Identity {
                    identity_propagator(dt)
                } else {
                    isochore_propagator(&spec)?
                };
                for k in 0..n {
                    points.push(point(
                        seg.start_time + k as f64 * dt,
                        seg.label,
                        spec_omega,
                        omega_big,
                        &state,
                    )?);
                    state = sub.apply(&state);
                }
            }
            SegmentKind::Adiabat => {
                let (w_start, w_end) = match seg.label {
                    SegmentLabel::Compression => {
                        (global.params.omega_cold, global.params.omega_hot)
                    }
                    _ => (global.params.omega_hot, global.params.omega_cold),
                };
                let whole = AdiabatSpec {
                    omega_start: w_start,
                    omega_end: w_end,
                    j_coupling: global.params.j_coupling,
                    duration: seg.propagator.duration,
                };
                for k in 0..n {
                    let (w0, om0) = whole.omega_at(k as f64 * dt);
                    let (w1, _) = whole.omega_at((k + 1) as f64 * dt);
                    points.push(point(
                        seg.start_time + k as f64 * dt,
                        seg.label,
                        w0,
                        om0,
                        &state,
                    )?);
                    let sub = adiabat_propagator(&AdiabatSpec {
                        omega_start: w0,
                        omega_end: w1,
                        j_coupling: global.params.j_coupling,
                        duration: dt,
                    })?;
                    state = sub.apply(&state);
                }
            }
        }
        if global.dephased {
            state = state.dephased();
        }
    }

    // Closing sample: back at the anchor's field value.
    let omega_big = global.params.omega_cold.hypot(global.params.j_coupling);
    points.push(point(
        global.params.tau_cycle,
        SegmentLabel::Expansion,
        global.params.omega_cold,
        omega_big,
        &state,
    )?);
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn reference() -> GlobalPropagator {
        assemble_global(&CycleParams::paper_family(), &AssembleOptions::default()).unwrap()
    }

    #[test]
    fn global_matrix_is_product_of_segments() {
        let g = reference();
        let mut expect = M5::identity();
        for seg in &g.segments {
            expect = seg.propagator.matrix * expect;
        }
        assert!((g.matrix - expect).amax() == 0.0);
        assert!(!g.dephased);
        assert!(!g.degenerate_adiabats);
        assert!(!g.commuting_segments);
    }

    #[test]
    fn segment_order_and_timing() {
        let g = reference();
        let labels: Vec<_> = g.segments.iter().map(|s| s.label).collect();
        assert_eq!(labels, SegmentLabel::ALL);
        let d = g.params.durations();
        assert_abs_diff_eq!(g.segments[1].start_time, d[0], epsilon = 1e-15);
        assert_abs_diff_eq!(
            g.segments[3].start_time + g.segments[3].propagator.duration,
            g.params.tau_cycle,
            epsilon = 1e-12
        );
    }

    #[test]
    fn spectrum_leads_with_unit_eigenvalue_and_contracts() {
        let g = reference();
        let spec = g.spectrum().unwrap();
        assert_abs_diff_eq!(spec[0].norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[0].im, 0.0, epsilon = 1e-12);
        for ev in &spec[1..] {
            assert!(ev.norm() < 1.0, "non-contracting eigenvalue {ev}");
        }
    }

    #[test]
    fn both_anchor_routes_agree() {
        let g = reference();
        let eigen = anchor_eigen(&g).unwrap();
        let iter = anchor_iterative(&g, &IterationOptions::default()).unwrap();
        assert!(
            eigen.distance(&iter.anchor) < 1e-8,
            "routes differ by {:e}",
            eigen.distance(&iter.anchor)
        );

        // Plain power iteration (no extrapolation) must land in the same place.
        let plain = anchor_iterative(
            &g,
            &IterationOptions { accelerate: false, ..IterationOptions::default() },
        )
        .unwrap();
        assert!(!plain.accelerated);
        assert!(eigen.distance(&plain.anchor) < 1e-9);
        // Extrapolation must actually be cheaper on this strongly mixing cycle.
        assert!(iter.cycles <= plain.cycles);
    }

    #[test]
    fn anchor_is_a_fixed_point() {
        let g = reference();
        let lc = solve_limit_cycle(&g, &SolveOptions::default()).unwrap();
        let after = StateVector::from_vector(&{
            let mut v = g.matrix * lc.anchor.to_vector();
            v[4] = 1.0;
            v
        });
        assert!(after.distance(&lc.anchor) < 1e-12);
        assert!(lc.closure_defect < 1e-12);
        assert!(lc.route_delta < 1e-8);
        assert!(lc.lambda2_modulus < 1.0);
        assert!(lc.convergence_rate > 0.0);
    }

    #[test]
    fn endpoints_chain_through_the_strokes() {
        let g = reference();
        let lc = solve_limit_cycle(&g, &SolveOptions::default()).unwrap();
        let mut s = lc.anchor;
        for (i, seg) in g.segments.iter().enumerate() {
            assert_eq!(lc.endpoints[i], lc.state_entering(seg.label));
            s = seg.propagator.apply(&s);
            assert_eq!(lc.endpoints[i + 1], lc.state_leaving(seg.label));
            assert!(s.distance(&lc.endpoints[i + 1]) < 1e-15);
        }
    }

    #[test]
    fn trajectory_samples_cover_the_period_and_close() {
        let g = reference();
        let lc = solve_limit_cycle(&g, &SolveOptions::default()).unwrap();
        let tr = &lc.trajectory;
        assert_eq!(tr.len(), 4 * 200 + 1);
        assert_eq!(tr[0].time, 0.0);
        assert_relative_eq!(tr.last().unwrap().time, g.params.tau_cycle, max_relative = 1e-12);
        assert!(tr.windows(2).all(|w| w[1].time > w[0].time));
        // Closing state returns to the anchor.
        assert!(tr.last().unwrap().state.distance(&lc.anchor) < 1e-9);
        // Segment switch states match the endpoint chain.
        let b = tr.iter().find(|p| p.label == SegmentLabel::Compression).unwrap();
        assert!(b.state.distance(&lc.endpoints[1]) < 1e-9);
        // Field values track the strokes.
        assert_relative_eq!(tr[0].omega, 6.5, max_relative = 1e-12);
        let hot = tr.iter().find(|p| p.label == SegmentLabel::HotIsochore).unwrap();
        assert_relative_eq!(hot.omega, 11.0, max_relative = 1e-9);
        // Entropy ordering holds pointwise.
        assert!(tr.iter().all(|p| p.s_vn <= p.s_e + 1e-12));
    }

    #[test]
    fn dephased_assembly_strips_coherence_at_switches() {
        let g =
            assemble_global(&CycleParams::paper_family(), &AssembleOptions { dephase: true })
                .unwrap();
        assert!(g.dephased);
        let lc = solve_limit_cycle(&g, &SolveOptions::default()).unwrap();
        for endpoint in &lc.endpoints {
            assert_eq!(endpoint.l, 0.0);
            assert_eq!(endpoint.c, 0.0);
        }
        // Between switches coherence is generated freely.
        assert!(lc.trajectory.iter().any(|p| p.coherence > 1e-8));
        // And the trajectory still closes on the anchor.
        assert!(lc.trajectory.last().unwrap().state.distance(&lc.anchor) < 1e-9);
    }

    #[test]
    fn degenerate_cycle_is_pure_heat_conduction() {
        // Equal fields: adiabats collapse to identity, the medium just
        // relaxes alternately toward the two baths. With long contact
        // times the anchor (start of the cold stroke) sits at the *hot*
        // equilibrium and the cold stroke drags it to the cold one.
        let mut p = CycleParams::paper_family();
        p.omega_hot = p.omega_cold;
        p.tau_cycle = 2000.0;
        p.fractions =
            crate::params::TimeFractions::new(0.4999, 0.0001, 0.4999, 0.0001).unwrap();
        let g = assemble_global(&p, &AssembleOptions::default()).unwrap();
        assert!(g.degenerate_adiabats);

        let lc = solve_limit_cycle(&g, &SolveOptions::default()).unwrap();
        let omega_big = p.omega_big_cold();
        let hot_eq = StateVector::gibbs(omega_big, p.t_hot);
        let cold_eq = StateVector::gibbs(omega_big, p.t_cold);
        assert!(
            lc.anchor.distance(&hot_eq) < 1e-6,
            "anchor should sit at hot equilibrium, off by {:e}",
            lc.anchor.distance(&hot_eq)
        );
        assert!(lc.state_leaving(SegmentLabel::ColdIsochore).distance(&cold_eq) < 1e-6);
    }

    #[test]
    fn solver_surfaces_route_mismatch_tolerance() {
        let g = reference();
        // An absurdly tight route tolerance must trip the mismatch error
        // rather than silently pick one answer.
        let opts = SolveOptions { route_tol: 1e-18, ..SolveOptions::default() };
        match solve_limit_cycle(&g, &opts) {
            Err(Error::RouteMismatch { .. }) => {}
            Ok(lc) => {
                // Routes may genuinely coincide to 1e-18 on a fast-mixing
                // cycle; accept but verify.
                assert!(lc.route_delta <= 1e-18);
            }
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let g = reference();
        let err = anchor_iterative(
            &g,
            &IterationOptions { tol: 1e-12, max_cycles: 3, accelerate: false },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SlowConvergence { max_cycles: 3, .. }));
    }

    #[test]
    fn short_cycles_converge_via_extrapolation() {
        // tau = 1e-3 contracts by ~7e-5 per cycle; plain iteration would
        // need ~3e5 cycles, extrapolation a few dozen.
        let p = CycleParams::paper_family().with_tau(1e-3);
        let g = assemble_global(&p, &AssembleOptions::default()).unwrap();
        let lc = solve_limit_cycle(&g, &SolveOptions::default()).unwrap();
        assert!(lc.iteration_accelerated);
        // Plain iteration would need ~6e6 cycles here (contraction 2.8e-6
        // per cycle); the extrapolated route needs orders of magnitude less.
        assert!(lc.iteration_cycles < 100_000, "took {} cycles", lc.iteration_cycles);
        assert!(lc.closure_defect < 1e-10);
    }
}
