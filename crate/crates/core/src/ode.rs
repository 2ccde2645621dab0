//! Direct integration of the stroke equations of motion.
//!
//! This is the ground-truth path for the closed-form propagators: a
//! Dormand-Prince 5(4) integrator applied to the right-hand sides written
//! out longhand, sharing no code with the matrix-exponential route. The
//! self-diagnostics and the test suite drive both paths over the same
//! strokes and require agreement.

use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::segment::{AdiabatSpec, IsochoreSpec};
use crate::state::StateVector;

/// A stroke the integrator knows how to drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Isochore(IsochoreSpec),
    Adiabat(AdiabatSpec),
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match self {
            Segment::Isochore(s) => s.duration,
            Segment::Adiabat(s) => s.duration,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, max_steps: 1_000_000 }
    }
}

type V4 = Vector4<f64>;

/// Integrate one stroke from `initial` over its full duration.
pub fn integrate_segment(
    segment: &Segment,
    initial: &StateVector,
    opts: &IntegratorOptions,
) -> Result<StateVector> {
    match segment {
        Segment::Isochore(spec) => {
            spec.validate()?;
            let (gamma, omega_big, e_eq) = (spec.gamma(), spec.omega_big(), spec.e_eq());
            let rhs = move |_t: f64, y: &V4| {
                V4::new(
                    -gamma * (y[0] - e_eq),
                    -gamma * y[1] - omega_big * y[2],
                    omega_big * y[1] - gamma * y[2],
                    2.0 * gamma * e_eq / omega_big * y[0] - 2.0 * gamma * y[3],
                )
            };
            dopri5(rhs, initial, spec.duration, opts)
        }
        Segment::Adiabat(spec) => {
            spec.validate()?;
            let j = spec.j_coupling;
            let s0 = spec.omega_start / spec.omega_big_start();
            let mu = spec.sweep_rate();
            let rhs = move |t: f64, y: &V4| {
                let s = s0 + mu * j * t;
                let root = (1.0 - s * s).sqrt();
                let omega_big = j / root;
                let omega = j * s / root;
                let stretch = mu * omega * omega_big / j; // d(ln Omega)/dt
                V4::new(
                    stretch * y[0] - mu * omega_big * y[1],
                    mu * omega_big * y[0] + stretch * y[1] - omega_big * y[2],
                    omega_big * y[1] + stretch * y[2],
                    stretch * y[3],
                )
            };
            dopri5(rhs, initial, spec.duration, opts)
        }
    }
}

/// Dormand-Prince 5(4) with standard step-size control.
fn dopri5(
    rhs: impl Fn(f64, &V4) -> V4,
    initial: &StateVector,
    duration: f64,
    opts: &IntegratorOptions,
) -> Result<StateVector> {
    let mut t = 0.0;
    let mut y = V4::new(initial.e, initial.l, initial.c, initial.d);
    let mut h = duration * 1e-3;
    let h_floor = duration * 1e-15;
    let mut k1 = rhs(t, &y); // FSAL across accepted steps

    for _ in 0..opts.max_steps {
        if t >= duration {
            return Ok(StateVector { e: y[0], l: y[1], c: y[2], d: y[3] });
        }
        h = h.min(duration - t);

        let k2 = rhs(t + h / 5.0, &(y + k1 * (h / 5.0)));
        let k3 = rhs(t + 3.0 * h / 10.0, &(y + (k1 * 3.0 + k2 * 9.0) * (h / 40.0)));
        let k4 = rhs(
            t + 4.0 * h / 5.0,
            &(y + (k1 * (44.0 / 45.0) + k2 * (-56.0 / 15.0) + k3 * (32.0 / 9.0)) * h),
        );
        let k5 = rhs(
            t + 8.0 * h / 9.0,
            &(y + (k1 * (19372.0 / 6561.0)
                + k2 * (-25360.0 / 2187.0)
                + k3 * (64448.0 / 6561.0)
                + k4 * (-212.0 / 729.0))
                * h),
        );
        let k6 = rhs(
            t + h,
            &(y + (k1 * (9017.0 / 3168.0)
                + k2 * (-355.0 / 33.0)
                + k3 * (46732.0 / 5247.0)
                + k4 * (49.0 / 176.0)
                + k5 * (-5103.0 / 18656.0))
                * h),
        );
        let y_next = y
            + (k1 * (35.0 / 384.0)
                + k3 * (500.0 / 1113.0)
                + k4 * (125.0 / 192.0)
                + k5 * (-2187.0 / 6784.0)
                + k6 * (11.0 / 84.0))
                * h;
        let k7 = rhs(t + h, &y_next);

        // Difference between the 5th- and embedded 4th-order solutions.
        let err_vec = (k1 * (71.0 / 57600.0)
            + k3 * (-71.0 / 16695.0)
            + k4 * (71.0 / 1920.0)
            + k5 * (-17253.0 / 339200.0)
            + k6 * (22.0 / 525.0)
            + k7 * (-1.0 / 40.0))
            * h;

        let mut err = 0.0_f64;
        for i in 0..4 {
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_next[i].abs());
            err += (err_vec[i] / scale).powi(2);
        }
        err = (err / 4.0).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_next;
            k1 = k7;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        if h < h_floor {
            return Err(Error::Integrator(format!(
                "step size collapsed to {h:e} at t = {t:e} (duration {duration:e})"
            )));
        }
    }
    Err(Error::Integrator(format!(
        "exceeded {} steps at t = {t:e} of {duration:e}",
        opts.max_steps
    )))
}
