//! Simulation core for a four-stroke Otto refrigerator whose working medium
//! is a pair of coupled spins.
//!
//! The medium Hamiltonian is `H(t) = omega(t) * B1 + J * B2` with a fixed
//! internal coupling `J` and an externally driven field `omega`. The two
//! operators do not commute, so driving `omega` generates coherence. The
//! spectrum of `H` is `{-Omega, 0, 0, +Omega}` with `Omega = sqrt(omega^2 + J^2)`.
//!
//! Everything observable about the cycle lives in a five-component state
//! vector `(E, L, C, D, 1)`:
//!
//! * `E` — energy, the expectation of `H`,
//! * `L`, `C` — the two quadratures completing `H` into a closed operator set,
//! * `D` — the expectation of the second Casimir-like invariant combination,
//! * the trailing `1` makes inhomogeneous (pumping) terms linear.
//!
//! Propagation of every stroke is an exact 5x5 matrix exponential, so a full
//! cycle is a single affine map and its limit cycle is an eigenvector
//! problem. Units: `hbar = k_B = 1` throughout.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] — cycle parameter set, validation, the bundled reference family;
//! * [`state`] — state vector, density-matrix reconstruction, entropies;
//! * [`expm`] — dense 5x5 matrix exponential (spectral route with a
//!   scaling-and-squaring fallback);
//! * [`segment`] — generators and closed-form propagators for the two stroke
//!   types, and frictionless quantization times;
//! * [`ode`] — adaptive Runge-Kutta integration of the equations of motion,
//!   kept as an independent cross-check of the propagators;
//! * [`cycle`] — global propagator assembly, limit-cycle solver (spectral and
//!   iterative routes), trajectory sampling;
//! * [`observables`] — heats, work, entropy production, cycle classification,
//!   dynamical temperature, entropy-coordinate geometry;
//! * [`sweep`] — cycle-time sweeps, operating-mode transition refinement,
//!   quantized landmark times;
//! * [`checks`] — self-diagnostics used by the CLI `validate` mode.

pub mod checks;
pub mod cycle;
pub mod error;
pub mod expm;
pub mod observables;
pub mod ode;
pub mod params;
pub mod segment;
pub mod state;
pub mod sweep;

pub use checks::{all_passed, run_validation, CheckOutcome, CheckStatus, ValidationOptions};
pub use cycle::{
    assemble_global, solve_limit_cycle, AssembleOptions, CyclePoint, GlobalPropagator,
    IterationOptions, LimitCycle, SegmentLabel, SolveOptions,
};
pub use error::{Error, Result};
pub use observables::{
    classify, classify_geometry, cycle_report, dynamical_temperature_profile, heats,
    CycleClass, CycleReport, GeometryClass, Heats, IsochoreSide, TemperatureProfile,
};
pub use params::{CycleParams, TimeFractions};
pub use state::{DensityMatrix, StateVector};
pub use sweep::{
    annotate_landmarks, find_transitions, landmark_times, refine_transition, run_sweep,
    Landmark, SweepRecord, SweepSpec, TauSpacing, Transition, TransitionReport,
};
