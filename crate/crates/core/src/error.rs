use thiserror::Error;

/// Everything that can go wrong between a parameter set and a cycle report.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation (non-positive frequency, bad fractions, ...).
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// A reconstructed density matrix had an eigenvalue below the tolerance
    /// band around zero; the state vector left the physical region.
    #[error("density matrix eigenvalue {value:e} is negative beyond tolerance")]
    PositivityViolation { value: f64 },

    /// A zero-span adiabat was requested: the sweep rate is undefined when
    /// the field does not move. Use an identity propagator for this stroke.
    #[error("adiabat with omega_start == omega_end ({omega}): sweep rate undefined; use an identity stroke")]
    DegenerateAdiabat { omega: f64 },

    /// Frictionless times exist only for winding numbers large enough that
    /// the rotation can complete: 2*pi*l must exceed the swept arc.
    #[error("no frictionless time for l = {l}: 2*pi*l = {two_pi_l:e} does not exceed |Phi| = {phi:e}")]
    QuantizationDomain { l: f64, two_pi_l: f64, phi: f64 },

    /// Fixed-point iteration hit the cycle cap before reaching tolerance.
    #[error("limit-cycle iteration did not converge within {max_cycles} cycles (|lambda_2| = {lambda2})")]
    SlowConvergence { max_cycles: u64, lambda2: f64 },

    /// The spectral and iterative limit-cycle routes disagree.
    #[error("limit-cycle routes disagree by {delta:e} (tolerance {tol:e})")]
    RouteMismatch { delta: f64, tol: f64 },

    /// Observables were requested for a limit cycle solved from different
    /// parameters than the ones supplied.
    #[error("limit cycle is stale: solved for different parameters than supplied")]
    StaleCycle,

    /// Root bracketing / refinement failed.
    #[error("root refinement failed: {0}")]
    Bracket(String),

    /// Linear algebra gave up (lost invariant direction, singular solve, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The adaptive integrator could not meet its local error target.
    #[error("integrator failure: {0}")]
    Integrator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
