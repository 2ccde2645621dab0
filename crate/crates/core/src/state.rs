use nalgebra::{Matrix4, Vector5};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues this far below zero are treated as roundoff and clipped;
/// anything lower is a genuine positivity violation.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Expectation values that close under the cycle dynamics: energy `E`,
/// the two quadratures `L` and `C` that rotate into `E` while the field
/// moves, and the invariant-sector component `D`. Together with a constant
/// unit component they form the 5-vector `(E, L, C, D, 1)` on which every
/// stroke acts linearly.
///
/// Coherence in the instantaneous energy basis lives entirely in `L` and
/// `C`; a state with `l == c == 0` is diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub e: f64,
    pub l: f64,
    pub c: f64,
    pub d: f64,
}

impl StateVector {
    /// The maximally mixed state: every expectation value vanishes.
    pub const MAXIMALLY_MIXED: Self = Self { e: 0.0, l: 0.0, c: 0.0, d: 0.0 };

    /// Thermal equilibrium at dressed frequency `omega_big` and temperature
    /// `temperature`. The energy is negative (ground level `-Omega` holds
    /// the largest population) and `D` settles at `E^2 / Omega`.
    pub fn gibbs(omega_big: f64, temperature: f64) -> Self {
        let th = (omega_big / (2.0 * temperature)).tanh();
        Self { e: -omega_big * th, l: 0.0, c: 0.0, d: omega_big * th * th }
    }

    pub fn to_vector(self) -> Vector5<f64> {
        Vector5::new(self.e, self.l, self.c, self.d, 1.0)
    }

    /// Rebuild from a propagated 5-vector. The unit component must have
    /// survived propagation exactly (all generators leave it untouched).
    pub fn from_vector(v: &Vector5<f64>) -> Self {
        debug_assert!((v[4] - 1.0).abs() < 1e-12, "unit component drifted to {}", v[4]);
        Self { e: v[0], l: v[1], c: v[2], d: v[3] }
    }

    /// Project out the energy-basis coherences.
    pub fn dephased(self) -> Self {
        Self { l: 0.0, c: 0.0, ..self }
    }

    pub fn is_finite(&self) -> bool {
        self.e.is_finite() && self.l.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Max-norm distance between two states.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.e - other.e)
            .abs()
            .max((self.l - other.l).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }
}

/// The 4x4 density matrix of the spin pair in the instantaneous energy
/// eigenbasis, ordered `(-Omega, 0, 0, +Omega)`. Only five real entries are
/// nonzero: the four populations and the corner coherence connecting the
/// two extreme levels.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<Complex64>,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    /// Populations in level order `(-Omega, 0, 0, +Omega)`.
    pub fn populations(&self) -> [f64; 4] {
        [self.m[(0, 0)].re, self.m[(1, 1)].re, self.m[(2, 2)].re, self.m[(3, 3)].re]
    }

    /// Corner coherence `<-Omega| rho |+Omega>`.
    pub fn corner(&self) -> Complex64 {
        self.m[(0, 3)]
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }

    /// All four eigenvalues in closed form. The two middle levels are
    /// untouched by the dynamics; the extreme levels mix through the corner
    /// coherence only, so the spectrum is that of a 2x2 block plus a
    /// doubly-degenerate population.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let [p_lo, p_mid, _, p_hi] = self.populations();
        let half_gap = 0.5 * (p_hi - p_lo);
        let split = (half_gap * half_gap + self.corner().norm_sqr()).sqrt();
        let mean = 0.5 * (p_lo + p_hi);
        [mean - split, p_mid, p_mid, mean + split]
    }
}

/// Map a state vector back to its density matrix at dressed frequency
/// `omega_big`. This is the single bridge between the expectation-value
/// picture and the operator picture; entropies and the coherence measure
/// are all defined through it.
pub fn reconstruct_density(state: &StateVector, omega_big: f64) -> Result<DensityMatrix> {
    if !(omega_big.is_finite() && omega_big > 0.0) {
        return Err(Error::InvalidParameter {
            field: "omega_big",
            reason: format!("{omega_big} must be positive and finite"),
        });
    }
    if !state.is_finite() {
        return Err(Error::Numeric("state vector has non-finite components".into()));
    }
    let (e, l, c, d) = (state.e, state.l, state.c, state.d);
    let p_lo = 0.25 * (1.0 + (d - 2.0 * e) / omega_big);
    let p_mid = 0.25 * (1.0 - d / omega_big);
    let p_hi = 0.25 * (1.0 + (d + 2.0 * e) / omega_big);
    let w = Complex64::new(l, c) / (2.0 * omega_big);

    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let m = Matrix4::new(
        re(p_lo),
        zero,
        zero,
        w,
        zero,
        re(p_mid),
        zero,
        zero,
        zero,
        zero,
        re(p_mid),
        zero,
        w.conj(),
        zero,
        zero,
        re(p_hi),
    );
    Ok(DensityMatrix { m })
}

fn entropy_of_probabilities(ps: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut s = 0.0;
    for p in ps {
        if p < -POSITIVITY_TOL {
            return Err(Error::PositivityViolation { value: p });
        }
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s)
}

/// Von Neumann entropy `-tr(rho ln rho)` from the closed-form spectrum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_probabilities(rho.eigenvalues())
}

/// Entropy of the population distribution alone (the energy measurement
/// record). Always at least the von Neumann entropy; the two coincide
/// exactly when the corner coherence vanishes.
pub fn energy_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_probabilities(rho.populations())
}

/// Scale-free coherence measure `(L^2 + C^2) / Omega^2`, computed from the
/// reconstructed matrix as `4 |corner|^2`. Equals twice the Hilbert-Schmidt
/// distance `tr{(rho - rho_diag)^2}` between the state and its dephased
/// projection.
pub fn coherence_measure(rho: &DensityMatrix) -> f64 {
    4.0 * rho.corner().norm_sqr()
}

/// Draw a physically valid state at the given splitting, for stress tests
/// and the runtime self-checks.
pub fn random_valid_state(rng: &mut impl rand::Rng, omega_big: f64) -> StateVector {
    // Draw populations first, then a corner small enough to keep the 2x2
    // block positive; invert the reconstruction map.
    let g_lo: f64 = rng.random_range(0.05..1.0);
    let g_mid: f64 = rng.random_range(0.05..1.0);
    let g_hi: f64 = rng.random_range(0.05..1.0);
    let z = g_lo + 2.0 * g_mid + g_hi;
    let (p_lo, p_hi) = (g_lo / z, g_hi / z);
    let r = rng.random_range(0.0..0.95) * (p_lo * p_hi).sqrt();
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    StateVector {
        e: omega_big * (p_hi - p_lo),
        l: 2.0 * omega_big * r * phase.cos(),
        c: 2.0 * omega_big * r * phase.sin(),
        d: omega_big * (2.0 * (p_lo + p_hi) - 1.0),
    }
}
