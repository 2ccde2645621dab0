use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of the total cycle time spent in each stroke, in traversal
/// order: cold isochore, compression adiabat (cold -> hot frequency), hot
/// isochore, expansion adiabat (hot -> cold frequency).
///
/// Fractions must each lie in (0, 1) and sum to 1 within 1e-9. Scaling the
/// cycle time never changes the split, only the overall duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeFractions {
    pub cold: f64,
    pub compression: f64,
    pub hot: f64,
    pub expansion: f64,
}

impl TimeFractions {
    pub fn new(cold: f64, compression: f64, hot: f64, expansion: f64) -> Result<Self> {
        let f = Self { cold, compression, hot, expansion };
        f.validate()?;
        Ok(f)
    }

    /// Normalize an almost-unit split so the sum is exactly 1.
    pub fn normalized(cold: f64, compression: f64, hot: f64, expansion: f64) -> Result<Self> {
        let s = cold + compression + hot + expansion;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter {
                field: "fractions",
                reason: format!("sum {s} is not a positive finite number"),
            });
        }
        Self::new(cold / s, compression / s, hot / s, expansion / s)
    }

    pub fn sum(&self) -> f64 {
        self.cold + self.compression + self.hot + self.expansion
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("fractions.cold", self.cold),
            ("fractions.compression", self.compression),
            ("fractions.hot", self.hot),
            ("fractions.expansion", self.expansion),
        ] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter {
                    field: "fractions",
                    reason: format!("{name} = {v} must lie strictly inside (0, 1)"),
                });
            }
        }
        let s = self.sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter {
                field: "fractions",
                reason: format!("sum = {s:.12} differs from 1 by more than 1e-9"),
            });
        }
        Ok(())
    }
}

/// Complete specification of one four-stroke cycle.
///
/// The working medium is a coupled spin pair with Hamiltonian
/// `H = omega(t) B1 + J B2`; the external field runs between `omega_cold`
/// (in contact with the cold bath at `t_cold`) and `omega_hot` (hot bath at
/// `t_hot`). Bath coupling is parametrised by the downward (de-excitation)
/// rate `k_down`; the upward rate follows from detailed balance,
/// `k_up = k_down * exp(-Omega / T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleParams {
    /// Internal spin-spin coupling; constant over the whole cycle.
    pub j_coupling: f64,
    /// Field value held during the cold isochore.
    pub omega_cold: f64,
    /// Field value held during the hot isochore.
    pub omega_hot: f64,
    pub t_cold: f64,
    pub t_hot: f64,
    /// Downward bath rate on the cold isochore.
    pub k_down_cold: f64,
    /// Downward bath rate on the hot isochore.
    pub k_down_hot: f64,
    /// Total cycle period.
    pub tau_cycle: f64,
    pub fractions: TimeFractions,
}

impl CycleParams {
    /// The bundled reference family (CLI preset `paper-family`): a refrigerator
    /// pumping heat from T = 3.6 to T = 4 across a field stroke 6.5 -> 11 at
    /// J = 1.25, with almost all of the period spent on the two adiabats.
    pub fn paper_family() -> Self {
        Self {
            j_coupling: 1.25,
            omega_cold: 6.5,
            omega_hot: 11.0,
            t_cold: 3.6,
            t_hot: 4.0,
            k_down_cold: 0.0656,
            k_down_hot: 0.36,
            tau_cycle: 0.96527,
            // The nominal split (0.48277, 0.0340, 0.48277, 0.000466) sums to
            // 1.000006; renormalised here so the unit-sum invariant holds.
            fractions: TimeFractions::normalized(0.0340, 0.48277, 0.000466, 0.48277)
                .expect("reference fractions are valid"),
        }
    }

    /// Same parameter set with a different period.
    pub fn with_tau(mut self, tau_cycle: f64) -> Self {
        self.tau_cycle = tau_cycle;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("j_coupling", self.j_coupling),
            ("omega_cold", self.omega_cold),
            ("omega_hot", self.omega_hot),
            ("t_cold", self.t_cold),
            ("t_hot", self.t_hot),
            ("tau_cycle", self.tau_cycle),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("{v} must be positive and finite"),
                });
            }
        }
        for (field, v) in [("k_down_cold", self.k_down_cold), ("k_down_hot", self.k_down_hot)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("{v} must be nonnegative and finite"),
                });
            }
        }
        self.fractions.validate()?;
        Ok(())
    }

    /// Dressed frequency `Omega = sqrt(omega^2 + J^2)` on the cold isochore.
    pub fn omega_big_cold(&self) -> f64 {
        self.omega_cold.hypot(self.j_coupling)
    }

    /// Dressed frequency on the hot isochore.
    pub fn omega_big_hot(&self) -> f64 {
        self.omega_hot.hypot(self.j_coupling)
    }

    /// Necessary condition for refrigeration: the cold-side dressed quantum
    /// must be the smaller in units of its bath temperature,
    /// `Omega_c / T_c < Omega_h / T_h`. Violating it makes cooling impossible
    /// at any speed, but satisfying it does not guarantee cooling.
    pub fn refrigerator_condition_met(&self) -> bool {
        self.omega_big_cold() / self.t_cold < self.omega_big_hot() / self.t_hot
    }

    /// Stroke durations in traversal order (cold, compression, hot, expansion).
    pub fn durations(&self) -> [f64; 4] {
        [
            self.tau_cycle * self.fractions.cold,
            self.tau_cycle * self.fractions.compression,
            self.tau_cycle * self.fractions.hot,
            self.tau_cycle * self.fractions.expansion,
        ]
    }
}

#[cfg(test)]
mod tests {
    // Reference values below keep every digit of the computation that
    // froze them, beyond what an f64 literal can resolve.
    #![allow(clippy::excessive_precision)]

    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_family_is_valid_and_normalized() {
        let p = CycleParams::paper_family();
        p.validate().unwrap();
        assert!((p.fractions.sum() - 1.0).abs() < 1e-15);
        // Normalisation divides by 1.000006, a 6e-6 relative shift.
        assert_relative_eq!(p.fractions.compression, 0.48277, max_relative = 1e-5);
        assert_relative_eq!(p.fractions.cold, 0.0340, max_relative = 1e-5);
        assert_relative_eq!(p.fractions.expansion, 0.48277, max_relative = 1e-5);
        assert_relative_eq!(p.fractions.hot, 0.000466, max_relative = 1e-5);
    }

    #[test]
    fn dressed_frequencies() {
        let p = CycleParams::paper_family();
        assert_relative_eq!(p.omega_big_cold(), 6.61910114743686327, max_relative = 1e-15);
        assert_relative_eq!(p.omega_big_hot(), 11.0707949127422643, max_relative = 1e-15);
    }

    #[test]
    fn refrigerator_condition_for_reference_family() {
        let p = CycleParams::paper_family();
        // Omega_c/T_c = 1.8386..., Omega_h/T_h = 2.7677...: condition holds.
        assert!(p.refrigerator_condition_met());
        // Cool the cold bath far enough and it must flip.
        let mut q = p;
        q.t_cold = 1.0;
        assert!(!q.refrigerator_condition_met());
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let good = CycleParams::paper_family();

        let mut p = good;
        p.omega_cold = -1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { field: "omega_cold", .. })
        ));

        let mut p = good;
        p.tau_cycle = 0.0;
        assert!(p.validate().is_err());

        let mut p = good;
        p.t_hot = f64::NAN;
        assert!(p.validate().is_err());

        let mut p = good;
        p.k_down_cold = -0.1;
        assert!(p.validate().is_err());

        // Zero rates are allowed: they describe a unitary (decoupled) stroke.
        let mut p = good;
        p.k_down_cold = 0.0;
        p.k_down_hot = 0.0;
        assert!(p.validate().is_ok());

        let mut p = good;
        p.fractions.cold = 0.5;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { field: "fractions", .. })
        ));
    }

    #[test]
    fn fraction_sum_tolerance_is_tight() {
        assert!(TimeFractions::new(0.25, 0.25, 0.25, 0.25 + 2e-9).is_err());
        assert!(TimeFractions::new(0.25, 0.25, 0.25, 0.25 + 0.5e-9).is_ok());
        assert!(TimeFractions::new(0.0, 0.5, 0.25, 0.25).is_err());
    }

    #[test]
    fn durations_scale_with_tau() {
        let p = CycleParams::paper_family().with_tau(2.0);
        let d = p.durations();
        assert_relative_eq!(d.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(d[1], 2.0 * p.fractions.compression, max_relative = 1e-15);
    }

    #[test]
    fn serde_round_trip_rejects_unknown_fields() {
        let p = CycleParams::paper_family();
        let text = serde_json::to_string(&p).unwrap();
        let back: CycleParams = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);

        let bad = text.replace("\"j_coupling\"", "\"j_coupling\":1.25,\"typo_field\"");
        assert!(serde_json::from_str::<CycleParams>(&bad).is_err());
    }
}
