//! Physical configuration of the laser.
//!
//! All rates are in ps⁻¹ (numerically equal to THz). `pump` is the pump rate
//! per emitter; the total pump of the device is `n0 * pump`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserParams {
    /// Light-matter coupling rate.
    pub g: f64,
    /// Cavity decay rate.
    pub kappa: f64,
    /// Non-radiative plus non-lasing-mode decay per emitter.
    pub gamma_a: f64,
    /// Pure dephasing per emitter.
    pub gamma_d: f64,
    /// Number of emitters.
    pub n0: u32,
    /// Pump rate per emitter.
    pub pump: f64,
    /// Linewidth enhancement factor.
    #[serde(default)]
    pub alpha: f64,
}

impl LaserParams {
    /// Photonic-crystal quantum-dot laser: five emitters, `g = 0.1`,
    /// `κ = 0.04`, `γ_A = 0.012`, `γ_D = 1`, `α = 0`.
    pub fn photonic_crystal(pump: f64) -> Self {
        Self {
            g: 0.1,
            kappa: 0.04,
            gamma_a: 0.012,
            gamma_d: 1.0,
            n0: 5,
            pump,
            alpha: 0.0,
        }
    }

    /// Thousand-emitter device with `γ_A = 0.27` and `κ = 0.1`.
    pub fn macroscopic_high_q(pump: f64, alpha: f64) -> Self {
        Self {
            n0: 1000,
            gamma_a: 0.27,
            kappa: 0.1,
            alpha,
            ..Self::photonic_crystal(pump)
        }
    }

    /// Thousand-emitter device with `γ_A = 0.27` and `κ = 2`.
    pub fn macroscopic_low_q(pump: f64, alpha: f64) -> Self {
        Self {
            kappa: 2.0,
            ..Self::macroscopic_high_q(pump, alpha)
        }
    }

    pub fn with_pump(self, pump: f64) -> Self {
        Self { pump, ..self }
    }

    pub fn with_emitters(self, n0: u32) -> Self {
        Self { n0, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma_a", self.gamma_a),
            ("gamma_d", self.gamma_d),
            ("pump", self.pump),
            ("alpha", self.alpha),
        ];
        for (name, value) in rates {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and non-negative, got {value}"),
                });
            }
        }
        if self.n0 == 0 {
            return Err(Error::InvalidParameter {
                name: "n0",
                reason: "at least one emitter is required".into(),
            });
        }
        Ok(())
    }

    /// Total polarization dephasing `P + κ + γ_D + γ_A`.
    pub fn total_dephasing(&self) -> f64 {
        self.pump + self.kappa + self.gamma_d + self.gamma_a
    }

    /// Emitter-cavity coupling rate `γ_r = 4g² / (P + κ + γ_D + γ_A)`,
    /// evaluated at the current per-emitter pump.
    pub fn gamma_r(&self) -> Result<f64> {
        let denom = self.total_dephasing();
        if !(denom > 0.0) {
            return Err(Error::UndefinedCoupling);
        }
        Ok(4.0 * self.g * self.g / denom)
    }

    /// Total pump `n0 · P`, the quantity usually put on the pump axis.
    pub fn total_pump(&self) -> f64 {
        f64::from(self.n0) * self.pump
    }

    /// Whether the polarization can be adiabatically eliminated,
    /// i.e. `g < P + κ + γ_D + γ_A`.
    pub fn validity(&self) -> ValidityReport {
        let margin = if self.g == 0.0 {
            f64::INFINITY
        } else {
            self.total_dephasing() / self.g
        };
        let valid = margin > 1.0;
        if !valid {
            log::warn!("adiabatic elimination questionable: dephasing/g = {margin:.3}");
        }
        ValidityReport {
            valid,
            margin,
            warning: !valid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    /// `(P + κ + γ_D + γ_A) / g`; infinite for `g = 0`.
    pub margin: f64,
    pub warning: bool,
}
