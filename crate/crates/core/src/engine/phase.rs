use std::f64::consts::PI;

use crate::params::LaserParams;
use crate::Result;

/// New phase after a spontaneously emitted photon with direction `theta`
/// joins a field of `n_a` photons at phase `phi`.
///
/// The field `√n_a e^{iφ}` takes a unit step `e^{iθ}`; the returned value is
/// the direction of the sum, unwrapped to lie within π of `phi`. The caller
/// then sets the amplitude to `√(n_a + 1)`.
pub fn phase_kick(n_a: u64, phi: f64, theta: f64) -> f64 {
    let rel = theta - phi;
    let kick = rel.sin().atan2((n_a as f64).sqrt() + rel.cos());
    debug_assert!(kick.abs() <= PI);
    phi + kick
}

/// Phase advanced by the carrier-induced drift `α γ_r n_e dt`.
pub fn lef_drift(phi: f64, n_e: u32, params: &LaserParams, dt: f64) -> Result<f64> {
    Ok(phi + params.alpha * params.gamma_r()? * f64::from(n_e) * dt)
}

/// Wraps an angle into `(−π, π]`.
#[cfg(test)]
pub(crate) fn wrap(angle: f64) -> f64 {
    let r = angle.rem_euclid(std::f64::consts::TAU);
    if r > PI {
        r - std::f64::consts::TAU
    } else {
        r
    }
}
