//! Asymptotic analytic linewidths evaluated at the mean-field steady state.
//!
//! These are reference curves valid far from threshold only: the
//! Schawlow-Townes width with the Henry `(1 + α²)` factor well above
//! threshold, and the gain-narrowed cold-cavity width well below.

use crate::mean_field::steady_state;
use crate::params::LaserParams;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticLinewidth {
    /// Angular FWHM in ps⁻¹.
    pub fwhm: f64,
    /// Spontaneous emission rate into the lasing mode, `γ_r n̄_e`.
    pub spontaneous_rate: f64,
    pub mean_photons: f64,
    pub mean_excited: f64,
    pub alpha: f64,
}

/// `Δω = γ_r n̄_e (1 + α²) / (2 n̄_a)`.
pub fn schawlow_townes(params: &LaserParams) -> Result<AnalyticLinewidth> {
    let ss = steady_state(params)?;
    if !(ss.n_a > 0.0) {
        return Err(Error::Undefined("Schawlow-Townes linewidth"));
    }
    let spontaneous_rate = params.gamma_r()? * ss.n_e;
    Ok(AnalyticLinewidth {
        fwhm: spontaneous_rate * (1.0 + params.alpha * params.alpha) / (2.0 * ss.n_a),
        spontaneous_rate,
        mean_photons: ss.n_a,
        mean_excited: ss.n_e,
        alpha: params.alpha,
    })
}

/// Cold-cavity width narrowed by the net gain, `κ − G` with
/// `G = γ_r (2 n̄_e − n0)`.
///
/// At the mean-field steady state `κ − G = γ_r n̄_e / n̄_a` exactly, so the
/// gain never reaches the loss. The reference is refused once `n̄_a ≥ 1`,
/// where stimulated emission into the mode outweighs spontaneous emission
/// and the gain is clamped within `γ_r n̄_e` of the loss.
pub fn below_threshold_reference(params: &LaserParams) -> Result<f64> {
    let ss = steady_state(params)?;
    let gain = params.gamma_r()? * (2.0 * ss.n_e - f64::from(params.n0));
    if gain >= params.kappa || ss.n_a >= 1.0 {
        return Err(Error::NotApplicable(format!(
            "above threshold: n_a = {:.3}, net gain {gain:.4e} clamped at the cavity loss {:.4e}",
            ss.n_a, params.kappa
        )));
    }
    Ok(params.kappa - gain)
}

/// Rough linewidth scale used to pick sampling steps: the cold-cavity width
/// while it is the narrower of the two references, otherwise the
/// Schawlow-Townes width.
pub fn expected_linewidth(params: &LaserParams) -> Result<f64> {
    let st = match schawlow_townes(params) {
        Ok(st) => st.fwhm,
        Err(Error::Undefined(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(match below_threshold_reference(params) {
        Ok(cold) => cold.min(st),
        Err(Error::NotApplicable(_)) => st,
        Err(e) => return Err(e),
    })
}
