//! Estimators computed from field trajectories: photon statistics, the
//! first-order coherence `g1(τ)`, the emission spectrum and the linewidth.
//!
//! Frequencies are angular, in ps⁻¹. The spectrum uses the kernel
//! `e^{−iωτ}`, so a field rotating as `e^{iΩt}` peaks at `ω = +Ω`.

mod correlation;
mod drift;
mod fit;
mod linewidth;
mod spectrum;
mod stats;

pub use correlation::{g1, g1_from_fields, AutocorrelationEstimate, CorrelationAccumulator};
pub use drift::subtract_mean_drift;
pub use fit::{linear_fit, LinearFit};
pub use linewidth::{
    ensemble_linewidth, linewidth, linewidth_with, lorentzian_fit, suggested_max_lag, EnsembleLinewidth,
    LinewidthEstimate, LinewidthMethod, LinewidthOptions, LinewidthReport,
};
pub use spectrum::{spectrum, spectrum_with, SpectrumEstimate, SpectrumOptions, Window};
pub use stats::{photon_statistics, PhotonStatistics};
