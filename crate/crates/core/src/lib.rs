//! Stochastic simulation of nanolaser quantum noise.
//!
//! The laser is modelled as a birth-death process on the integer photon
//! number `n_a` and excited-emitter number `n_e`, with a phase variable that
//! is kicked by spontaneously emitted photons and dragged by the
//! linewidth-enhancement factor. From sampled field trajectories the crate
//! estimates photon statistics, the first-order coherence, the emission
//! spectrum and the linewidth.
//!
//! Two independent references are included:
//!
//! * [`master`]: a dense Lindblad master equation for up to three emitters,
//!   with spectra obtained through the quantum regression theorem.
//! * [`comparator`]: asymptotic analytic linewidths (Schawlow-Townes with the
//!   Henry factor above threshold, gain-narrowed cavity width below).

pub mod comparator;
pub mod engine;
mod error;
pub mod export;
pub mod master;
pub mod mean_field;
pub mod observables;
pub mod params;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use comparator::{below_threshold_reference, schawlow_townes, AnalyticLinewidth};
pub use engine::{
    run_ensemble, simulate, simulate_with, EventKind, FieldTrajectory, Harness, RateSet,
    SimConfig, SystemState,
};
pub use mean_field::{inversion_pump, steady_state, MeanFieldState};
pub use observables::{
    g1, linewidth, photon_statistics, spectrum, AutocorrelationEstimate, LinewidthEstimate,
    LinewidthMethod, PhotonStatistics, SpectrumEstimate,
};
pub use params::{LaserParams, ValidityReport};
