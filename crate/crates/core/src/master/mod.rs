//! Lindblad master-equation reference for up to three emitters.
//!
//! The Jaynes-Cummings Hamiltonian `g Σ_j (a†σ_j⁻ + aσ_j⁺)` is taken on
//! resonance in the rotating frame, with cavity loss, incoherent pump,
//! emitter decay and pure dephasing as jump operators. Both the coupling and
//! the dissipators conserve the difference between the excitation numbers of
//! the two sides of `ρ`, so the generator is block diagonal in that
//! difference: the steady state lives in block 0 and the field correlation
//! `⟨a†(t) a(t+τ)⟩` in block −1.

mod density;
mod generator;
mod hilbert;
mod regression;
mod steady;

pub use density::{g2_zero_me, DensityOperator};
pub use generator::{build_generator, Generator};
pub use hilbert::{HilbertConfig, MAX_EMITTERS, MAX_FOCK};
pub use regression::{spectrum_me, MeCoherence};
pub use steady::{
    initial_truncation, solve_from, solve_steady_state, steady_state_density, MasterSolution,
    RESIDUAL_TOLERANCE, TRUNCATION_TOLERANCE,
};
