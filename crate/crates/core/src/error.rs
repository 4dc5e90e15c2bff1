use thiserror::Error;

use crate::engine::EventKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coupling rate undefined: P + kappa + gamma_D + gamma_A must be positive")]
    UndefinedCoupling,

    #[error("no physical steady state (candidate roots: {roots:?})")]
    NoPhysicalRoot { roots: Vec<f64> },

    #[error("fixed-point iteration did not converge after {} iterates (last {:?})", .iterates.len(), .iterates.last())]
    NonConvergence { iterates: Vec<f64> },

    #[error("integration left the physical domain at t = {time} (n_a = {n_a}, n_e = {n_e}); reduce dt")]
    Unstable { time: f64, n_a: f64, n_e: f64 },

    #[error("event {event:?} is infeasible at n_a = {n_a}, n_e = {n_e}")]
    InfeasibleEvent { event: EventKind, n_a: u64, n_e: u32 },

    #[error("absorbing state: total event rate is zero")]
    AbsorbingState,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("{0} is undefined for a vanishing photon number")]
    Undefined(&'static str),

    #[error("coherence not resolved: |g1| only decays to {min_abs:.3} within the lag window")]
    Unresolved { min_abs: f64 },

    #[error("Liouvillian block of dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("photon truncation at {n_fock} leaves {top_population:.2e} in the top Fock level")]
    Truncation { n_fock: usize, top_population: f64 },

    #[error("master equation steady state is not unique")]
    DegenerateSteadyState,

    #[error("steady-state residual {residual:.3e} exceeds tolerance")]
    Residual { residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
