//! Exact stochastic simulation of the laser birth-death process.
//!
//! The rate equations are read as a continuous-time Markov chain on the
//! integer populations `(n_a, n_e)` with six unit-step transitions. Waiting
//! times are exponential with the total rate and the firing channel is drawn
//! in proportion to its rate (Gillespie's direct method). On top of the
//! populations the engine carries the field phase `φ`:
//!
//! * a spontaneously emitted photon adds a unit phasor in a uniformly random
//!   direction, see [`phase_kick`];
//! * stimulated emission, absorption, cavity loss, pumping and non-radiative
//!   decay leave `φ` untouched;
//! * between events `φ` drifts at `α γ_r n_e`, see [`lef_drift`].
//!
//! The complex field is `E = √n_a · e^{iφ}` in the frame rotating with the
//! cavity.

mod phase;
mod rng;
mod simulate;

pub use phase::{lef_drift, phase_kick};
pub use rng::{stream, StreamRng};
pub use simulate::{run_ensemble, simulate, simulate_with, FieldTrajectory, Harness, SimConfig};

use rand::Rng;
use rand_distr::{Exp1, StandardUniform};

use crate::params::LaserParams;
use crate::{Error, Result};

/// Elementary transitions of the birth-death process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum EventKind {
    Pump,
    SpontaneousEmission,
    StimulatedEmission,
    StimulatedAbsorption,
    CavityLoss,
    NonRadiativeDecay,
}

impl EventKind {
    pub const ALL: [EventKind; 6] = [
        EventKind::Pump,
        EventKind::SpontaneousEmission,
        EventKind::StimulatedEmission,
        EventKind::StimulatedAbsorption,
        EventKind::CavityLoss,
        EventKind::NonRadiativeDecay,
    ];

    /// `(Δn_a, Δn_e)`.
    pub const fn delta(self) -> (i64, i64) {
        match self {
            EventKind::Pump => (0, 1),
            EventKind::SpontaneousEmission => (1, -1),
            EventKind::StimulatedEmission => (1, -1),
            EventKind::StimulatedAbsorption => (-1, 1),
            EventKind::CavityLoss => (-1, 0),
            EventKind::NonRadiativeDecay => (0, -1),
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SystemState {
    pub n_a: u64,
    pub n_e: u32,
    /// Unwrapped field phase in radians.
    pub phi: f64,
    /// Simulation time in ps.
    pub t: f64,
}

impl SystemState {
    pub fn field(&self) -> crate::Complex64 {
        crate::Complex64::from_polar((self.n_a as f64).sqrt(), self.phi)
    }
}

/// Channel rates in ps⁻¹, indexed by [`EventKind::index`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSet {
    pub rates: [f64; 6],
    pub total: f64,
}

impl RateSet {
    pub fn get(&self, kind: EventKind) -> f64 {
        self.rates[kind.index()]
    }
}

/// Rates of all six transitions in `state`:
/// `P(n0−n_e)`, `γ_r n_e`, `γ_r n_e n_a`, `γ_r (n0−n_e) n_a`, `κ n_a`, `γ_A n_e`.
pub fn event_rates(state: &SystemState, params: &LaserParams) -> Result<RateSet> {
    let kin = Kinetics::new(params, &Harness::default())?;
    let full = kin.rates(state.n_a, state.n_e);
    let mut rates = [0.0; 6];
    rates.copy_from_slice(&full[..6]);
    Ok(RateSet {
        rates,
        total: rates.iter().sum(),
    })
}

/// Draws the waiting time and the next transition from `state`.
pub fn next_event<R: Rng + ?Sized>(
    state: &SystemState,
    params: &LaserParams,
    rng: &mut R,
) -> Result<(f64, EventKind)> {
    let set = event_rates(state, params)?;
    if !(set.total > 0.0) {
        return Err(Error::AbsorbingState);
    }
    let dt = rng.sample::<f64, _>(Exp1) / set.total;
    let u: f64 = rng.sample(StandardUniform);
    let idx = select(&set.rates, set.total, u);
    Ok((dt, EventKind::ALL[idx]))
}

/// Applies `event` to `state`. Only spontaneous emission touches the phase;
/// it consumes one uniform angle from `rng`.
pub fn apply_event<R: Rng + ?Sized>(
    state: &SystemState,
    event: EventKind,
    rng: &mut R,
    params: &LaserParams,
) -> Result<SystemState> {
    let set = event_rates(state, params)?;
    if !(set.get(event) > 0.0) {
        return Err(Error::InfeasibleEvent {
            event,
            n_a: state.n_a,
            n_e: state.n_e,
        });
    }
    let mut next = *state;
    apply_unchecked(&mut next, event.index(), rng);
    Ok(next)
}

/// Channel index for the harness-only photon source.
pub(crate) const INJECTION: usize = 6;

#[inline]
pub(crate) fn apply_unchecked<R: Rng + ?Sized>(state: &mut SystemState, channel: usize, rng: &mut R) {
    match channel {
        0 => state.n_e += 1,
        1 | INJECTION => {
            let theta = rng.sample::<f64, _>(StandardUniform) * std::f64::consts::TAU;
            state.phi = phase_kick(state.n_a, state.phi, theta);
            state.n_a += 1;
            if channel == 1 {
                state.n_e -= 1;
            }
        }
        2 => {
            state.n_a += 1;
            state.n_e -= 1;
        }
        3 => {
            state.n_a -= 1;
            state.n_e += 1;
        }
        4 => state.n_a -= 1,
        5 => state.n_e -= 1,
        _ => unreachable!("unknown channel {channel}"),
    }
}

/// Index of the channel selected by `u ∈ [0, 1)`.
#[inline]
pub(crate) fn select(rates: &[f64], total: f64, u: f64) -> usize {
    let mut target = u * total;
    let mut last = 0;
    for (i, &r) in rates.iter().enumerate() {
        if r > 0.0 {
            if target < r {
                return i;
            }
            target -= r;
            last = i;
        }
    }
    // Rounding can push `target` past the final cumulative sum.
    last
}

/// Pre-evaluated constants for the hot loop.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Kinetics {
    pub pump: f64,
    pub gamma_r: f64,
    pub kappa: f64,
    pub gamma_a: f64,
    pub n0: u32,
    /// `α γ_r`, the drift of `φ` per excited emitter.
    pub drift: f64,
    pub spontaneous: bool,
    pub source: f64,
}

impl Kinetics {
    pub fn new(params: &LaserParams, harness: &Harness) -> Result<Self> {
        params.validate()?;
        let gamma_r = params.gamma_r()?;
        if !(harness.photon_source >= 0.0 && harness.photon_source.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "photon source rate must be non-negative, got {}",
                harness.photon_source
            )));
        }
        Ok(Self {
            pump: params.pump,
            gamma_r,
            kappa: params.kappa,
            gamma_a: params.gamma_a,
            n0: params.n0,
            drift: params.alpha * gamma_r,
            spontaneous: harness.spontaneous_emission,
            source: harness.photon_source,
        })
    }

    #[inline]
    pub fn rates(&self, n_a: u64, n_e: u32) -> [f64; 7] {
        let na = n_a as f64;
        let ne = f64::from(n_e);
        let ng = f64::from(self.n0 - n_e);
        [
            self.pump * ng,
            if self.spontaneous { self.gamma_r * ne } else { 0.0 },
            self.gamma_r * ne * na,
            self.gamma_r * ng * na,
            self.kappa * na,
            self.gamma_a * ne,
            self.source,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn params(n0: u32, gamma_r: f64, pump: f64, kappa: f64, gamma_a: f64) -> LaserParams {
        // Pick g so that γ_r comes out exactly as requested.
        let p = LaserParams {
            g: 0.0,
            kappa,
            gamma_a,
            gamma_d: 1.0,
            n0,
            pump,
            alpha: 0.0,
        };
        LaserParams {
            g: (gamma_r * p.total_dephasing() / 4.0).sqrt(),
            ..p
        }
    }

    fn state(n_a: u64, n_e: u32) -> SystemState {
        SystemState {
            n_a,
            n_e,
            ..Default::default()
        }
    }

    #[test]
    fn rates_hand_arithmetic() {
        let p = params(5, 0.04, 0.1, 0.04, 0.012);
        let set = event_rates(&state(3, 2), &p).unwrap();
        let expected = [0.3, 0.08, 0.24, 0.36, 0.12, 0.024];
        for (got, want) in set.rates.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{:?}", set.rates);
        }
        assert!((set.total - expected.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn rates_edge_states() {
        let p = LaserParams::photonic_crystal(0.2);
        let empty = event_rates(&state(0, 0), &p).unwrap();
        assert_eq!(empty.rates[0], 0.2 * 5.0);
        assert!(empty.rates[1..].iter().all(|&r| r == 0.0));

        let full = event_rates(&state(4, 5), &p).unwrap();
        assert_eq!(full.get(EventKind::Pump), 0.0);
        assert_eq!(full.get(EventKind::StimulatedAbsorption), 0.0);
    }

    #[test]
    fn net_stimulated_rate_matches_gain_term() {
        let p = LaserParams::photonic_crystal(0.37);
        let gr = p.gamma_r().unwrap();
        for n_a in [0u64, 1, 7, 1000] {
            for n_e in 0..=5u32 {
                let set = event_rates(&state(n_a, n_e), &p).unwrap();
                let net = set.get(EventKind::StimulatedEmission) - set.get(EventKind::StimulatedAbsorption);
                let gain = gr * (2.0 * f64::from(n_e) - 5.0) * n_a as f64;
                assert!((net - gain).abs() <= 1e-12 * gain.abs().max(1.0));
            }
        }
    }

    #[test]
    fn only_pump_possible_from_vacuum() {
        let p = LaserParams::photonic_crystal(0.2);
        let mut rng = stream(3);
        for _ in 0..1000 {
            let (dt, ev) = next_event(&state(0, 0), &p, &mut rng).unwrap();
            assert_eq!(ev, EventKind::Pump);
            assert!(dt > 0.0);
        }
    }

    #[test]
    fn absorbing_state_is_signalled() {
        let p = LaserParams::photonic_crystal(0.0);
        let mut rng = stream(0);
        assert!(matches!(
            next_event(&state(0, 0), &p, &mut rng),
            Err(Error::AbsorbingState)
        ));
    }

    #[test]
    fn stimulated_emission_keeps_phase() {
        let p = LaserParams::photonic_crystal(0.2);
        let mut rng = stream(1);
        let s = SystemState {
            n_a: 4,
            n_e: 2,
            phi: 1.0,
            t: 0.0,
        };
        let next = apply_event(&s, EventKind::StimulatedEmission, &mut rng, &p).unwrap();
        assert_eq!((next.n_a, next.n_e, next.phi), (5, 1, 1.0));
    }

    #[test]
    fn loss_keeps_phase() {
        let p = LaserParams::photonic_crystal(0.2);
        let mut rng = stream(1);
        let s = SystemState {
            n_a: 1,
            n_e: 0,
            phi: 0.7,
            t: 0.0,
        };
        let next = apply_event(&s, EventKind::CavityLoss, &mut rng, &p).unwrap();
        assert_eq!((next.n_a, next.n_e, next.phi), (0, 0, 0.7));
    }

    #[test]
    fn spontaneous_emission_into_vacuum_takes_drawn_angle() {
        let p = LaserParams::photonic_crystal(0.2);
        let s = SystemState {
            n_a: 0,
            n_e: 3,
            phi: 2.5,
            t: 0.0,
        };
        let mut rng = stream(11);
        let mut shadow = stream(11);
        let theta = shadow.sample::<f64, _>(StandardUniform) * std::f64::consts::TAU;
        let next = apply_event(&s, EventKind::SpontaneousEmission, &mut rng, &p).unwrap();
        assert_eq!((next.n_a, next.n_e), (1, 2));
        let diff = (next.phi - theta).rem_euclid(std::f64::consts::TAU);
        assert!(diff < 1e-12 || std::f64::consts::TAU - diff < 1e-12);
        assert!((next.phi - s.phi).abs() <= std::f64::consts::PI);
    }

    #[test]
    fn infeasible_events_are_rejected() {
        let p = LaserParams::photonic_crystal(0.2);
        let mut rng = stream(1);
        for ev in [
            EventKind::CavityLoss,
            EventKind::StimulatedAbsorption,
            EventKind::SpontaneousEmission,
            EventKind::NonRadiativeDecay,
        ] {
            assert!(matches!(
                apply_event(&state(0, 0), ev, &mut rng, &p),
                Err(Error::InfeasibleEvent { .. })
            ));
        }
        assert!(apply_event(&state(0, 5), EventKind::Pump, &mut rng, &p).is_err());
    }

    #[test]
    fn deltas_are_consistent_with_apply() {
        let p = LaserParams::photonic_crystal(0.2);
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(5);
        let s = state(3, 2);
        for ev in EventKind::ALL {
            let next = apply_event(&s, ev, &mut rng, &p).unwrap();
            let (da, de) = ev.delta();
            assert_eq!(next.n_a as i64 - 3, da);
            assert_eq!(i64::from(next.n_e) - 2, de);
        }
    }

    #[test]
    fn event_frequencies_match_rates() {
        let p = params(5, 0.04, 0.1, 0.04, 0.012);
        let s = state(3, 2);
        let set = event_rates(&s, &p).unwrap();
        let mut rng = stream(2024);
        let draws = 1_000_000u32;
        let mut counts = [0u32; 6];
        let mut dt_sum = 0.0;
        for _ in 0..draws {
            let (dt, ev) = next_event(&s, &p, &mut rng).unwrap();
            counts[ev.index()] += 1;
            dt_sum += dt;
        }
        let n = f64::from(draws);
        for (i, &c) in counts.iter().enumerate() {
            let prob = set.rates[i] / set.total;
            let sigma = (n * prob * (1.0 - prob)).sqrt();
            assert!((f64::from(c) - n * prob).abs() < 3.0 * sigma, "channel {i}: {c}");
        }
        let mean = dt_sum / n;
        assert!((mean * set.total - 1.0).abs() < 0.01, "mean waiting time {mean}");
    }

    #[test]
    fn select_never_returns_zero_rate_channel() {
        let rates = [0.0, 1.0, 0.0, 2.0, 0.0];
        assert_eq!(select(&rates, 3.0, 0.0), 1);
        assert_eq!(select(&rates, 3.0, 0.5), 3);
        assert_eq!(select(&rates, 3.0, 0.999_999_999_999), 3);
        assert_eq!(select(&rates, 3.0, 1.0), 3);
    }
}
