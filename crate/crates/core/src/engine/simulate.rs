use std::io::Write;

use rand::Rng;
use rand_distr::{Exp1, StandardUniform};
use rayon::prelude::*;

use super::{apply_unchecked, select, stream, Kinetics, SystemState, INJECTION};
use crate::params::LaserParams;
use crate::{Complex64, Error, Result};

/// Test-harness switches. The default is the physical model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Harness {
    /// Extra photon source of constant rate (ps⁻¹) that injects photons with
    /// a random phase without touching the emitters.
    pub photon_source: f64,
    /// When false, the spontaneous-emission channel is removed.
    pub spontaneous_emission: bool,
    /// Photons present at `t = 0`, all with phase zero.
    pub initial_photons: u64,
}

impl Default for Harness {
    fn default() -> Self {
        Self {
            photon_source: 0.0,
            spontaneous_emission: true,
            initial_photons: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    /// End of the run in ps.
    pub t_end: f64,
    /// Initial transient discarded from all records, in ps.
    pub burn_in: f64,
    /// Spacing of the zero-order-hold field samples, in ps.
    pub sample_dt: f64,
    pub harness: Harness,
}

impl SimConfig {
    pub fn new(t_end: f64, burn_in: f64, sample_dt: f64) -> Self {
        Self {
            t_end,
            burn_in,
            sample_dt,
            harness: Harness::default(),
        }
    }

    /// Burn-in of ten slowest mean-field relaxation times and a sample
    /// spacing of `min(0.1/κ, 0.01/Δω)`, where `Δω` is the analytic estimate
    /// of the linewidth. `span` is the recorded duration after burn-in.
    pub fn suggested(params: &LaserParams, span: f64) -> Result<Self> {
        let burn_in = crate::mean_field::default_burn_in(params)?;
        let expected = crate::comparator::expected_linewidth(params)?;
        let mut sample_dt = 0.1 / params.kappa;
        if expected > 0.0 {
            sample_dt = sample_dt.min(0.01 / expected);
        }
        Ok(Self::new(burn_in + span, burn_in, sample_dt))
    }

    pub fn with_harness(self, harness: Harness) -> Self {
        Self { harness, ..self }
    }

    pub fn sample_count(&self) -> usize {
        (((self.t_end - self.burn_in) / self.sample_dt) + 1e-9).floor() as usize
    }

    fn validate(&self) -> Result<()> {
        let ok = self.t_end.is_finite()
            && self.burn_in >= 0.0
            && self.t_end > self.burn_in
            && self.sample_dt > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "need t_end > burn_in >= 0 and sample_dt > 0, got {self:?}"
            )))
        }
    }
}

/// Uniformly sampled field record of one trajectory plus exact
/// event-resolved statistics over `[burn_in, t_end]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTrajectory {
    pub seed: u64,
    pub burn_in: f64,
    pub t_end: f64,
    pub sample_dt: f64,
    /// `E_k = √n_a(t_k) e^{iφ(t_k)}` at `t_k = burn_in + k · sample_dt`.
    pub field: Vec<Complex64>,
    pub photons: Vec<u32>,
    pub excited: Vec<u32>,
    /// Time spent at each photon number.
    pub photon_dwell: Vec<f64>,
    /// `∫ n_e dt` over the recorded window.
    pub excited_integral: f64,
    /// Events fired inside the recorded window, by [`super::EventKind::index`].
    pub event_counts: [u64; 6],
    /// Harness photon injections inside the recorded window.
    pub injections: u64,
    /// `∫ n_e dt` from `t = 0`, including burn-in.
    pub excited_integral_total: f64,
    pub final_state: SystemState,
}

impl FieldTrajectory {
    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.field.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.burn_in + k as f64 * self.sample_dt
    }

    pub fn window(&self) -> f64 {
        self.t_end - self.burn_in
    }

    /// Dwell-weighted mean photon number.
    pub fn mean_photons(&self) -> f64 {
        let total: f64 = self.photon_dwell.iter().sum();
        let weighted: f64 = self
            .photon_dwell
            .iter()
            .enumerate()
            .map(|(n, w)| n as f64 * w)
            .sum();
        weighted / total
    }

    pub fn mean_excited(&self) -> f64 {
        self.excited_integral / self.window()
    }

    /// Writes `t_ps,re_e,im_e,n_a,n_e`, one row per sample.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_ps", "re_e", "im_e", "n_a", "n_e"])?;
        for (k, e) in self.field.iter().enumerate() {
            w.write_record(&[
                format!("{}", self.time(k)),
                format!("{}", e.re),
                format!("{}", e.im),
                self.photons[k].to_string(),
                self.excited[k].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Single trajectory from the empty, unexcited state with `φ = 0`.
pub fn simulate(
    params: &LaserParams,
    seed: u64,
    t_end: f64,
    burn_in: f64,
    sample_dt: f64,
) -> Result<FieldTrajectory> {
    simulate_with(params, seed, &SimConfig::new(t_end, burn_in, sample_dt))
}

pub fn simulate_with(params: &LaserParams, seed: u64, cfg: &SimConfig) -> Result<FieldTrajectory> {
    cfg.validate()?;
    let kin = Kinetics::new(params, &cfg.harness)?;
    let mut rng = stream(seed);
    Ok(run(&kin, &mut rng, seed, cfg))
}

fn run<R: Rng>(kin: &Kinetics, rng: &mut R, seed: u64, cfg: &SimConfig) -> FieldTrajectory {
    let n_samples = cfg.sample_count();
    let mut field = Vec::with_capacity(n_samples);
    let mut photons = Vec::with_capacity(n_samples);
    let mut excited = Vec::with_capacity(n_samples);
    let mut photon_dwell = vec![0.0; 16];
    let mut excited_integral = 0.0;
    let mut excited_integral_total = 0.0;
    let mut event_counts = [0u64; 6];
    let mut injections = 0u64;

    let (burn_in, t_end) = (cfg.burn_in, cfg.t_end);
    let mut st = SystemState {
        n_a: cfg.harness.initial_photons,
        ..SystemState::default()
    };
    let mut k = 0usize;
    let mut t_sample = burn_in;

    loop {
        let rates = kin.rates(st.n_a, st.n_e);
        let total: f64 = rates.iter().sum();
        let t_next = if total > 0.0 {
            st.t + rng.sample::<f64, _>(Exp1) / total
        } else {
            f64::INFINITY
        };

        let drift_rate = kin.drift * f64::from(st.n_e);
        while k < n_samples && t_sample < t_next {
            let phi = st.phi + drift_rate * (t_sample - st.t);
            field.push(Complex64::from_polar((st.n_a as f64).sqrt(), phi));
            photons.push(st.n_a as u32);
            excited.push(st.n_e);
            k += 1;
            t_sample = burn_in + k as f64 * cfg.sample_dt;
        }

        let end = t_next.min(t_end);
        let start = st.t.max(burn_in);
        if end > start {
            let n = st.n_a as usize;
            if n >= photon_dwell.len() {
                photon_dwell.resize(2 * n + 1, 0.0);
            }
            photon_dwell[n] += end - start;
            excited_integral += f64::from(st.n_e) * (end - start);
        }
        excited_integral_total += f64::from(st.n_e) * (end - st.t);
        st.phi += drift_rate * (end - st.t);
        st.t = end;
        if t_next >= t_end {
            break;
        }

        let u: f64 = rng.sample(StandardUniform);
        let channel = select(&rates, total, u);
        apply_unchecked(&mut st, channel, rng);
        if st.t >= burn_in {
            if channel == INJECTION {
                injections += 1;
            } else {
                event_counts[channel] += 1;
            }
        }
    }

    while photon_dwell.len() > 1 && photon_dwell.last() == Some(&0.0) {
        photon_dwell.pop();
    }

    FieldTrajectory {
        seed,
        burn_in,
        t_end,
        sample_dt: cfg.sample_dt,
        field,
        photons,
        excited,
        photon_dwell,
        excited_integral,
        event_counts,
        injections,
        excited_integral_total,
        final_state: st,
    }
}

/// `n_traj` trajectories with seeds `base_seed + i`, run on the rayon pool.
/// The output is ordered by seed and does not depend on the pool size.
pub fn run_ensemble(
    params: &LaserParams,
    n_traj: usize,
    base_seed: u64,
    cfg: &SimConfig,
) -> Result<Vec<FieldTrajectory>> {
    if n_traj == 0 {
        return Err(Error::InvalidArgument("ensemble needs at least one trajectory".into()));
    }
    cfg.validate()?;
    let kin = Kinetics::new(params, &cfg.harness)?;
    Ok((0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            run(&kin, &mut stream(seed), seed, cfg)
        })
        .collect())
}
