//! Sweep execution: every grid point is solved by each enabled method and
//! reported as one row per (point, method).

use std::time::Instant;

use nanolase::comparator::expected_linewidth;
use nanolase::engine::{run_ensemble, FieldTrajectory, SimConfig};
use nanolase::master::{g2_zero_me, solve_steady_state, spectrum_me, MAX_EMITTERS};
use nanolase::mean_field::default_burn_in;
use nanolase::observables::{
    ensemble_linewidth, linewidth_with, subtract_mean_drift, suggested_max_lag,
    AutocorrelationEstimate, LinewidthOptions, LinewidthReport, PhotonStatistics, SpectrumEstimate,
};
use nanolase::{below_threshold_reference, schawlow_townes, steady_state, Complex64, Error, LaserParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Method, Point, RunConfig, SimulationSpec};

/// Decay-fit precision scales as `sqrt(4.7 / (Γ T))`; this many coherence
/// times of total record give about 5%.
const COHERENCE_BUDGET: f64 = 2000.0;
/// Expected events per point, for the photon statistics.
const EVENT_BUDGET: f64 = 2e6;
/// Samples kept per point for field plots.
const PLOT_SAMPLES: usize = 20_000;
/// Lag-window doublings tried when `|g1|` has not decayed far enough.
const LAG_RETRIES: usize = 3;

/// One CSV row. Column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub point: usize,
    pub method: &'static str,
    pub n0: u32,
    pub pump_per_emitter: f64,
    pub pump_total: f64,
    pub alpha: f64,
    pub mean_photons: Option<f64>,
    pub mean_excited: Option<f64>,
    pub g2_zero: Option<f64>,
    pub g2_error: Option<f64>,
    /// Angular FWHM in ps⁻¹.
    pub linewidth_fwhm: Option<f64>,
    /// The same width as an ordinary frequency in Hz.
    pub linewidth_fwhm_hz: Option<f64>,
    pub linewidth_error: Option<f64>,
    pub linewidth_center: Option<f64>,
    pub linewidth_method: &'static str,
    /// Second width estimate: the Lorentzian spectral fit for `sta` and `me`,
    /// the gain-narrowed cavity width for `analytic`.
    pub alt_fwhm: Option<f64>,
    pub n_traj: Option<usize>,
    pub base_seed: Option<u64>,
    pub events: Option<u64>,
    pub status: String,
    pub wall_time_s: f64,
}

impl Row {
    fn new(point: &Point, method: Method) -> Self {
        let p = point.params;
        Self {
            point: point.index,
            method: method.label(),
            n0: p.n0,
            pump_per_emitter: p.pump,
            pump_total: p.total_pump(),
            alpha: p.alpha,
            mean_photons: None,
            mean_excited: None,
            g2_zero: None,
            g2_error: None,
            linewidth_fwhm: None,
            linewidth_fwhm_hz: None,
            linewidth_error: None,
            linewidth_center: None,
            linewidth_method: "",
            alt_fwhm: None,
            n_traj: None,
            base_seed: None,
            events: None,
            status: "ok".into(),
            wall_time_s: 0.0,
        }
    }

    fn set_width(&mut self, fwhm: f64) {
        self.linewidth_fwhm = Some(fwhm);
        self.linewidth_fwhm_hz = Some(fwhm / std::f64::consts::TAU * 1e12);
    }

    fn set_report(&mut self, report: &LinewidthReport) {
        let c = &report.coherence;
        self.set_width(c.fwhm);
        self.linewidth_center = Some(c.center);
        self.linewidth_method = c.method.label();
        self.linewidth_error = c.fwhm_error.is_finite().then_some(c.fwhm_error);
        self.alt_fwhm = report.spectral.as_ref().map(|s| s.fwhm);
        if !report.exponential {
            self.status = format!("ok: non-exponential g1 decay (rms {:.3})", c.residual);
        }
    }
}

/// Coherence data of one (point, method) pair, written next to the table.
#[derive(Clone, Debug)]
pub struct Coherence {
    pub point: usize,
    pub method: Method,
    pub g1: AutocorrelationEstimate,
    pub spectrum: SpectrumEstimate,
}

/// Down-sampled record of the first stochastic trajectory at a point, kept
/// for plotting.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub point: usize,
    pub params: LaserParams,
    pub time: Vec<f64>,
    pub field: Vec<Complex64>,
    /// Field with the mean `α` frequency shift removed.
    pub detrended: Vec<Complex64>,
    /// Pooled dwell-weighted photon distribution of the ensemble.
    pub distribution: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub coherence: Vec<Coherence>,
    pub trajectories: Vec<TrajectorySample>,
}

#[derive(Default)]
struct PointOutput {
    rows: Vec<Row>,
    coherence: Vec<Coherence>,
    trajectory: Option<TrajectorySample>,
}

/// Runs every point and method. Failures are reported in the row status and
/// never abort the sweep. Points run concurrently; output order and values
/// do not depend on the thread count.
pub fn sweep(cfg: &RunConfig) -> SweepResult {
    let points = cfg.points();
    let outputs: Vec<PointOutput> = points.par_iter().map(|p| run_point(cfg, p)).collect();
    let mut result = SweepResult::default();
    for out in outputs {
        result.rows.extend(out.rows);
        result.coherence.extend(out.coherence);
        result.trajectories.extend(out.trajectory);
    }
    result
}

fn run_point(cfg: &RunConfig, point: &Point) -> PointOutput {
    let mut out = PointOutput::default();
    for &method in &cfg.methods {
        if method == Method::Me && point.params.n0 > MAX_EMITTERS {
            continue;
        }
        let start = Instant::now();
        let mut row = Row::new(point, method);
        let outcome = match method {
            Method::Sta => run_sta(cfg, point, &mut row, &mut out),
            Method::Me => run_me(cfg, point, &mut row, &mut out),
            Method::Analytic => run_analytic(point, &mut row),
            Method::Meanfield => run_meanfield(point, &mut row),
        };
        if let Err(e) = outcome {
            log::warn!("point {} method {}: {e}", point.index, method.label());
            row.status = format!("error: {e}");
        }
        row.wall_time_s = start.elapsed().as_secs_f64();
        out.rows.push(row);
    }
    out
}

/// Seed of the first trajectory at a point; trajectories within the point
/// use consecutive seeds, so streams never overlap between points.
pub fn point_seed(sim: &SimulationSpec, index: usize) -> u64 {
    sim.base_seed.wrapping_add((index * sim.n_traj) as u64)
}

fn fit_options(sim: &SimulationSpec) -> LinewidthOptions {
    LinewidthOptions {
        upper: sim.fit_upper,
        lower: sim.fit_lower,
        ..LinewidthOptions::default()
    }
}

/// Sampling plan for the stochastic engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plan {
    pub sim: SimConfig,
    pub max_lag: usize,
}

/// Fills unset simulation controls from the expected linewidth: samples a
/// hundred per coherence time and at most 0.2 rad of mean `α` rotation,
/// lags over ten coherence times, and a total record covering
/// [`COHERENCE_BUDGET`] coherence times and [`EVENT_BUDGET`] events, split
/// over the trajectories. A derived record is shortened to respect
/// `max_samples`.
pub fn plan(params: &LaserParams, sim: &SimulationSpec) -> nanolase::Result<Plan> {
    let expected = expected_linewidth(params)?;
    if !(expected.is_finite() && expected > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cannot derive a time scale from the expected linewidth {expected}; set simulation.t_end, sample_dt and max_lag"
        )));
    }
    let burn_in = match sim.burn_in {
        Some(b) => b,
        None => default_burn_in(params)?,
    };
    let sample_dt = match sim.sample_dt {
        Some(dt) => dt,
        None => {
            let drift = params.alpha * params.gamma_r()? * steady_state(params)?.n_e;
            let mut dt = (0.1 / params.kappa).min(0.01 / expected);
            if drift > 0.0 {
                dt = dt.min(0.2 / drift);
            }
            dt
        }
    };
    let max_lag = sim.max_lag.unwrap_or_else(|| suggested_max_lag(expected, sample_dt));
    let t_end = match sim.t_end {
        Some(t) => t,
        None => {
            let n_traj = sim.n_traj as f64;
            let min_span = 10.0 * max_lag as f64 * sample_dt;
            let mut span = (COHERENCE_BUDGET / expected / n_traj)
                .max(EVENT_BUDGET / event_rate(params)? / n_traj)
                .max(min_span);
            let cap = sim.max_samples as f64 / n_traj * sample_dt;
            if span > cap && cap >= min_span {
                log::warn!("record shortened from {span:.3e} ps to {cap:.3e} ps by simulation.max_samples");
                span = cap;
            }
            burn_in + span
        }
    };
    Ok(Plan {
        sim: SimConfig::new(t_end, burn_in, sample_dt),
        max_lag,
    })
}

/// Total event rate at the mean-field steady state.
fn event_rate(params: &LaserParams) -> nanolase::Result<f64> {
    let ss = steady_state(params)?;
    let gr = params.gamma_r()?;
    let n0 = f64::from(params.n0);
    let rate = params.pump * (n0 - ss.n_e)
        + gr * ss.n_e * (1.0 + ss.n_a)
        + gr * (n0 - ss.n_e) * ss.n_a
        + params.kappa * ss.n_a
        + params.gamma_a * ss.n_e;
    Ok(rate.max(f64::MIN_POSITIVE))
}

fn run_sta(cfg: &RunConfig, point: &Point, row: &mut Row, out: &mut PointOutput) -> nanolase::Result<()> {
    let sim = &cfg.simulation;
    let params = point.params;
    let Plan { sim: sim_cfg, mut max_lag } = plan(&params, sim)?;
    let total_samples = sim_cfg.sample_count().saturating_mul(sim.n_traj);
    if total_samples > sim.max_samples {
        return Err(Error::InvalidArgument(format!(
            "{total_samples} samples exceed simulation.max_samples = {}; set t_end or sample_dt",
            sim.max_samples
        )));
    }
    let seed = point_seed(sim, point.index);
    row.n_traj = Some(sim.n_traj);
    row.base_seed = Some(seed);
    let trajs = run_ensemble(&params, sim.n_traj, seed, &sim_cfg)?;

    let stats = PhotonStatistics::from_ensemble(&trajs)?;
    let n = trajs.len() as f64;
    let mean_excited = trajs.iter().map(FieldTrajectory::mean_excited).sum::<f64>() / n;
    row.mean_photons = Some(stats.mean);
    row.mean_excited = Some(mean_excited);
    row.g2_zero = stats.g2_zero;
    row.g2_error = stats.g2_error;
    row.events = Some(
        trajs
            .iter()
            .map(|t| t.event_counts.iter().sum::<u64>())
            .sum(),
    );
    out.trajectory = Some(trajectory_sample(point, &trajs[0], &stats, mean_excited)?);

    let shortest = trajs.iter().map(FieldTrajectory::len).min().unwrap_or(0);
    let opts = fit_options(sim);
    let mut attempt = 0;
    let ens = loop {
        match ensemble_linewidth(&trajs, max_lag, &opts) {
            Err(Error::Unresolved { .. })
                if sim.max_lag.is_none() && attempt < LAG_RETRIES && 10 * max_lag <= shortest =>
            {
                attempt += 1;
                max_lag *= 2;
            }
            other => break other?,
        }
    };
    row.set_report(&ens.report);
    if let Some(se) = ens.jackknife_se {
        row.linewidth_error = Some(se);
    }
    let spectrum = nanolase::observables::spectrum_with(&ens.g1, &opts.spectral);
    out.coherence.push(Coherence {
        point: point.index,
        method: Method::Sta,
        g1: ens.g1,
        spectrum,
    });
    Ok(())
}

fn trajectory_sample(
    point: &Point,
    traj: &FieldTrajectory,
    stats: &PhotonStatistics,
    mean_excited: f64,
) -> nanolase::Result<TrajectorySample> {
    let stride = traj.len().div_ceil(PLOT_SAMPLES).max(1);
    let detrended = subtract_mean_drift(traj, &point.params, mean_excited)?;
    let picks = (0..traj.len()).step_by(stride);
    Ok(TrajectorySample {
        point: point.index,
        params: point.params,
        time: picks.clone().map(|k| traj.time(k)).collect(),
        field: picks.clone().map(|k| traj.field[k]).collect(),
        detrended: picks.map(|k| detrended.field[k]).collect(),
        distribution: stats.distribution.clone(),
    })
}

fn run_me(cfg: &RunConfig, point: &Point, row: &mut Row, out: &mut PointOutput) -> nanolase::Result<()> {
    let params = point.params;
    let solution = solve_steady_state(&params)?;
    let rho = &solution.rho;
    row.mean_photons = Some(rho.mean_photons());
    row.mean_excited = Some(rho.mean_excited());
    row.g2_zero = Some(g2_zero_me(rho)?);

    let expected = expected_linewidth(&params)?;
    let mut lag_dt = 0.05 / expected;
    let max_lag = suggested_max_lag(expected, lag_dt);
    let mut attempt = 0;
    let coherence = loop {
        let c = spectrum_me(&solution.generator, rho, lag_dt, max_lag)?;
        if c.resolved || attempt == LAG_RETRIES {
            break c;
        }
        attempt += 1;
        lag_dt *= 2.0;
    };
    let report = linewidth_with(&coherence.g1, &fit_options(&cfg.simulation))?;
    row.set_report(&report);
    if params.alpha != 0.0 && row.status == "ok" {
        row.status = "ok: master equation ignores alpha".into();
    }
    out.coherence.push(Coherence {
        point: point.index,
        method: Method::Me,
        g1: coherence.g1,
        spectrum: coherence.spectrum,
    });
    Ok(())
}

fn run_analytic(point: &Point, row: &mut Row) -> nanolase::Result<()> {
    let st = schawlow_townes(&point.params)?;
    row.mean_photons = Some(st.mean_photons);
    row.mean_excited = Some(st.mean_excited);
    row.set_width(st.fwhm);
    row.linewidth_method = "schawlow_townes";
    row.alt_fwhm = below_threshold_reference(&point.params).ok();
    Ok(())
}

fn run_meanfield(point: &Point, row: &mut Row) -> nanolase::Result<()> {
    let ss = steady_state(&point.params)?;
    row.mean_photons = Some(ss.n_a);
    row.mean_excited = Some(ss.n_e);
    Ok(())
}

/// Writes the table as CSV with a header row.
pub fn write_rows<W: std::io::Write>(writer: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const COLUMNS: [&str; 21] = [
    "point",
    "method",
    "n0",
    "pump_per_emitter",
    "pump_total",
    "alpha",
    "mean_photons",
    "mean_excited",
    "g2_zero",
    "g2_error",
    "linewidth_fwhm",
    "linewidth_fwhm_hz",
    "linewidth_error",
    "linewidth_center",
    "linewidth_method",
    "alt_fwhm",
    "n_traj",
    "base_seed",
    "events",
    "status",
    "wall_time_s",
];
