use rayon::prelude::*;

use super::fit::{levenberg_marquardt, linear_fit};
use super::{spectrum_with, AutocorrelationEstimate, CorrelationAccumulator, SpectrumEstimate, SpectrumOptions};
use crate::engine::FieldTrajectory;
use crate::{Complex64, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinewidthMethod {
    /// Exponential fit to the decay of `|g1(τ)|`.
    CoherenceDecay,
    /// Lorentzian least-squares fit to the spectrum.
    LorentzianFit,
}

impl LinewidthMethod {
    pub fn label(self) -> &'static str {
        match self {
            LinewidthMethod::CoherenceDecay => "coherence_decay",
            LinewidthMethod::LorentzianFit => "lorentzian_fit",
        }
    }
}

/// Angular full width at half maximum and line center, both in ps⁻¹.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinewidthEstimate {
    pub fwhm: f64,
    pub center: f64,
    pub method: LinewidthMethod,
    /// RMS residual of the fit: in `ln|g1|` for the decay fit, relative to
    /// the peak height for the Lorentzian.
    pub residual: f64,
    /// Standard error of `fwhm` from the fit alone.
    pub fwhm_error: f64,
    pub fit_points: usize,
}

impl LinewidthEstimate {
    /// Approximate 95% interval `fwhm ± 1.96 σ`; unbounded when no error is
    /// available.
    pub fn confidence_interval(&self) -> (f64, f64) {
        if self.fwhm_error.is_finite() {
            let h = 1.96 * self.fwhm_error;
            ((self.fwhm - h).max(0.0), self.fwhm + h)
        } else {
            (0.0, f64::INFINITY)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinewidthOptions {
    /// `|g1|` level where the decay fit window opens.
    pub upper: f64,
    /// `|g1|` level where it closes.
    pub lower: f64,
    /// Above this RMS residual in `ln|g1|` the decay is flagged non-exponential.
    pub residual_threshold: f64,
    pub spectral: SpectrumOptions,
}

impl Default for LinewidthOptions {
    fn default() -> Self {
        Self {
            upper: 0.8,
            lower: 0.2,
            residual_threshold: 0.02,
            spectral: SpectrumOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinewidthReport {
    pub coherence: LinewidthEstimate,
    /// `None` when the Lorentzian fit did not converge.
    pub spectral: Option<LinewidthEstimate>,
    /// Whether `ln|g1|` is linear within `residual_threshold`; when it is not
    /// the line is not Lorentzian and the two estimates differ.
    pub exponential: bool,
}

/// Decay-fit linewidth with default options.
pub fn linewidth(g1: &AutocorrelationEstimate) -> Result<LinewidthEstimate> {
    coherence_decay(g1, &LinewidthOptions::default())
}

pub fn linewidth_with(g1: &AutocorrelationEstimate, opts: &LinewidthOptions) -> Result<LinewidthReport> {
    let coherence = coherence_decay(g1, opts)?;
    let exponential = coherence.residual <= opts.residual_threshold;
    if !exponential {
        log::warn!(
            "g1 decay is not exponential (rms {:.3} in ln|g1|); decay and spectral widths differ",
            coherence.residual
        );
    }
    let spectral = match lorentzian_fit(&spectrum_with(g1, &opts.spectral)) {
        Ok(est) => Some(est),
        Err(e) => {
            log::warn!("Lorentzian fit failed: {e}");
            None
        }
    };
    Ok(LinewidthReport {
        coherence,
        spectral,
        exponential,
    })
}

/// Lag count spanning ten coherence times `2 / fwhm`, long enough that the
/// Hann taper barely broadens the line.
pub fn suggested_max_lag(fwhm: f64, sample_dt: f64) -> usize {
    ((20.0 / fwhm / sample_dt).ceil() as usize).max(16)
}

fn coherence_decay(g1: &AutocorrelationEstimate, opts: &LinewidthOptions) -> Result<LinewidthEstimate> {
    if !(0.0 < opts.lower && opts.lower < opts.upper && opts.upper <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fit window must satisfy 0 < lower < upper <= 1, got {}..{}",
            opts.lower, opts.upper
        )));
    }
    let mags: Vec<f64> = g1.values.iter().map(|z| z.norm()).collect();
    let Some(end) = mags.iter().position(|&m| m < opts.lower) else {
        let min_abs = mags.iter().copied().fold(f64::INFINITY, f64::min);
        return Err(Error::Unresolved { min_abs });
    };
    let start = mags[..end].iter().position(|&m| m <= opts.upper).unwrap_or(end);
    if end - start < 3 {
        return Err(Error::NotApplicable(format!(
            "only {} lags between |g1| = {} and {}; sample the field more finely",
            end - start,
            opts.upper,
            opts.lower
        )));
    }
    let tau: Vec<f64> = (start..end).map(|k| g1.lag(k)).collect();
    let log_mag: Vec<f64> = mags[start..end].iter().map(|m| m.ln()).collect();
    let decay = linear_fit(&tau, &log_mag)?;

    // The phase is unwrapped from lag zero so that the slope sees the full
    // rotation, not just the part inside the window.
    let mut phase = Vec::with_capacity(end);
    let mut last = 0.0;
    for z in &g1.values[..end] {
        let mut p = z.arg();
        while p - last > std::f64::consts::PI {
            p -= std::f64::consts::TAU;
        }
        while p - last < -std::f64::consts::PI {
            p += std::f64::consts::TAU;
        }
        phase.push(p);
        last = p;
    }
    let all_tau: Vec<f64> = (0..end).map(|k| g1.lag(k)).collect();
    let center = linear_fit(&all_tau, &phase)?.slope;

    Ok(LinewidthEstimate {
        fwhm: 2.0 * decay.slope.abs(),
        center,
        method: LinewidthMethod::CoherenceDecay,
        residual: decay.rms,
        fwhm_error: 2.0 * decay.slope_se,
        fit_points: end - start,
    })
}

/// Fits `A Γ² / ((ω − ω0)² + Γ²)` to the part of the spectrum above 5% of
/// the peak, bounded to ±10 half widths.
pub fn lorentzian_fit(spec: &SpectrumEstimate) -> Result<LinewidthEstimate> {
    let (w0, peak) = spec.peak();
    if !(peak > 0.0) {
        return Err(Error::Undefined("spectral peak"));
    }
    let half: Vec<f64> = spec
        .omega
        .iter()
        .zip(&spec.density)
        .filter(|(_, &s)| s >= 0.5 * peak)
        .map(|(&w, _)| w)
        .collect();
    let gamma0 = (0.5 * (half.last().unwrap() - half.first().unwrap()) + 0.5 * spec.spacing()).max(spec.spacing());
    let (x, y): (Vec<f64>, Vec<f64>) = spec
        .omega
        .iter()
        .zip(&spec.density)
        .filter(|(&w, &s)| (w - w0).abs() <= 10.0 * gamma0 && s >= 0.05 * peak)
        .map(|(&w, &s)| (w, s / peak))
        .unzip();
    if x.len() < 4 {
        return Err(Error::NotApplicable(format!(
            "line spans {} spectral bins; increase the lag span",
            x.len()
        )));
    }
    let model = |w: f64, p: &[f64; 3]| p[0] * p[2] * p[2] / ((w - p[1]).powi(2) + p[2] * p[2]);
    let (p, ssr) = levenberg_marquardt(&x, &y, [1.0, w0, gamma0], model)?;
    if !(p[2].is_finite() && p[2] != 0.0) {
        return Err(Error::NonConvergence { iterates: p.to_vec() });
    }
    Ok(LinewidthEstimate {
        fwhm: 2.0 * p[2].abs(),
        center: p[1],
        method: LinewidthMethod::LorentzianFit,
        residual: (ssr / x.len() as f64).sqrt(),
        fwhm_error: f64::NAN,
        fit_points: x.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleLinewidth {
    pub g1: AutocorrelationEstimate,
    pub report: LinewidthReport,
    /// Leave-one-trajectory-out jackknife error of the decay-fit FWHM;
    /// `None` for fewer than two trajectories.
    pub jackknife_se: Option<f64>,
}

/// Ensemble `g1`, both linewidth estimates and a jackknife error bar.
pub fn ensemble_linewidth(
    trajs: &[FieldTrajectory],
    max_lag: usize,
    opts: &LinewidthOptions,
) -> Result<EnsembleLinewidth> {
    let first = trajs
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    let fields: Vec<&[Complex64]> = trajs.iter().map(|t| t.field.as_slice()).collect();
    ensemble_from_fields(&fields, first.sample_dt, max_lag, opts)
}

pub(crate) fn ensemble_from_fields(
    fields: &[&[Complex64]],
    sample_dt: f64,
    max_lag: usize,
    opts: &LinewidthOptions,
) -> Result<EnsembleLinewidth> {
    let shortest = fields.iter().map(|f| f.len()).min().unwrap_or(0);
    if max_lag == 0 || 5 * max_lag > shortest {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} must be positive and at most a fifth of the record ({shortest} samples)"
        )));
    }
    let parts: Vec<CorrelationAccumulator> = fields
        .par_iter()
        .map(|f| {
            let mut acc = CorrelationAccumulator::new(sample_dt, max_lag);
            acc.add_field(f);
            acc
        })
        .collect();
    let mut total = CorrelationAccumulator::new(sample_dt, max_lag);
    for p in &parts {
        total.merge(p);
    }
    let g1 = total.finish()?;
    let report = linewidth_with(&g1, opts)?;

    let jackknife_se = if parts.len() < 2 {
        None
    } else {
        let leave_out: Result<Vec<f64>> = parts
            .iter()
            .map(|p| {
                let mut rest = total.clone();
                rest.subtract(p);
                Ok(coherence_decay(&rest.finish()?, opts)?.fwhm)
            })
            .collect();
        match leave_out {
            Ok(values) => {
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
                Some(((n - 1.0) / n * ss).sqrt())
            }
            Err(e) => {
                log::warn!("jackknife skipped: {e}");
                None
            }
        }
    };
    Ok(EnsembleLinewidth {
        g1,
        report,
        jackknife_se,
    })
}
