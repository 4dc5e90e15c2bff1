use std::f64::consts::{PI, TAU};

use rustfft::FftPlanner;

use super::AutocorrelationEstimate;
use crate::Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    /// Weight at lag `k` of a window reaching zero at `|k| = half + 1`.
    fn weight(self, k: usize, half: usize) -> f64 {
        match self {
            Window::Hann => 0.5 * (1.0 + (PI * k as f64 / (half + 1) as f64).cos()),
            Window::Rectangular => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumOptions {
    pub window: Window,
    /// Zero-padding factor of the two-sided lag sequence; 1 gives the native
    /// grid spacing `2π / lag span`.
    pub zero_pad: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            window: Window::Hann,
            zero_pad: 1,
        }
    }
}

/// `S(ω)` on an ascending angular-frequency grid, scaled so that
/// `Σ S Δω / 2π = ⟨|E|²⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
    pub window: Window,
    /// `2π / lag span`, the resolution bandwidth before padding.
    pub resolution: f64,
    pub power: f64,
}

impl SpectrumEstimate {
    pub fn spacing(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }

    /// `∫ S dω / 2π`.
    pub fn integrated_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.spacing() / TAU
    }

    pub fn peak(&self) -> (f64, f64) {
        let (i, &s) = self
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        (self.omega[i], s)
    }
}

pub fn spectrum(g1: &AutocorrelationEstimate) -> SpectrumEstimate {
    spectrum_with(g1, &SpectrumOptions::default())
}

/// Discrete Fourier transform `S(ω) = Σ_k w_k g1(τ_k) e^{−iωτ_k} Δτ` of the
/// Hermitian two-sided extension of `g1`.
pub fn spectrum_with(g1: &AutocorrelationEstimate, opts: &SpectrumOptions) -> SpectrumEstimate {
    let half = g1.len() - 1;
    let two_sided = 2 * half + 1;
    let size = two_sided * opts.zero_pad.max(1);
    let mut buf = vec![Complex64::default(); size];
    for k in 0..=half {
        let w = opts.window.weight(k, half);
        buf[k] = g1.values[k] * w;
        if k > 0 {
            buf[size - k] = g1.values[k].conj() * w;
        }
    }
    FftPlanner::new().plan_fft_forward(size).process(&mut buf);

    let dt = g1.lag_dt;
    let step = TAU / (size as f64 * dt);
    // Reorder to ascending frequency.
    let negatives = size / 2;
    let mut omega = Vec::with_capacity(size);
    let mut density = Vec::with_capacity(size);
    for m in (size - negatives)..size {
        omega.push((m as f64 - size as f64) * step);
        density.push(buf[m].re * dt * g1.power);
    }
    for m in 0..(size - negatives) {
        omega.push(m as f64 * step);
        density.push(buf[m].re * dt * g1.power);
    }
    SpectrumEstimate {
        omega,
        density,
        window: opts.window,
        resolution: TAU / (two_sided as f64 * dt),
        power: g1.power,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn estimate(lag_dt: f64, values: Vec<Complex64>) -> AutocorrelationEstimate {
        AutocorrelationEstimate {
            lag_dt,
            counts: vec![1; values.len()],
            values,
            power: 1.0,
        }
    }

    fn half_max_width(s: &SpectrumEstimate) -> f64 {
        let (_, peak) = s.peak();
        let above: Vec<f64> = s
            .omega
            .iter()
            .zip(&s.density)
            .filter(|(_, &d)| d >= 0.5 * peak)
            .map(|(&w, _)| w)
            .collect();
        above.last().unwrap() - above.first().unwrap() + s.spacing()
    }

    #[test]
    fn exponential_coherence_gives_lorentzian() {
        let gamma = 0.05;
        let dt = 0.5;
        let values = (0..4000).map(|k| Complex64::new((-gamma * k as f64 * dt).exp(), 0.0)).collect();
        let s = spectrum_with(&estimate(dt, values), &SpectrumOptions { window: Window::Hann, zero_pad: 1 });
        let (w0, peak) = s.peak();
        assert!(w0.abs() <= s.spacing());
        // Analytic pair: e^{−Γ|τ|} ↔ 2Γ / (Γ² + ω²), FWHM 2Γ.
        assert!((peak - 2.0 / gamma).abs() / (2.0 / gamma) < 0.02);
        let width = half_max_width(&s);
        assert!((width - 2.0 * gamma).abs() <= 2.0 * s.spacing(), "{width}");
    }

    #[test]
    fn pure_rotation_peaks_at_rotation_frequency() {
        let omega = 0.7;
        let dt = 0.1;
        let values = (0..2000).map(|k| Complex64::from_polar(1.0, omega * k as f64 * dt)).collect();
        let s = spectrum(&estimate(dt, values));
        let (w0, _) = s.peak();
        assert!((w0 - omega).abs() <= s.spacing(), "{w0}");
    }

    #[test]
    fn integrated_power_equals_normalization() {
        let values = (0..300).map(|k| Complex64::from_polar((-0.01 * k as f64).exp(), 0.02 * k as f64)).collect();
        let mut g = estimate(0.3, values);
        g.power = 12.5;
        for zero_pad in [1, 3] {
            let s = spectrum_with(&g, &SpectrumOptions { window: Window::Hann, zero_pad });
            assert!((s.integrated_power() - 12.5).abs() < 1e-9);
            assert_eq!(s.omega.len(), 599 * zero_pad);
        }
    }

    #[test]
    fn grid_is_ascending_with_native_spacing() {
        let values = vec![Complex64::new(1.0, 0.0); 50];
        let s = spectrum(&estimate(2.0, values));
        assert!(s.omega.windows(2).all(|w| w[1] > w[0]));
        assert!((s.spacing() - TAU / (99.0 * 2.0)).abs() < 1e-12);
        assert!((s.resolution - s.spacing()).abs() < 1e-15);
    }
}
