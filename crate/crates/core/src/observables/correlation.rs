use rustfft::FftPlanner;

use crate::engine::FieldTrajectory;
use crate::{Complex64, Error, Result};

/// Normalized first-order coherence on a uniform lag grid `τ_k = k · lag_dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrelationEstimate {
    pub lag_dt: f64,
    /// `g1(τ_k)` with `g1(0) = 1`; negative lags follow from `g1(−τ) = g1(τ)*`.
    pub values: Vec<Complex64>,
    /// Number of (origin, trajectory) pairs averaged at each lag.
    pub counts: Vec<u64>,
    /// `⟨|E|²⟩`, the normalization, equal to the mean photon number.
    pub power: f64,
}

impl AutocorrelationEstimate {
    /// Wraps precomputed unnormalized correlations `G(τ_k)` with `G(0) > 0`.
    pub fn from_unnormalized(lag_dt: f64, raw: &[Complex64]) -> Result<Self> {
        let power = raw.first().map_or(0.0, |z| z.re);
        if !(power > 0.0) {
            return Err(Error::Undefined("g1"));
        }
        let mut values: Vec<Complex64> = raw.iter().map(|z| z / power).collect();
        values[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            lag_dt,
            counts: vec![1; values.len()],
            values,
            power,
        })
    }

    pub fn lag(&self, k: usize) -> f64 {
        k as f64 * self.lag_dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at any signed lag index, using Hermitian symmetry.
    pub fn at(&self, k: isize) -> Complex64 {
        let v = self.values[k.unsigned_abs()];
        if k < 0 {
            v.conj()
        } else {
            v
        }
    }
}

/// Raw lagged products `Σ E(t+τ) E*(t)` and their counts. Accumulators add
/// and subtract commutatively, so ensembles can be folded in any order.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationAccumulator {
    pub lag_dt: f64,
    pub sums: Vec<Complex64>,
    pub counts: Vec<u64>,
}

impl CorrelationAccumulator {
    pub fn new(lag_dt: f64, max_lag: usize) -> Self {
        Self {
            lag_dt,
            sums: vec![Complex64::default(); max_lag + 1],
            counts: vec![0; max_lag + 1],
        }
    }

    pub fn max_lag(&self) -> usize {
        self.sums.len() - 1
    }

    /// Adds every time origin of `field`, in O(N log N) through the FFT.
    pub fn add_field(&mut self, field: &[Complex64]) {
        let n = field.len();
        if n == 0 {
            return;
        }
        let size = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut buf = vec![Complex64::default(); size];
        buf[..n].copy_from_slice(field);
        fwd.process(&mut buf);
        for z in buf.iter_mut() {
            *z = Complex64::new(z.norm_sqr(), 0.0);
        }
        inv.process(&mut buf);
        let scale = 1.0 / size as f64;
        for k in 0..=self.max_lag().min(n - 1) {
            self.sums[k] += buf[k] * scale;
            self.counts[k] += (n - k) as u64;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn subtract(&mut self, other: &Self) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a -= b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a -= b;
        }
    }

    pub fn finish(&self) -> Result<AutocorrelationEstimate> {
        if self.counts.contains(&0) {
            return Err(Error::InvalidArgument("lag without any time origin".into()));
        }
        let power = self.sums[0].re / self.counts[0] as f64;
        if !(power > 0.0) {
            return Err(Error::Undefined("g1"));
        }
        let mut values: Vec<Complex64> = self
            .sums
            .iter()
            .zip(&self.counts)
            .map(|(s, &c)| s / (c as f64 * power))
            .collect();
        values[0] = Complex64::new(1.0, 0.0);
        Ok(AutocorrelationEstimate {
            lag_dt: self.lag_dt,
            values,
            counts: self.counts.clone(),
            power,
        })
    }
}

/// `g1(τ) = ⟨E(t+τ) E*(t)⟩ / ⟨|E|²⟩`, averaged over all time origins of all
/// trajectories, for lags `0..=max_lag` samples.
pub fn g1(trajs: &[FieldTrajectory], max_lag: usize) -> Result<AutocorrelationEstimate> {
    let first = trajs
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    if trajs.iter().any(|t| t.sample_dt != first.sample_dt) {
        return Err(Error::InvalidArgument("trajectories use different sample_dt".into()));
    }
    let fields: Vec<&[Complex64]> = trajs.iter().map(|t| t.field.as_slice()).collect();
    g1_from_fields(&fields, first.sample_dt, max_lag)
}

pub fn g1_from_fields(
    fields: &[&[Complex64]],
    sample_dt: f64,
    max_lag: usize,
) -> Result<AutocorrelationEstimate> {
    let shortest = fields.iter().map(|f| f.len()).min().unwrap_or(0);
    if max_lag == 0 || 5 * max_lag > shortest {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} must be positive and at most a fifth of the record ({shortest} samples)"
        )));
    }
    let mut acc = CorrelationAccumulator::new(sample_dt, max_lag);
    for f in fields {
        acc.add_field(f);
    }
    acc.finish()
}
