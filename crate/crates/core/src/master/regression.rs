use super::{DensityOperator, Generator};
use crate::observables::{spectrum, AutocorrelationEstimate, SpectrumEstimate};
use crate::{Complex64, Error, Result};

/// Field correlation and spectrum from the quantum regression theorem.
#[derive(Clone, Debug)]
pub struct MeCoherence {
    pub g1: AutocorrelationEstimate,
    pub spectrum: SpectrumEstimate,
    /// `false` when `|g1|` is still above 0.2 at the last lag, in which case
    /// the lag span is too short for a linewidth.
    pub resolved: bool,
}

/// `g1(τ) = ⟨a†(t) a(t+τ)⟩ / ⟨a†a⟩` on `τ_k = k · lag_dt`, obtained by
/// evolving `B(τ) = e^{Lτ}(aρ)` with fixed-step RK4 and reading
/// `Tr[a† B(τ)]`, whose conjugate is the normally ordered correlation.
pub fn spectrum_me(
    gen: &Generator,
    rho: &DensityOperator,
    lag_dt: f64,
    max_lag: usize,
) -> Result<MeCoherence> {
    if !(lag_dt > 0.0) || max_lag == 0 {
        return Err(Error::InvalidArgument(format!(
            "lag grid needs lag_dt > 0 and max_lag > 0, got {lag_dt} and {max_lag}"
        )));
    }
    if rho.config != gen.config {
        return Err(Error::InvalidArgument("state and generator use different truncations".into()));
    }
    let cfg = gen.config;
    let sector = gen.sector(-1);
    let n = sector.len();

    // (aρ)_{ij} = √(n_i + 1) ρ_{(n_i+1, b_i), j}; a† weights the same pairs.
    let mut state = vec![Complex64::default(); n];
    let mut weight = vec![0.0; n];
    for (k, &(i, j)) in sector.pairs.iter().enumerate() {
        let photons = cfg.photons(i);
        if photons < cfg.n_fock {
            let up = cfg.index(photons + 1, cfg.bits(i));
            let amp = ((photons + 1) as f64).sqrt();
            state[k] = amp * rho.matrix[(up, j)];
            if up == j {
                weight[k] = amp;
            }
        }
    }
    // Tr[a† B] = Σ_{i} √(n_i+1) B_{i,(n_i+1,b_i)}: only pairs with j = i + one photon.
    let read = |b: &[Complex64]| -> Complex64 {
        b.iter().zip(&weight).map(|(v, w)| v * *w).sum::<Complex64>().conj()
    };

    let steps = (lag_dt * sector.norm_bound() / 2.5).ceil().max(1.0) as usize;
    let h = lag_dt / steps as f64;
    let mut raw = Vec::with_capacity(max_lag + 1);
    raw.push(read(&state));
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = vec![Complex64::default(); n];
    let mut k3 = vec![Complex64::default(); n];
    let mut k4 = vec![Complex64::default(); n];
    let mut tmp = vec![Complex64::default(); n];
    for _ in 0..max_lag {
        for _ in 0..steps {
            sector.matvec(&state, &mut k1);
            axpy(&state, 0.5 * h, &k1, &mut tmp);
            sector.matvec(&tmp, &mut k2);
            axpy(&state, 0.5 * h, &k2, &mut tmp);
            sector.matvec(&tmp, &mut k3);
            axpy(&state, h, &k3, &mut tmp);
            sector.matvec(&tmp, &mut k4);
            for idx in 0..n {
                state[idx] += h / 6.0 * (k1[idx] + 2.0 * (k2[idx] + k3[idx]) + k4[idx]);
            }
        }
        raw.push(read(&state));
    }

    let g1 = AutocorrelationEstimate::from_unnormalized(lag_dt, &raw)?;
    let resolved = g1.values.last().is_some_and(|z| z.norm() < 0.2);
    if !resolved {
        log::warn!(
            "master-equation g1 only decays to {:.3} within {} ps; extend the lag span",
            g1.values.last().map_or(1.0, |z| z.norm()),
            lag_dt * max_lag as f64
        );
    }
    let spectrum = spectrum(&g1);
    Ok(MeCoherence {
        g1,
        spectrum,
        resolved,
    })
}

fn axpy(x: &[Complex64], a: f64, y: &[Complex64], out: &mut [Complex64]) {
    for ((o, xv), yv) in out.iter_mut().zip(x).zip(y) {
        *o = xv + a * yv;
    }
}
