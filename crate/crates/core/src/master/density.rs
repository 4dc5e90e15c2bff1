use faer::{Mat, Side};

use super::HilbertConfig;
use crate::{Complex64, Error, Result};

/// Density matrix on a truncated Hilbert space.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    pub config: HilbertConfig,
    pub matrix: Mat<Complex64>,
}

impl DensityOperator {
    pub fn from_matrix(config: HilbertConfig, matrix: Mat<Complex64>) -> Result<Self> {
        if (matrix.nrows(), matrix.ncols()) != (config.dim(), config.dim()) {
            return Err(Error::InvalidArgument(format!(
                "density matrix is {}x{}, expected side {}",
                matrix.nrows(),
                matrix.ncols(),
                config.dim()
            )));
        }
        Ok(Self { config, matrix })
    }

    /// Pure state with the given photon-number amplitudes and all emitters
    /// in the ground state; amplitudes are renormalized.
    pub fn pure_photon_state(config: HilbertConfig, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() > config.n_fock + 1 {
            return Err(Error::InvalidArgument("more amplitudes than Fock levels".into()));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let dim = config.dim();
        let mut psi = vec![Complex64::default(); dim];
        for (n, c) in amplitudes.iter().enumerate() {
            psi[config.index(n, 0)] = c / norm;
        }
        let matrix = Mat::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj());
        Ok(Self { config, matrix })
    }

    pub fn fock(config: HilbertConfig, n: usize) -> Result<Self> {
        let mut amps = vec![Complex64::default(); n + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::pure_photon_state(config, &amps)
    }

    /// Coherent state of amplitude `beta`, truncated and renormalized.
    pub fn coherent(config: HilbertConfig, beta: Complex64) -> Result<Self> {
        let mut amps = Vec::with_capacity(config.n_fock + 1);
        let mut c = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
        for n in 0..=config.n_fock {
            if n > 0 {
                c *= beta / (n as f64).sqrt();
            }
            amps.push(c);
        }
        Self::pure_photon_state(config, &amps)
    }

    /// Bose-Einstein mixture of mean `mean`, truncated and renormalized.
    pub fn thermal(config: HilbertConfig, mean: f64) -> Result<Self> {
        let ratio = mean / (1.0 + mean);
        let weights: Vec<f64> = (0..=config.n_fock).map(|n| ratio.powi(n as i32)).collect();
        let total: f64 = weights.iter().sum();
        let dim = config.dim();
        let mut matrix = Mat::<Complex64>::zeros(dim, dim);
        for (n, w) in weights.iter().enumerate() {
            let i = config.index(n, 0);
            matrix[(i, i)] = Complex64::new(w / total, 0.0);
        }
        Ok(Self { config, matrix })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.config.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.config.dim();
        let mut worst = 0.0f64;
        for j in 0..dim {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = self
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::InvalidArgument(format!("eigenvalue solve failed: {e:?}")))?;
        Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn purity(&self) -> f64 {
        let dim = self.config.dim();
        let mut s = 0.0;
        for j in 0..dim {
            for i in 0..dim {
                s += self.matrix[(i, j)].norm_sqr();
            }
        }
        s
    }

    /// Checks trace and Hermiticity to 1e-12 and positivity to −1e-10.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).norm() > 1e-12 {
            return Err(Error::InvalidArgument(format!("trace {tr} differs from 1")));
        }
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!("not Hermitian: {herm:.3e}")));
        }
        let min = self.min_eigenvalue()?;
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `p(n)`, tracing out the emitters.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let cfg = &self.config;
        let mut p = vec![0.0; cfg.n_fock + 1];
        for i in 0..cfg.dim() {
            p[cfg.photons(i)] += self.matrix[(i, i)].re;
        }
        p
    }

    pub fn mean_photons(&self) -> f64 {
        self.photon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Mean number of excited emitters.
    pub fn mean_excited(&self) -> f64 {
        (0..self.config.dim())
            .map(|i| self.config.bits(i).count_ones() as f64 * self.matrix[(i, i)].re)
            .sum()
    }

    /// Population of the highest retained Fock level.
    pub fn top_population(&self) -> f64 {
        *self.photon_distribution().last().unwrap()
    }
}

/// `⟨a†a†aa⟩ / ⟨a†a⟩²`.
pub fn g2_zero_me(rho: &DensityOperator) -> Result<f64> {
    let p = rho.photon_distribution();
    let mean: f64 = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
    if !(mean > 0.0) {
        return Err(Error::Undefined("g2(0)"));
    }
    let fact: f64 = p
        .iter()
        .enumerate()
        .map(|(n, w)| n as f64 * (n as f64 - 1.0) * w)
        .sum();
    Ok(fact / (mean * mean))
}
