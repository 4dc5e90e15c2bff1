use faer::linalg::solvers::Solve;
use faer::Mat;

use super::{build_generator, DensityOperator, Generator, HilbertConfig, MAX_FOCK};
use crate::mean_field::steady_state;
use crate::params::LaserParams;
use crate::{Complex64, Error, Result};

/// Largest allowed `‖L(ρ)‖_F` at the returned steady state.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Largest allowed population of the top Fock level.
pub const TRUNCATION_TOLERANCE: f64 = 1e-6;

/// Null vector of the generator with unit trace.
///
/// Only the excitation-balanced sector can carry trace, so the solve is a
/// dense LU of that block with one equation replaced by `Tr ρ = 1`, followed
/// by one step of iterative refinement.
pub fn steady_state_density(gen: &Generator) -> Result<DensityOperator> {
    let sector = gen.sector(0);
    let n = sector.len();
    let mut m = sector.to_dense();
    let anchor = sector.position(0, 0).expect("vacuum pair lies in sector 0");
    for c in 0..n {
        let (i, j) = sector.pairs[c];
        m[(anchor, c)] = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        };
    }
    let mut rhs = Mat::<Complex64>::zeros(n, 1);
    rhs[(anchor, 0)] = Complex64::new(1.0, 0.0);

    let lu = m.partial_piv_lu();
    let mut x = lu.solve(&rhs);
    let correction = lu.solve(&(&rhs - &m * &x));
    x += correction;

    let mut values: Vec<Complex64> = (0..n).map(|k| x[(k, 0)]).collect();
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::DegenerateSteadyState);
    }
    // Symmetrize against round-off and fix the trace exactly.
    let full = sector.scatter(&values);
    let dim = gen.config.dim();
    let rho = Mat::from_fn(dim, dim, |i, j| 0.5 * (full[(i, j)] + full[(j, i)].conj()));
    let tr: Complex64 = (0..dim).map(|i| rho[(i, i)]).sum();
    let scale = 1.0 / tr.re;
    let rho = Mat::from_fn(dim, dim, |i, j| rho[(i, j)] * scale);
    values = sector.gather(&rho);

    let mut out = vec![Complex64::default(); n];
    sector.matvec(&values, &mut out);
    let residual = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if residual > 1e-6 {
        return Err(Error::DegenerateSteadyState);
    }
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::Residual { residual });
    }
    DensityOperator::from_matrix(gen.config, rho)
}

/// Steady state together with the generator and the truncation that
/// produced it.
#[derive(Clone, Debug)]
pub struct MasterSolution {
    pub generator: Generator,
    pub rho: DensityOperator,
}

/// Initial photon truncation for `params`, from the mean-field photon number.
pub fn initial_truncation(params: &LaserParams) -> usize {
    let mean = steady_state(params).map(|s| s.n_a).unwrap_or(4.0);
    ((2.0 * mean + 8.0 * mean.sqrt() + 10.0).ceil() as usize).clamp(8, MAX_FOCK)
}

/// Solves with growing photon truncation (25% per step) until the top Fock
/// level holds less than [`TRUNCATION_TOLERANCE`].
pub fn solve_steady_state(params: &LaserParams) -> Result<MasterSolution> {
    solve_from(params, initial_truncation(params))
}

pub fn solve_from(params: &LaserParams, n_fock: usize) -> Result<MasterSolution> {
    let mut n_fock = n_fock.min(MAX_FOCK);
    loop {
        let config = HilbertConfig::new(n_fock, params.n0)?;
        let generator = build_generator(params, &config)?;
        let rho = steady_state_density(&generator)?;
        let top = rho.top_population();
        if top < TRUNCATION_TOLERANCE {
            return Ok(MasterSolution { generator, rho });
        }
        if n_fock == MAX_FOCK {
            return Err(Error::Truncation {
                n_fock,
                top_population: top,
            });
        }
        n_fock = ((n_fock as f64 * 1.25).ceil() as usize).min(MAX_FOCK);
        log::debug!("raising photon truncation to {n_fock} (top level held {top:.2e})");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::g2_zero_me;

    #[test]
    fn unpumped_laser_relaxes_to_vacuum() {
        let p = LaserParams::photonic_crystal(0.0).with_emitters(2);
        let gen = build_generator(&p, &HilbertConfig::new(4, 2).unwrap()).unwrap();
        let rho = steady_state_density(&gen).unwrap();
        assert!((rho.matrix[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_emitter_follows_rate_balance() {
        let p = LaserParams {
            g: 0.0,
            ..LaserParams::photonic_crystal(0.03).with_emitters(1)
        };
        let sol = solve_from(&p, 3).unwrap();
        let expected = 0.03 / (0.03 + 0.012);
        assert!((sol.rho.mean_excited() - expected).abs() < 1e-12);
        assert!(sol.rho.mean_photons() < 1e-14);
    }

    #[test]
    fn steady_state_satisfies_invariants() {
        for (pump, n0) in [(0.01, 1), (0.2, 2), (0.6, 3), (3.0, 1)] {
            let p = LaserParams::photonic_crystal(pump).with_emitters(n0);
            let sol = solve_steady_state(&p).unwrap();
            sol.rho.validate().unwrap();
            let residual = sol.generator.apply(&sol.rho.matrix);
            let mut worst = 0.0f64;
            for j in 0..residual.ncols() {
                for i in 0..residual.nrows() {
                    worst = worst.max(residual[(i, j)].norm());
                }
            }
            assert!(worst < 1e-10, "{worst}");
            assert!(sol.rho.top_population() < TRUNCATION_TOLERANCE);
        }
    }

    #[test]
    fn truncation_insensitivity() {
        let p = LaserParams::photonic_crystal(0.4).with_emitters(2);
        let base = solve_steady_state(&p).unwrap();
        let n = base.generator.config.n_fock;
        let wider = solve_from(&p, (n as f64 * 1.25).ceil() as usize).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b;
        assert!(rel(base.rho.mean_photons(), wider.rho.mean_photons()) < 0.01);
        let (g_a, g_b) = (g2_zero_me(&base.rho).unwrap(), g2_zero_me(&wider.rho).unwrap());
        assert!(rel(g_a, g_b) < 0.01);
    }

    #[test]
    fn adiabatic_elimination_is_consistent() {
        // Dephasing/g ≈ 11 here; deep above threshold fluctuations are
        // negligible against the mean.
        let p = LaserParams::photonic_crystal(0.6).with_emitters(3);
        assert!(p.validity().margin >= 10.0);
        let me = solve_steady_state(&p).unwrap().rho.mean_photons();
        let mf = steady_state(&p).unwrap().n_a;
        assert!((me - mf).abs() / mf < 0.1, "ME {me} vs mean field {mf}");
    }

    #[test]
    fn truncation_failure_is_reported() {
        let p = LaserParams::photonic_crystal(0.6).with_emitters(3);
        let config = HilbertConfig::new(3, 3).unwrap();
        let rho = steady_state_density(&build_generator(&p, &config).unwrap()).unwrap();
        assert!(rho.top_population() > TRUNCATION_TOLERANCE);
    }
}
