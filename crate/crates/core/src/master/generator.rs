use faer::Mat;

use super::HilbertConfig;
use crate::params::LaserParams;
use crate::{Complex64, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sparse operator stored by columns: `cols[p]` lists `(row, value)`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SparseOp {
    pub cols: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOp {
    fn from_fn(dim: usize, f: impl Fn(usize) -> Vec<(usize, Complex64)>) -> Self {
        Self {
            cols: (0..dim).map(f).collect(),
        }
    }

    fn scaled(mut self, s: f64) -> Self {
        for col in &mut self.cols {
            for (_, v) in col.iter_mut() {
                *v *= s;
            }
        }
        self
    }

    #[cfg(test)]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.cols[col]
            .iter()
            .filter(|(r, _)| *r == row)
            .map(|(_, v)| *v)
            .sum()
    }
}

pub(crate) fn annihilation(cfg: &HilbertConfig) -> SparseOp {
    SparseOp::from_fn(cfg.dim(), |p| {
        let n = cfg.photons(p);
        if n == 0 {
            vec![]
        } else {
            vec![(cfg.index(n - 1, cfg.bits(p)), Complex64::new((n as f64).sqrt(), 0.0))]
        }
    })
}

fn emitter_lowering(cfg: &HilbertConfig, j: u32) -> SparseOp {
    SparseOp::from_fn(cfg.dim(), |p| {
        if p >> j & 1 == 1 {
            vec![(p & !(1 << j), Complex64::new(1.0, 0.0))]
        } else {
            vec![]
        }
    })
}

fn emitter_raising(cfg: &HilbertConfig, j: u32) -> SparseOp {
    SparseOp::from_fn(cfg.dim(), |p| {
        if p >> j & 1 == 0 {
            vec![(p | 1 << j, Complex64::new(1.0, 0.0))]
        } else {
            vec![]
        }
    })
}

fn emitter_inversion(cfg: &HilbertConfig, j: u32) -> SparseOp {
    SparseOp::from_fn(cfg.dim(), |p| {
        let z = if p >> j & 1 == 1 { 1.0 } else { -1.0 };
        vec![(p, Complex64::new(z, 0.0))]
    })
}

/// Lindblad generator
/// `L(ρ) = −i(H_eff ρ − ρ H_eff†) + Σ_k L_k ρ L_k†`, with
/// `H_eff = H − (i/2) Σ_k L_k† L_k`.
///
/// Jump operators: `√κ a`, and per emitter `√P σ⁺`, `√γ_A σ⁻`,
/// `√(γ_D/4) σ_z`. The last one damps the emitter coherence at `γ_D/2`, so
/// the polarization decays at `(P + κ + γ_A + γ_D)/2` as assumed by `γ_r`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub config: HilbertConfig,
    pub params: LaserParams,
    pub(crate) heff: SparseOp,
    pub(crate) jumps: Vec<SparseOp>,
}

pub fn build_generator(params: &LaserParams, config: &HilbertConfig) -> Result<Generator> {
    params.validate()?;
    config.validate()?;
    if params.n0 != config.n_emitters {
        return Err(Error::InvalidArgument(format!(
            "parameters describe {} emitters but the Hilbert space holds {}",
            params.n0, config.n_emitters
        )));
    }
    let cfg = *config;
    let m = cfg.n_emitters;
    let g = params.g;
    let dim = cfg.dim();

    let mut jumps = Vec::new();
    if params.kappa > 0.0 {
        jumps.push(annihilation(&cfg).scaled(params.kappa.sqrt()));
    }
    for j in 0..m {
        if params.pump > 0.0 {
            jumps.push(emitter_raising(&cfg, j).scaled(params.pump.sqrt()));
        }
        if params.gamma_a > 0.0 {
            jumps.push(emitter_lowering(&cfg, j).scaled(params.gamma_a.sqrt()));
        }
        if params.gamma_d > 0.0 {
            jumps.push(emitter_inversion(&cfg, j).scaled((params.gamma_d / 4.0).sqrt()));
        }
    }

    let heff = SparseOp::from_fn(dim, |p| {
        let n = cfg.photons(p);
        let bits = cfg.bits(p);
        let mut col = Vec::new();
        let excited = bits.count_ones() as f64;
        // Σ L†L is diagonal for every jump operator used here.
        let loss = params.kappa * n as f64
            + params.pump * (f64::from(m) - excited)
            + params.gamma_a * excited
            + params.gamma_d / 4.0 * f64::from(m);
        if loss != 0.0 {
            col.push((p, Complex64::new(0.0, -0.5 * loss)));
        }
        if g != 0.0 {
            for j in 0..m {
                if bits >> j & 1 == 1 {
                    // a† σ⁻: emitter j hands its excitation to the cavity.
                    if n < cfg.n_fock {
                        let v = g * ((n + 1) as f64).sqrt();
                        col.push((cfg.index(n + 1, bits & !(1 << j)), Complex64::new(v, 0.0)));
                    }
                } else if n > 0 {
                    let v = g * (n as f64).sqrt();
                    col.push((cfg.index(n - 1, bits | 1 << j), Complex64::new(v, 0.0)));
                }
            }
        }
        col
    });

    Ok(Generator {
        config: cfg,
        params: *params,
        heff,
        jumps,
    })
}

impl Generator {
    /// Applies the generator to an arbitrary operator.
    pub fn apply(&self, rho: &Mat<Complex64>) -> Mat<Complex64> {
        let dim = self.config.dim();
        assert_eq!((rho.nrows(), rho.ncols()), (dim, dim));
        let mut out = Mat::<Complex64>::zeros(dim, dim);
        for (p, col) in self.heff.cols.iter().enumerate() {
            for &(i, h) in col {
                for q in 0..dim {
                    out[(i, q)] += -I * h * rho[(p, q)];
                    out[(q, i)] += I * h.conj() * rho[(q, p)];
                }
            }
        }
        for l in &self.jumps {
            for (p, cp) in l.cols.iter().enumerate() {
                for (q, cq) in l.cols.iter().enumerate() {
                    let r = rho[(p, q)];
                    if r == Complex64::default() {
                        continue;
                    }
                    for &(i, a) in cp {
                        for &(j, b) in cq {
                            out[(i, j)] += a * r * b.conj();
                        }
                    }
                }
            }
        }
        out
    }

    /// Restriction of the generator to operators `|i⟩⟨j|` with
    /// `excitations(i) − excitations(j) = shift`, which it leaves invariant.
    pub(crate) fn sector(&self, shift: i64) -> SectorMatrix {
        let cfg = &self.config;
        let dim = cfg.dim();
        let mut pairs = Vec::new();
        let mut lookup = vec![u32::MAX; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                if cfg.excitations(i) as i64 - cfg.excitations(j) as i64 == shift {
                    lookup[i * dim + j] = pairs.len() as u32;
                    pairs.push((i, j));
                }
            }
        }
        let at = |i: usize, j: usize| {
            let k = lookup[i * dim + j];
            debug_assert_ne!(k, u32::MAX, "generator left the sector");
            k as usize
        };
        let mut col_ptr = Vec::with_capacity(pairs.len() + 1);
        let mut rows = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for &(p, q) in &pairs {
            let mut entries: Vec<(usize, Complex64)> = Vec::new();
            for &(i, h) in &self.heff.cols[p] {
                entries.push((at(i, q), -I * h));
            }
            for &(j, h) in &self.heff.cols[q] {
                entries.push((at(p, j), I * h.conj()));
            }
            for l in &self.jumps {
                for &(i, a) in &l.cols[p] {
                    for &(j, b) in &l.cols[q] {
                        entries.push((at(i, j), a * b.conj()));
                    }
                }
            }
            entries.sort_by_key(|e| e.0);
            let mut last = usize::MAX;
            for (r, v) in entries {
                if r == last {
                    *vals.last_mut().unwrap() += v;
                } else {
                    rows.push(r);
                    vals.push(v);
                    last = r;
                }
            }
            col_ptr.push(rows.len());
        }
        SectorMatrix {
            pairs,
            lookup,
            dim,
            col_ptr,
            rows,
            vals,
        }
    }
}

/// Column-compressed generator block acting on one excitation sector.
#[derive(Clone, Debug)]
pub(crate) struct SectorMatrix {
    /// `(row, col)` of the density-matrix element behind each unknown.
    pub pairs: Vec<(usize, usize)>,
    lookup: Vec<u32>,
    dim: usize,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SectorMatrix {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let k = self.lookup[i * self.dim + j];
        (k != u32::MAX).then_some(k as usize)
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::default());
        for (c, &xc) in x.iter().enumerate() {
            if xc == Complex64::default() {
                continue;
            }
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                y[self.rows[k]] += self.vals[k] * xc;
            }
        }
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let n = self.len();
        let mut m = Mat::<Complex64>::zeros(n, n);
        for c in 0..n {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                m[(self.rows[k], c)] += self.vals[k];
            }
        }
        m
    }

    /// Largest column 1-norm, an upper bound on every eigenvalue modulus.
    pub fn norm_bound(&self) -> f64 {
        (0..self.len())
            .map(|c| (self.col_ptr[c]..self.col_ptr[c + 1]).map(|k| self.vals[k].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn gather(&self, full: &Mat<Complex64>) -> Vec<Complex64> {
        self.pairs.iter().map(|&(i, j)| full[(i, j)]).collect()
    }

    pub fn scatter(&self, x: &[Complex64]) -> Mat<Complex64> {
        let mut m = Mat::<Complex64>::zeros(self.dim, self.dim);
        for (&(i, j), &v) in self.pairs.iter().zip(x) {
            m[(i, j)] = v;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn random_matrix(dim: usize, seed: u64) -> Mat<Complex64> {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        Mat::from_fn(dim, dim, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn trace(m: &Mat<Complex64>) -> Complex64 {
        (0..m.nrows()).map(|i| m[(i, i)]).sum()
    }

    fn max_abs(m: &Mat<Complex64>) -> f64 {
        let mut best = 0.0f64;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                best = best.max(m[(i, j)].norm());
            }
        }
        best
    }

    #[test]
    fn uncoupled_lossless_generator_vanishes() {
        let p = LaserParams {
            g: 0.0,
            kappa: 0.0,
            gamma_a: 0.0,
            gamma_d: 0.0,
            n0: 2,
            pump: 0.0,
            alpha: 0.0,
        };
        let gen = build_generator(&p, &HilbertConfig::new(4, 2).unwrap()).unwrap();
        assert!(max_abs(&gen.apply(&random_matrix(20, 1))) == 0.0);
        assert!(gen.jumps.is_empty());
    }

    #[test]
    fn generator_preserves_trace() {
        let p = LaserParams::photonic_crystal(0.3).with_emitters(2);
        let gen = build_generator(&p, &HilbertConfig::new(5, 2).unwrap()).unwrap();
        let rho = random_matrix(gen.config.dim(), 2);
        assert!(trace(&gen.apply(&rho)).norm() < 1e-12);
    }

    #[test]
    fn generator_preserves_hermiticity() {
        let p = LaserParams::photonic_crystal(0.3).with_emitters(2);
        let gen = build_generator(&p, &HilbertConfig::new(4, 2).unwrap()).unwrap();
        let x = random_matrix(gen.config.dim(), 3);
        let h = Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] + x[(j, i)].conj());
        let out = gen.apply(&h);
        let err = Mat::from_fn(out.nrows(), out.ncols(), |i, j| out[(i, j)] - out[(j, i)].conj());
        assert!(max_abs(&err) < 1e-12);
    }

    #[test]
    fn hamiltonian_matches_jaynes_cummings_elements() {
        let p = LaserParams {
            kappa: 0.0,
            gamma_a: 0.0,
            gamma_d: 0.0,
            pump: 0.0,
            ..LaserParams::photonic_crystal(0.0).with_emitters(1)
        };
        let cfg = HilbertConfig::new(3, 1).unwrap();
        let gen = build_generator(&p, &cfg).unwrap();
        // ⟨n+1, g| H |n, e⟩ = g √(n+1)
        for n in 0..3 {
            let v = gen.heff.get(cfg.index(n + 1, 0), cfg.index(n, 1));
            assert!((v.re - 0.1 * ((n + 1) as f64).sqrt()).abs() < 1e-15 && v.im == 0.0);
            let w = gen.heff.get(cfg.index(n, 1), cfg.index(n + 1, 0));
            assert_eq!(v, w);
        }
    }

    #[test]
    fn dephasing_damps_emitter_coherence_at_half_rate() {
        let p = LaserParams {
            g: 0.0,
            kappa: 0.0,
            gamma_a: 0.0,
            pump: 0.0,
            gamma_d: 0.8,
            ..LaserParams::photonic_crystal(0.0).with_emitters(1)
        };
        let cfg = HilbertConfig::new(1, 1).unwrap();
        let gen = build_generator(&p, &cfg).unwrap();
        let mut rho = Mat::<Complex64>::zeros(cfg.dim(), cfg.dim());
        rho[(1, 0)] = Complex64::new(1.0, 0.0);
        let out = gen.apply(&rho);
        assert!((out[(1, 0)].re + 0.4).abs() < 1e-15);
    }

    #[test]
    fn sector_blocks_reproduce_full_generator() {
        let p = LaserParams::photonic_crystal(0.2).with_emitters(2);
        let gen = build_generator(&p, &HilbertConfig::new(4, 2).unwrap()).unwrap();
        let rho = random_matrix(gen.config.dim(), 4);
        let full = gen.apply(&rho);
        let mut covered = 0;
        for shift in -6..=6 {
            let s = gen.sector(shift);
            covered += s.len();
            let x = s.gather(&rho);
            let mut y = vec![Complex64::default(); s.len()];
            s.matvec(&x, &mut y);
            for (k, &(i, j)) in s.pairs.iter().enumerate() {
                assert!((y[k] - full[(i, j)]).norm() < 1e-12);
            }
            let dense = s.to_dense();
            for c in 0..s.len().min(5) {
                let mut e = vec![Complex64::default(); s.len()];
                e[c] = Complex64::new(1.0, 0.0);
                s.matvec(&e, &mut y);
                for r in 0..s.len() {
                    assert_eq!(dense[(r, c)], y[r]);
                }
            }
        }
        assert_eq!(covered, gen.config.dim().pow(2));
    }

    #[test]
    fn emitter_count_must_match() {
        let p = LaserParams::photonic_crystal(0.2).with_emitters(2);
        assert!(build_generator(&p, &HilbertConfig::new(4, 1).unwrap()).is_err());
    }
}
