use crate::{Error, Result};

/// Largest emitter count the dense oracle accepts.
pub const MAX_EMITTERS: u32 = 3;
/// Largest photon truncation reached by automatic growth.
pub const MAX_FOCK: usize = 60;

/// Truncated product space `Fock(0..=n_fock) ⊗ (C²)^{n_emitters}`.
///
/// Basis index `n · 2^m + bits`, where bit `j` of `bits` is set when emitter
/// `j` is excited.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertConfig {
    /// Highest photon number kept.
    pub n_fock: usize,
    pub n_emitters: u32,
    /// Cap on the Hilbert-space dimension.
    pub max_dim: usize,
}

impl HilbertConfig {
    pub fn new(n_fock: usize, n_emitters: u32) -> Result<Self> {
        let cfg = Self {
            n_fock,
            n_emitters,
            max_dim: (MAX_FOCK + 1) << MAX_EMITTERS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_emitters == 0 || self.n_emitters > MAX_EMITTERS {
            return Err(Error::InvalidParameter {
                name: "n0",
                reason: format!(
                    "master equation supports 1..={MAX_EMITTERS} emitters, got {}",
                    self.n_emitters
                ),
            });
        }
        if self.n_fock == 0 {
            return Err(Error::InvalidParameter {
                name: "n_fock",
                reason: "at least one photon level above vacuum is required".into(),
            });
        }
        if self.dim() > self.max_dim {
            return Err(Error::DimensionOverflow {
                dim: self.dim(),
                cap: self.max_dim,
            });
        }
        Ok(())
    }

    pub fn emitter_states(&self) -> usize {
        1 << self.n_emitters
    }

    pub fn dim(&self) -> usize {
        (self.n_fock + 1) * self.emitter_states()
    }

    pub fn index(&self, photons: usize, bits: usize) -> usize {
        (photons << self.n_emitters) | bits
    }

    pub fn photons(&self, i: usize) -> usize {
        i >> self.n_emitters
    }

    pub fn bits(&self, i: usize) -> usize {
        i & (self.emitter_states() - 1)
    }

    /// Photons plus excited emitters; conserved by the resonant coupling.
    pub fn excitations(&self, i: usize) -> usize {
        self.photons(i) + self.bits(i).count_ones() as usize
    }
}
