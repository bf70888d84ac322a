use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::profile::{mask, Message, ParityProfile};
use crate::error::{Error, Result};

/// Serializable description of a tree code: the profile plus the generator seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookSpec {
    #[serde(rename = "B")]
    pub message_bits: usize,
    #[serde(rename = "L")]
    pub sections: usize,
    pub m: Vec<usize>,
    pub l: Vec<usize>,
    pub seed: u64,
}

/// Random linear tree code over GF(2).
///
/// `generators[slot][j][r]` is row `r` of the `m_j × l_slot` matrix `G_{j,slot}`,
/// packed as an `l_slot`-bit mask. Parity of section `slot` is the XOR of the rows
/// selected by the set bits of every earlier information section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCodebook {
    profile: ParityProfile,
    seed: u64,
    generators: Vec<Vec<Vec<u64>>>,
}

fn generator_rng(seed: u64, source: usize, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((slot as u64) << 32) | source as u64);
    rng
}

impl TreeCodebook {
    /// Draws every generator entry i.i.d. Bernoulli(1/2) from a stream keyed by
    /// `(seed, j, slot)`.
    pub fn new(profile: ParityProfile, seed: u64) -> Self {
        let generators = (0..profile.sections())
            .map(|slot| {
                let l = profile.parity_bits(slot);
                (0..slot)
                    .map(|j| {
                        let mut rng = generator_rng(seed, j, slot);
                        (0..profile.info_bits(j))
                            .map(|_| if l == 0 { 0 } else { rng.random::<u64>() & mask(l) })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        TreeCodebook {
            profile,
            seed,
            generators,
        }
    }

    /// Builds a codebook from explicit generator rows, mainly for hand-worked examples.
    pub fn from_generators(profile: ParityProfile, generators: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        if generators.len() != profile.sections() {
            return Err(Error::invalid("one generator group per section required"));
        }
        for (slot, group) in generators.iter().enumerate() {
            if group.len() != slot {
                return Err(Error::invalid(format!(
                    "section {slot} needs {slot} generator matrices, got {}",
                    group.len()
                )));
            }
            for (j, rows) in group.iter().enumerate() {
                if rows.len() != profile.info_bits(j)
                    || rows.iter().any(|&r| r & !mask(profile.parity_bits(slot)) != 0)
                {
                    return Err(Error::invalid(format!("generator G[{j},{slot}] has the wrong shape")));
                }
            }
        }
        Ok(TreeCodebook {
            profile,
            seed: 0,
            generators,
        })
    }

    pub fn from_spec(spec: &CodebookSpec) -> Result<Self> {
        let profile = ParityProfile::new(spec.m.clone(), spec.l.clone())?;
        if profile.message_bits() != spec.message_bits || profile.sections() != spec.sections {
            return Err(Error::invalid(format!(
                "B={} L={} disagree with m={:?}",
                spec.message_bits, spec.sections, spec.m
            )));
        }
        Ok(TreeCodebook::new(profile, spec.seed))
    }

    pub fn spec(&self) -> CodebookSpec {
        CodebookSpec {
            message_bits: self.profile.message_bits(),
            sections: self.profile.sections(),
            m: self.profile.info().to_vec(),
            l: self.profile.parity().to_vec(),
            seed: self.seed,
        }
    }

    pub fn profile(&self) -> &ParityProfile {
        &self.profile
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Row `r` of `G_{source, slot}` as an `l_slot`-bit mask.
    pub fn generator_row(&self, source: usize, slot: usize, row: usize) -> u64 {
        self.generators[slot][source][row]
    }

    /// Parity of section `slot` from the information sections before it.
    ///
    /// Slots are zero-based, so `slot` ranges over `1..L` and `prefix` must hold
    /// exactly `slot` sections.
    pub fn compute_parity(&self, prefix: &[u64], slot: usize) -> Result<u64> {
        if slot == 0 || slot >= self.profile.sections() {
            return Err(Error::invalid(format!(
                "parity slot {slot} outside 1..{}",
                self.profile.sections()
            )));
        }
        if prefix.len() != slot {
            return Err(Error::invalid(format!(
                "parity of slot {slot} needs {slot} prefix sections, got {}",
                prefix.len()
            )));
        }
        Ok(self.parity_unchecked(prefix, slot))
    }

    pub(crate) fn parity_unchecked(&self, prefix: &[u64], slot: usize) -> u64 {
        let mut parity = 0u64;
        for (j, (&w, rows)) in prefix.iter().zip(&self.generators[slot]).enumerate() {
            let m = self.profile.info_bits(j);
            for (r, &row) in rows.iter().enumerate() {
                // row r multiplies the r-th most significant bit of w(j)
                if (w >> (m - 1 - r)) & 1 == 1 {
                    parity ^= row;
                }
            }
        }
        parity
    }

    /// Outer-encodes a message into its `L` fragments `v(ℓ) = w(ℓ) p(ℓ)`.
    pub fn encode(&self, message: &Message) -> Result<Vec<u64>> {
        message.check(&self.profile)?;
        let w = message.sections();
        Ok((0..self.profile.sections())
            .map(|slot| {
                let parity = if slot == 0 { 0 } else { self.parity_unchecked(&w[..slot], slot) };
                self.profile.join(slot, w[slot], parity)
            })
            .collect())
    }
}
