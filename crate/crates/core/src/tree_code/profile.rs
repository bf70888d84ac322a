use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest fragment the crate handles; fragments are stored as `u64` column indices.
pub const MAX_FRAGMENT_BITS: usize = 63;

/// Information and parity lengths of every section of the tree code.
///
/// Section `ℓ` carries `info_bits[ℓ]` message bits followed by `parity_bits[ℓ]`
/// parity bits. The first section never carries parity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct ParityProfile {
    info_bits: Vec<usize>,
    parity_bits: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    info: Vec<usize>,
    parity: Vec<usize>,
}

impl TryFrom<RawProfile> for ParityProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        ParityProfile::new(raw.info, raw.parity)
    }
}

impl From<ParityProfile> for RawProfile {
    fn from(p: ParityProfile) -> Self {
        RawProfile {
            info: p.info_bits,
            parity: p.parity_bits,
        }
    }
}

impl ParityProfile {
    pub fn new(info_bits: Vec<usize>, parity_bits: Vec<usize>) -> Result<Self> {
        if info_bits.is_empty() {
            return Err(Error::invalid("profile needs at least one section"));
        }
        if info_bits.len() != parity_bits.len() {
            return Err(Error::invalid(format!(
                "info has {} sections but parity has {}",
                info_bits.len(),
                parity_bits.len()
            )));
        }
        if parity_bits[0] != 0 {
            return Err(Error::invalid("first section must carry no parity"));
        }
        for (slot, (&m, &l)) in info_bits.iter().zip(&parity_bits).enumerate() {
            let v = m + l;
            if v == 0 {
                return Err(Error::invalid(format!("section {slot} is empty")));
            }
            if v > MAX_FRAGMENT_BITS {
                return Err(Error::invalid(format!(
                    "section {slot} has {v} bits, at most {MAX_FRAGMENT_BITS} supported"
                )));
            }
        }
        Ok(ParityProfile {
            info_bits,
            parity_bits,
        })
    }

    /// Profile with a constant fragment length `v` and the given parity lengths.
    pub fn with_fragment_len(v: usize, parity_bits: Vec<usize>) -> Result<Self> {
        let info = parity_bits
            .iter()
            .map(|&l| {
                v.checked_sub(l)
                    .ok_or_else(|| Error::invalid(format!("parity length {l} exceeds fragment length {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ParityProfile::new(info, parity_bits)
    }

    /// Number of sections `L`.
    pub fn sections(&self) -> usize {
        self.info_bits.len()
    }

    /// Total message length `B`.
    pub fn message_bits(&self) -> usize {
        self.info_bits.iter().sum()
    }

    pub fn info_bits(&self, slot: usize) -> usize {
        self.info_bits[slot]
    }

    pub fn parity_bits(&self, slot: usize) -> usize {
        self.parity_bits[slot]
    }

    pub fn fragment_bits(&self, slot: usize) -> usize {
        self.info_bits[slot] + self.parity_bits[slot]
    }

    pub fn info(&self) -> &[usize] {
        &self.info_bits
    }

    pub fn parity(&self) -> &[usize] {
        &self.parity_bits
    }

    /// Information part of a fragment of section `slot`.
    pub fn info_of(&self, slot: usize, fragment: u64) -> u64 {
        fragment >> self.parity_bits[slot]
    }

    /// Parity part of a fragment of section `slot`.
    pub fn parity_of(&self, slot: usize, fragment: u64) -> u64 {
        fragment & mask(self.parity_bits[slot])
    }

    /// Fragment index `[w p]_2`: information bits first, then parity, MSB first.
    pub fn join(&self, slot: usize, info: u64, parity: u64) -> u64 {
        (info << self.parity_bits[slot]) | parity
    }
}

impl fmt::Display for ParityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={:?} l={:?}", self.info_bits, self.parity_bits)
    }
}

pub(crate) fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A `B`-bit message stored as its `L` information sections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message(pub Vec<u64>);

impl Message {
    pub fn sections(&self) -> &[u64] {
        &self.0
    }

    pub fn random<R: Rng + ?Sized>(profile: &ParityProfile, rng: &mut R) -> Self {
        Message(
            profile
                .info()
                .iter()
                .map(|&m| if m == 0 { 0 } else { rng.random::<u64>() & mask(m) })
                .collect(),
        )
    }

    /// Splits an MSB-first bit string into sections of the profile.
    pub fn from_bits(profile: &ParityProfile, bits: &[bool]) -> Result<Self> {
        if bits.len() != profile.message_bits() {
            return Err(Error::invalid(format!(
                "message has {} bits, profile expects {}",
                bits.len(),
                profile.message_bits()
            )));
        }
        let mut rest = bits;
        let sections = profile
            .info()
            .iter()
            .map(|&m| {
                let (head, tail) = rest.split_at(m);
                rest = tail;
                head.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
            })
            .collect();
        Ok(Message(sections))
    }

    pub fn to_bits(&self, profile: &ParityProfile) -> Vec<bool> {
        self.0
            .iter()
            .zip(profile.info())
            .flat_map(|(&w, &m)| (0..m).rev().map(move |i| (w >> i) & 1 == 1))
            .collect()
    }

    pub fn to_bit_string(&self, profile: &ParityProfile) -> String {
        self.to_bits(profile)
            .into_iter()
            .map(|b| if b { '1' } else { '0' })
            .collect()
    }

    pub(crate) fn check(&self, profile: &ParityProfile) -> Result<()> {
        if self.0.len() != profile.sections() {
            return Err(Error::invalid(format!(
                "message has {} sections, profile has {}",
                self.0.len(),
                profile.sections()
            )));
        }
        for (slot, (&w, &m)) in self.0.iter().zip(profile.info()).enumerate() {
            if w & !mask(m) != 0 {
                return Err(Error::invalid(format!(
                    "section {slot} value {w} does not fit in {m} bits"
                )));
            }
        }
        Ok(())
    }
}
