//! Slot-by-slot concatenated decoding.
//!
//! The inner decoder is abstracted as a [`SlotDecoder`]. In [`DecodeMode::Original`]
//! every slot is decoded over all `2^{v_ℓ}` fragments and the tree decoder runs
//! afterwards. In [`DecodeMode::Enhanced`] the partial paths surviving slot `ℓ`
//! determine the admissible parity patterns of slot `ℓ+1`, and the inner decoder
//! only searches fragments carrying one of those patterns.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::codebook::TreeCodebook;
use super::paths::{PathSearch, TreeDecodeOutcome, DEFAULT_PATH_CAP};
use super::profile::ParityProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    Original,
    Enhanced,
}

impl DecodeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodeMode::Original => "original",
            DecodeMode::Enhanced => "enhanced",
        }
    }
}

/// Which fragments of a slot the inner decoder may return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnFilter {
    All,
    /// Fragments whose parity part lies in the set.
    Patterns(BTreeSet<u64>),
}

impl ColumnFilter {
    pub fn column_count(&self, profile: &ParityProfile, slot: usize) -> u64 {
        match self {
            ColumnFilter::All => 1u64 << profile.fragment_bits(slot),
            ColumnFilter::Patterns(set) => (1u64 << profile.info_bits(slot)) * set.len() as u64,
        }
    }

    pub fn admits(&self, profile: &ParityProfile, slot: usize, fragment: u64) -> bool {
        match self {
            ColumnFilter::All => true,
            ColumnFilter::Patterns(set) => set.contains(&profile.parity_of(slot, fragment)),
        }
    }

    /// Admissible fragment indices in ascending order.
    pub fn columns(&self, profile: &ParityProfile, slot: usize) -> Vec<u64> {
        match self {
            ColumnFilter::All => (0..1u64 << profile.fragment_bits(slot)).collect(),
            ColumnFilter::Patterns(set) => (0..1u64 << profile.info_bits(slot))
                .flat_map(|w| set.iter().map(move |&p| profile.join(slot, w, p)))
                .collect(),
        }
    }
}

/// Inner decoder producing the fragment list of one slot.
pub trait SlotDecoder {
    fn decode_slot(&mut self, slot: usize, filter: &ColumnFilter) -> Result<Vec<u64>>;
}

impl<F> SlotDecoder for F
where
    F: FnMut(usize, &ColumnFilter) -> Result<Vec<u64>>,
{
    fn decode_slot(&mut self, slot: usize, filter: &ColumnFilter) -> Result<Vec<u64>> {
        self(slot, filter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOptions {
    pub path_cap: usize,
    /// Enhanced mode keeps every parity pattern admissible; used to check that the
    /// two modes coincide when nothing is pruned.
    pub force_full_patterns: bool,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            path_cap: DEFAULT_PATH_CAP,
            force_full_patterns: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotReport {
    /// Columns (or coordinate-descent indices) the inner decoder searched.
    pub active_columns: u64,
    /// `|𝒫_ℓ|` when the slot was pruned.
    pub admissible_patterns: Option<usize>,
    pub list: Vec<u64>,
    /// Live partial paths after this slot (enhanced mode only).
    pub live_paths: Option<usize>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatenatedOutcome {
    pub decoded: TreeDecodeOutcome,
    pub slots: Vec<SlotReport>,
    /// First slot not decoded because every path died.
    pub aborted_at: Option<usize>,
}

fn skipped_slot() -> SlotReport {
    SlotReport {
        active_columns: 0,
        admissible_patterns: Some(0),
        list: Vec::new(),
        live_paths: Some(0),
        elapsed: Duration::ZERO,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

pub fn decode_concatenated<D: SlotDecoder + ?Sized>(
    codebook: &TreeCodebook,
    mode: DecodeMode,
    inner: &mut D,
    options: DecodeOptions,
) -> Result<ConcatenatedOutcome> {
    let profile = codebook.profile();
    let sections = profile.sections();
    let mut slots = Vec::with_capacity(sections);

    let (first, elapsed) = timed(|| inner.decode_slot(0, &ColumnFilter::All));
    let first = first?;
    slots.push(SlotReport {
        active_columns: ColumnFilter::All.column_count(profile, 0),
        admissible_patterns: None,
        list: first.clone(),
        live_paths: None,
        elapsed,
    });
    let mut search = PathSearch::start(codebook, &first, options.path_cap);

    if mode == DecodeMode::Original {
        for slot in 1..sections {
            let (list, elapsed) = timed(|| inner.decode_slot(slot, &ColumnFilter::All));
            let list = list?;
            search.extend(&list)?;
            slots.push(SlotReport {
                active_columns: ColumnFilter::All.column_count(profile, slot),
                admissible_patterns: None,
                list,
                live_paths: None,
                elapsed,
            });
        }
        return Ok(ConcatenatedOutcome {
            decoded: search.finish(),
            slots,
            aborted_at: None,
        });
    }

    slots[0].live_paths = Some(search.paths().len());
    for slot in 1..sections {
        let patterns = search.admissible()?;
        if patterns.is_empty() {
            return Ok(abort(search, slots, slot, sections));
        }
        let count = patterns.len();
        let filter = if options.force_full_patterns {
            ColumnFilter::All
        } else {
            ColumnFilter::Patterns(patterns)
        };
        let (list, elapsed) = timed(|| inner.decode_slot(slot, &filter));
        let list = match list {
            Ok(list) => list,
            Err(Error::DecodeAbort { .. }) => return Ok(abort(search, slots, slot, sections)),
            Err(e) => return Err(e),
        };
        search.extend(&list)?;
        slots.push(SlotReport {
            active_columns: filter.column_count(profile, slot),
            admissible_patterns: Some(count),
            list,
            live_paths: Some(search.paths().len()),
            elapsed,
        });
    }
    Ok(ConcatenatedOutcome {
        decoded: search.finish(),
        slots,
        aborted_at: None,
    })
}

fn abort(search: PathSearch<'_>, mut slots: Vec<SlotReport>, slot: usize, sections: usize) -> ConcatenatedOutcome {
    slots.extend((slot..sections).map(|_| skipped_slot()));
    ConcatenatedOutcome {
        // an incomplete search resolves every root as a failure
        decoded: search.finish(),
        slots,
        aborted_at: Some(slot),
    }
}
