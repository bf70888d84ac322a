use std::collections::{BTreeSet, HashSet};

use super::codebook::TreeCodebook;
use super::profile::{Message, ParityProfile};
use crate::error::{Error, Result};

/// Default limit on live partial paths per root fragment.
pub const DEFAULT_PATH_CAP: usize = 1 << 16;

/// A parity-consistent partial path through the first `stage` lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    /// Number of sections consumed so far.
    pub stage: usize,
    /// Recovered information sections `w(1)..w(stage)`.
    pub info: Vec<u64>,
    /// Position of the chosen fragment in each list; `fragment_indices[0]` is the root.
    pub fragment_indices: Vec<usize>,
}

impl Path {
    pub fn root(profile: &ParityProfile, index: usize, fragment: u64) -> Self {
        Path {
            stage: 1,
            info: vec![profile.info_of(0, fragment)],
            fragment_indices: vec![index],
        }
    }

    pub fn root_index(&self) -> usize {
        self.fragment_indices[0]
    }
}

/// The per-slot lists of recovered coded fragments.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FragmentLists(pub Vec<Vec<u64>>);

impl FragmentLists {
    pub fn validate(&self, profile: &ParityProfile) -> Result<()> {
        if self.0.len() != profile.sections() {
            return Err(Error::invalid(format!(
                "{} lists supplied for {} sections",
                self.0.len(),
                profile.sections()
            )));
        }
        for (slot, list) in self.0.iter().enumerate() {
            let width = profile.fragment_bits(slot);
            if let Some(bad) = list.iter().find(|&&f| f >> width != 0) {
                return Err(Error::invalid(format!(
                    "fragment {bad} in list {slot} is wider than {width} bits"
                )));
            }
        }
        Ok(())
    }

    /// Genie lists: exactly the fragments the users sent, in user order.
    pub fn from_encoded(encoded: &[Vec<u64>], sections: usize) -> Self {
        FragmentLists(
            (0..sections)
                .map(|slot| encoded.iter().map(|v| v[slot]).collect())
                .collect(),
        )
    }
}

/// One-step parity-consistent extensions of `paths` into the next list.
///
/// Every path must sit at the same stage. Duplicate fragments branch separately.
pub fn extend_paths(codebook: &TreeCodebook, paths: &[Path], list: &[u64]) -> Result<Vec<Path>> {
    let Some(first) = paths.first() else {
        return Ok(Vec::new());
    };
    let slot = first.stage;
    if paths.iter().any(|p| p.stage != slot) {
        return Err(Error::invalid("paths at mixed stages"));
    }
    let profile = codebook.profile();
    if slot >= profile.sections() {
        return Err(Error::invalid(format!("paths already complete at stage {slot}")));
    }
    let mut out = Vec::new();
    for path in paths {
        let parity = codebook.parity_unchecked(&path.info, slot);
        for (index, &fragment) in list.iter().enumerate() {
            if profile.parity_of(slot, fragment) == parity {
                let mut child = path.clone();
                child.stage += 1;
                child.info.push(profile.info_of(slot, fragment));
                child.fragment_indices.push(index);
                out.push(child);
            }
        }
    }
    Ok(out)
}

/// Parity patterns of section `slot` reachable from the given partial paths.
pub fn admissible_parities(codebook: &TreeCodebook, paths: &[Path], slot: usize) -> Result<BTreeSet<u64>> {
    if slot == 0 || slot >= codebook.profile().sections() {
        return Err(Error::invalid(format!("no parity section at slot {slot}")));
    }
    paths
        .iter()
        .map(|p| codebook.compute_parity(&p.info, slot))
        .collect()
}

/// Result of resolving complete paths into messages.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDecodeOutcome {
    /// Decoded messages, ordered by the position of their root in the first list.
    pub messages: Vec<Message>,
    /// Roots with zero, several, or too many surviving paths.
    pub failures: usize,
    pub roots: usize,
}

/// Incremental tree search shared by the original and the pruning decoders.
#[derive(Debug, Clone)]
pub struct PathSearch<'a> {
    codebook: &'a TreeCodebook,
    path_cap: usize,
    paths: Vec<Path>,
    capped_roots: BTreeSet<usize>,
    roots: usize,
    stage: usize,
}

impl<'a> PathSearch<'a> {
    pub fn start(codebook: &'a TreeCodebook, first_list: &[u64], path_cap: usize) -> Self {
        let profile = codebook.profile();
        let paths = first_list
            .iter()
            .enumerate()
            .map(|(i, &f)| Path::root(profile, i, f))
            .collect();
        PathSearch {
            codebook,
            path_cap,
            paths,
            capped_roots: BTreeSet::new(),
            roots: first_list.len(),
            stage: 1,
        }
    }

    /// Number of lists consumed.
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// Admissible parity set for the next slot.
    pub fn admissible(&self) -> Result<BTreeSet<u64>> {
        admissible_parities(self.codebook, &self.paths, self.stage)
    }

    pub fn extend(&mut self, list: &[u64]) -> Result<()> {
        if self.stage >= self.codebook.profile().sections() {
            return Err(Error::invalid("search already consumed every list"));
        }
        let mut children = extend_paths(self.codebook, &self.paths, list)?;
        let mut per_root = vec![0usize; self.roots];
        for c in &children {
            per_root[c.root_index()] += 1;
        }
        for (root, &count) in per_root.iter().enumerate() {
            if count > self.path_cap {
                self.capped_roots.insert(root);
            }
        }
        if !self.capped_roots.is_empty() {
            children.retain(|c| !self.capped_roots.contains(&c.root_index()));
        }
        self.paths = children;
        self.stage += 1;
        Ok(())
    }

    /// Resolves each root: exactly one distinct surviving message decodes, anything else fails.
    pub fn finish(self) -> TreeDecodeOutcome {
        let complete = self.stage == self.codebook.profile().sections();
        let mut per_root: Vec<Vec<&Message>> = vec![Vec::new(); self.roots];
        let survivors: Vec<Message> = if complete {
            self.paths.iter().map(|p| Message(p.info.clone())).collect()
        } else {
            Vec::new()
        };
        for (path, msg) in self.paths.iter().zip(&survivors) {
            let slot = &mut per_root[path.root_index()];
            if !slot.contains(&msg) {
                slot.push(msg);
            }
        }
        let mut messages = Vec::new();
        let mut seen = HashSet::new();
        let mut failures = 0;
        for (root, found) in per_root.iter().enumerate() {
            if found.len() == 1 && !self.capped_roots.contains(&root) {
                if seen.insert(found[0].clone()) {
                    messages.push(found[0].clone());
                }
            } else {
                failures += 1;
            }
        }
        TreeDecodeOutcome {
            messages,
            failures,
            roots: self.roots,
        }
    }
}

/// Original tree decoding: follow every parity-consistent path from every root.
pub fn tree_decode(codebook: &TreeCodebook, lists: &FragmentLists, path_cap: usize) -> Result<TreeDecodeOutcome> {
    lists.validate(codebook.profile())?;
    let mut search = PathSearch::start(codebook, &lists.0[0], path_cap);
    for list in &lists.0[1..] {
        search.extend(list)?;
    }
    Ok(search.finish())
}
