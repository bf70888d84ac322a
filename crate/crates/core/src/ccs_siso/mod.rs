//! Single-antenna coded compressed sensing: fragment-to-column bijection, slot
//! encoding, NNLS recovery and parity-driven column pruning.

mod matrix;
mod nnls;

use std::borrow::Cow;

use matrix::check_full;
pub use matrix::{prune_columns, SensingMatrix, DEFAULT_MATRIX_BUDGET};
pub use nnls::{kkt_violation, nnls_solve, NnlsOptions, NnlsSolution};

use crate::error::{Error, Result};
use crate::tree_code::{decode_concatenated, ColumnFilter, ConcatenatedOutcome, DecodeMode, DecodeOptions, TreeCodebook};

/// Radix-2 value of an MSB-first bit vector.
pub fn index_of(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

/// Inverse of [`index_of`] for a `width`-bit fragment.
pub fn fragment_of(index: u64, width: usize) -> Vec<bool> {
    (0..width).rev().map(|i| (index >> i) & 1 == 1).collect()
}

/// `d · A · Σ_j m_j`: the noiseless slot signal of the given fragments.
pub fn ccs_slot_encode(fragments: &[u64], a: &SensingMatrix, amplitude: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; a.rows()];
    for &f in fragments {
        let c = a
            .position_of(f)
            .ok_or_else(|| Error::invalid(format!("fragment {f} has no column")))?;
        for (o, v) in out.iter_mut().zip(a.column(c)) {
            *o += amplitude * v;
        }
    }
    Ok(out)
}

/// Global indices of the `list_size` largest values; ties go to the lower index.
pub fn top_k_support(values: &[f64], index_map: &[u64], list_size: usize) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(index_map[i].cmp(&index_map[j])));
    order.truncate(list_size);
    order.into_iter().map(|i| index_map[i]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SisoDecodeOptions {
    pub nnls: NnlsOptions,
    pub decode: DecodeOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SisoDecodeOutcome {
    pub outcome: ConcatenatedOutcome,
    /// Slots whose NNLS hit the iteration cap.
    pub unconverged_slots: usize,
}

/// Decodes one frame of `L` slot observations.
///
/// `matrices[ℓ]` must cover all `2^{v_ℓ}` columns; enhanced mode prunes it per slot.
pub fn decode_siso(
    observations: &[Vec<f64>],
    matrices: &[SensingMatrix],
    codebook: &TreeCodebook,
    list_size: usize,
    mode: DecodeMode,
    options: SisoDecodeOptions,
) -> Result<SisoDecodeOutcome> {
    let profile = codebook.profile();
    let sections = profile.sections();
    if observations.len() != sections || matrices.len() != sections {
        return Err(Error::invalid(format!(
            "{} observations and {} matrices for {sections} slots",
            observations.len(),
            matrices.len()
        )));
    }
    if list_size == 0 {
        return Err(Error::invalid("list size must be at least 1"));
    }
    let mut unconverged_slots = 0;
    let mut inner = |slot: usize, filter: &ColumnFilter| -> Result<Vec<u64>> {
        let a = match filter {
            ColumnFilter::All => {
                check_full(&matrices[slot], profile, slot)?;
                Cow::Borrowed(&matrices[slot])
            }
            ColumnFilter::Patterns(_) => Cow::Owned(prune_columns(&matrices[slot], filter, profile, slot)?),
        };
        let solution = nnls_solve(&a, &observations[slot], options.nnls)?;
        if !solution.converged {
            unconverged_slots += 1;
        }
        Ok(top_k_support(&solution.x, a.index_map(), list_size))
    };
    let outcome = decode_concatenated(codebook, mode, &mut inner, options.decode)?;
    Ok(SisoDecodeOutcome {
        outcome,
        unconverged_slots,
    })
}
