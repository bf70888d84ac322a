use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::seeds::rng_from_seed;
use crate::tree_code::{ColumnFilter, ParityProfile};

/// Default cap on `rows · 2^v` matrix entries (512 MiB of `f64`).
pub const DEFAULT_MATRIX_BUDGET: u128 = 1 << 26;

/// Real dictionary with unit-norm columns, column-major.
///
/// `index_map[c]` is the global fragment index of stored column `c`; it is strictly
/// increasing, so a pruned matrix keeps the column order of the full one.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    rows: usize,
    data: Vec<f64>,
    index_map: Vec<u64>,
}

impl SensingMatrix {
    /// Gaussian ensemble, each column normalized to unit Euclidean norm.
    pub fn gaussian(rows: usize, fragment_bits: usize, seed: u64, budget: u128) -> Result<Self> {
        if rows == 0 || fragment_bits == 0 {
            return Err(Error::invalid("sensing matrix needs n >= 1 and v >= 1"));
        }
        if fragment_bits >= 64 {
            return Err(Error::ResourceRefusal {
                what: "sensing matrix".into(),
                requested: u128::MAX,
                budget,
            });
        }
        let cols = 1u128 << fragment_bits;
        let requested = rows as u128 * cols;
        if requested > budget {
            return Err(Error::ResourceRefusal {
                what: "sensing matrix".into(),
                requested,
                budget,
            });
        }
        let cols = cols as usize;
        let mut rng = rng_from_seed(seed);
        let mut data: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(&mut rng)).collect();
        for col in data.chunks_mut(rows) {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            col.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(SensingMatrix {
            rows,
            data,
            index_map: (0..cols as u64).collect(),
        })
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<f64>>, index_map: Vec<u64>) -> Result<Self> {
        if columns.len() != index_map.len() || columns.iter().any(|c| c.len() != rows) {
            return Err(Error::invalid("column shapes disagree"));
        }
        if index_map.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("index map must be strictly increasing"));
        }
        Ok(SensingMatrix {
            rows,
            data: columns.concat(),
            index_map,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.index_map.len()
    }

    pub fn index_map(&self) -> &[u64] {
        &self.index_map
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Stored position of global fragment index `index`.
    pub fn position_of(&self, index: u64) -> Option<usize> {
        self.index_map.binary_search(&index).ok()
    }

    /// `A x` for a coefficient vector over the stored columns.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (c, &xc) in x.iter().enumerate() {
            if xc != 0.0 {
                for (o, a) in out.iter_mut().zip(self.column(c)) {
                    *o += xc * a;
                }
            }
        }
        out
    }

    /// `Aᵀ r`.
    pub fn mul_transpose(&self, r: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.rows)
            .map(|col| col.iter().zip(r).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Keeps the stored columns whose global indices appear in `keep` (ascending).
    pub fn restrict(&self, keep: &[u64]) -> Result<Self> {
        let mut data = Vec::with_capacity(keep.len() * self.rows);
        for &g in keep {
            let c = self
                .position_of(g)
                .ok_or_else(|| Error::invalid(format!("column {g} not present")))?;
            data.extend_from_slice(self.column(c));
        }
        Ok(SensingMatrix {
            rows: self.rows,
            data,
            index_map: keep.to_vec(),
        })
    }
}

/// Removes every column whose parity bits are not admissible for `slot`.
pub fn prune_columns(
    full: &SensingMatrix,
    filter: &ColumnFilter,
    profile: &ParityProfile,
    slot: usize,
) -> Result<SensingMatrix> {
    check_full(full, profile, slot)?;
    match filter {
        ColumnFilter::All => Ok(full.clone()),
        ColumnFilter::Patterns(set) if set.is_empty() => Err(Error::DecodeAbort { slot }),
        ColumnFilter::Patterns(_) => full.restrict(&filter.columns(profile, slot)),
    }
}

pub(crate) fn check_full(full: &SensingMatrix, profile: &ParityProfile, slot: usize) -> Result<()> {
    let width = profile.fragment_bits(slot);
    if full.cols() as u128 != 1u128 << width {
        return Err(Error::invalid(format!(
            "matrix has {} columns, slot {slot} needs {}",
            full.cols(),
            1u128 << width
        )));
    }
    Ok(())
}
