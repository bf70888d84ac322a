//! Closed-form predictors of tree-decoder statistics under genie-aided decoding.
//!
//! Assumes error-free inner lists and pairwise distinct fragments in every section.
//! Slots are zero-based here, so slot `0` is the root section with `E[L] = 0`.

use serde::{Deserialize, Serialize};

use crate::tree_code::ParityProfile;

/// How wrong paths carry over between stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `E[L_ℓ] = 2^{-l_ℓ} (K E[L_{ℓ-1}] + K - 1)`.
    Full,
    /// Ignores wrong paths inherited from the previous stage: `E[L_ℓ] = 2^{-l_ℓ} (K - 1)`.
    OneStep,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::OneStep => "one_step",
        }
    }
}

/// Expected number of erroneous paths from one root that survive `slot`.
pub fn expected_erroneous_paths(users: usize, profile: &ParityProfile, slot: usize, variant: Variant) -> f64 {
    let k = users as f64;
    match variant {
        Variant::OneStep if slot == 0 => 0.0,
        Variant::OneStep => (k - 1.0) * (-(profile.parity_bits(slot) as f64)).exp2(),
        Variant::Full => (1..=slot).fold(0.0, |prev, s| {
            (-(profile.parity_bits(s) as f64)).exp2() * (k * prev + k - 1.0)
        }),
    }
}

/// The same expectation evaluated as `Σ_q K^{ℓ-q} (K-1) Π_{k=q}^{ℓ} 2^{-l_k}`.
pub fn expected_erroneous_paths_summation(users: usize, profile: &ParityProfile, slot: usize) -> f64 {
    let k = users as f64;
    (1..=slot)
        .map(|q| {
            let parity: usize = (q..=slot).map(|s| profile.parity_bits(s)).sum();
            k.powi((slot - q) as i32) * (k - 1.0) * (-(parity as f64)).exp2()
        })
        .sum()
}

/// Expected live partial paths across all `K` roots: `P_ℓ = K (1 + E[L_ℓ])`.
pub fn expected_partial_paths(users: usize, profile: &ParityProfile, slot: usize, variant: Variant) -> f64 {
    users as f64 * (1.0 + expected_erroneous_paths(users, profile, slot, variant))
}

/// Probability that a given `l`-bit pattern is hit by at least one of `paths` paths.
pub fn pattern_hit_probability(paths: f64, parity_bits: usize) -> f64 {
    if parity_bits == 0 {
        return 1.0;
    }
    let miss = 1.0 - (-(parity_bits as f64)).exp2();
    // 1 - miss^paths, accurate for tiny 2^-l
    -(paths * miss.ln()).exp_m1()
}

/// `2^l (1 - (1 - 2^{-l})^paths)` for an explicit number of paths.
pub fn admissible_patterns_for_paths(paths: f64, parity_bits: usize) -> f64 {
    (parity_bits as f64).exp2() * pattern_hit_probability(paths, parity_bits)
}

/// Expected `|𝒫_ℓ|`, using `P_ℓ` of the same slot.
pub fn expected_admissible_patterns(users: usize, profile: &ParityProfile, slot: usize, variant: Variant) -> f64 {
    let paths = expected_partial_paths(users, profile, slot, variant);
    admissible_patterns_for_paths(paths, profile.parity_bits(slot))
}

/// Expected fraction of columns kept at `slot`: `1 - (1 - 2^{-l_ℓ})^{P_ℓ}`.
pub fn expected_column_reduction_ratio(users: usize, profile: &ParityProfile, slot: usize, variant: Variant) -> f64 {
    let paths = expected_partial_paths(users, profile, slot, variant);
    pattern_hit_probability(paths, profile.parity_bits(slot))
}

/// One row of the `predict` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub users: usize,
    pub slot: usize,
    pub variant: Variant,
    pub erroneous_paths: f64,
    pub partial_paths: f64,
    pub admissible_patterns: f64,
    pub reduction_ratio: f64,
}

pub fn predict(users: usize, profile: &ParityProfile, slot: usize, variant: Variant) -> Prediction {
    Prediction {
        users,
        slot,
        variant,
        erroneous_paths: expected_erroneous_paths(users, profile, slot, variant),
        partial_paths: expected_partial_paths(users, profile, slot, variant),
        admissible_patterns: expected_admissible_patterns(users, profile, slot, variant),
        reduction_ratio: expected_column_reduction_ratio(users, profile, slot, variant),
    }
}

/// Parity lengths matching the column-reduction curves of the 75-bit, 11-slot setup.
pub const RECONSTRUCTED_SISO_PARITY: [usize; 11] = [0, 6, 8, 8, 8, 8, 8, 8, 8, 13, 15];

/// 75-bit profile with 15-bit fragments and [`RECONSTRUCTED_SISO_PARITY`].
pub fn default_siso_profile() -> ParityProfile {
    ParityProfile::with_fragment_len(15, RECONSTRUCTED_SISO_PARITY.to_vec()).expect("valid built-in profile")
}
