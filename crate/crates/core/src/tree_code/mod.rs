//! Outer tree code: fragmentation, GF(2) parity, and path-based list decoding.

mod codebook;
mod paths;
mod profile;
pub mod progressive;

pub use codebook::{CodebookSpec, TreeCodebook};
pub use paths::{
    admissible_parities, extend_paths, tree_decode, FragmentLists, Path, PathSearch, TreeDecodeOutcome,
    DEFAULT_PATH_CAP,
};
pub use profile::{Message, ParityProfile, MAX_FRAGMENT_BITS};
pub use progressive::{decode_concatenated, ColumnFilter, ConcatenatedOutcome, DecodeMode, DecodeOptions, SlotDecoder, SlotReport};

