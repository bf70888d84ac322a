//! Coded compressed sensing for unsourced random access.
//!
//! Users split a `B`-bit message into `L` sections linked by a random linear tree
//! code, map each coded fragment onto one column of a sensing dictionary, and
//! transmit simultaneously. The receiver recovers a short list of fragments per
//! slot and stitches them back together by following parity-consistent paths.
//!
//! Two receivers are provided for both the single-antenna GMAC ([`ccs_siso`]) and
//! the massive-MIMO block-fading channel ([`mimo_activity`]): the original one,
//! where inner and outer decoding run independently, and an enhanced one, where
//! surviving partial paths prune the dictionary of the next slot.

pub mod analysis;
pub mod ccs_siso;
pub mod channel;
pub mod error;
pub mod harness;
pub mod mimo_activity;
pub mod seeds;
pub mod tree_code;

pub use error::{Error, Result};
