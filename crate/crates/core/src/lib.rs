//! Two-level dictionaries with constant worst-case operation time.
//!
//! The first level hashes keys into bins of fixed capacity; elements that
//! do not fit overflow into a small de-amortized cuckoo table, which moves
//! elements back into the first level whenever their bin has room.

pub mod arith;
pub mod backyard;
pub mod bins;
pub mod bitpack;
pub mod cuckoo;
pub mod error;
pub mod experiments;
pub mod filter;
pub mod hash_family;
pub mod meter;
pub mod permutations;
pub mod ranked;
pub mod snapshot;
pub mod succinct;

pub use error::{Error, Result};
pub use hash_family::{KWiseHash, PairwiseHash};
