//! Byte-level BPE vocabulary surgery and tokenization density metrics.
//!
//! The crate is organised around four modules:
//!
//! * [`bpe`]: model representation, deterministic encoding and the merge graph;
//! * [`surgery`]: candidate extraction, protection, reachability refinement,
//!   removal scoring and the fixed-size transplant;
//! * [`metrics`]: token frequencies and tokens-per-word density reports;
//! * [`io`]: the JSON model layout, the byte/unicode rendering map, corpus
//!   readers and report serialization.

pub mod bpe;
pub mod io;
pub mod metrics;
pub mod surgery;
pub mod unicode;

pub use bpe::{BpeError, BpeModel, MergeGraph, MergeRule, ModelBuilder, Scheme, TokenId};
