//! Byte-level BPE models: representation, encoding and the merge graph.

mod encode;
mod graph;
mod model;
mod pretokenize;

use thiserror::Error;

pub use graph::MergeGraph;
pub use model::{BpeModel, MergeRule, ModelBuilder, TokenId};
pub use pretokenize::{pretokenize, Scheme};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpeError {
    #[error(
        "unknown pretokenizer scheme `{0}` (expected whitespace-prefix, category-split or none)"
    )]
    UnknownScheme(String),
    #[error("token {0} has an empty byte string")]
    EmptyToken(TokenId),
    #[error("tokens {first} and {second} have the same bytes")]
    DuplicateToken { first: TokenId, second: TokenId },
    #[error("vocabulary is missing the single-byte token 0x{0:02x}")]
    MissingByte(u8),
    #[error("merge #{rank} references unknown token {id}")]
    UnknownMergeToken { rank: u32, id: TokenId },
    #[error("merge #{rank} ({left}, {right}) produces bytes that are not in the vocabulary")]
    MissingMergeResult {
        rank: u32,
        left: TokenId,
        right: TokenId,
    },
    #[error("token {token} is produced by merges #{first_rank} and #{second_rank}")]
    DuplicateMergeResult {
        token: TokenId,
        first_rank: u32,
        second_rank: u32,
    },
    #[error("merge #{rank}: result bytes are not the concatenation of its sides")]
    MergeLengthMismatch { rank: u32 },
    #[error("token id {id} out of range for a vocabulary of {vocab_size}")]
    TokenOutOfRange { id: TokenId, vocab_size: usize },
    #[error("input must not be empty")]
    EmptyInput,
}
