//! Vocabulary transplant: candidate extraction, protection, reachability
//! refinement, removal scoring and the fixed-size swap.

mod candidates;
mod protect;
mod refine;
mod removal;
mod transplant;

use thiserror::Error;

use crate::bpe::{BpeError, TokenId};

pub use candidates::{extract_candidates, Candidate, CandidateSet};
pub use protect::{classify_protected, protection_class, ProtectedSet, ProtectionClass};
pub use refine::{refine_reachability, PassRecord, PassStats, PlacedToken, Refinement};
pub use removal::{removable_closure, removal_score, score_removal, RankedToken, RemovalRanking};
pub use transplant::{
    transplant, AddedToken, RemovedToken, SwapCount, TransplantOptions, TransplantResult,
};

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("{0}")]
    InvalidArgument(String),
    #[error("candidate {:?} contains no Cyrillic code point", String::from_utf8_lossy(.0))]
    NotCyrillic(Vec<u8>),
    #[error("frequency table references token {id}, but the vocabulary has {vocab_size} tokens")]
    UnknownFrequencyToken { id: TokenId, vocab_size: usize },
    #[error("asked to add {requested} tokens but only {available} candidates are placeable (short by {})", requested - available)]
    CandidateShortfall { requested: usize, available: usize },
    #[error("asked to remove {requested} tokens but only {available} are removable (short by {})", requested - available)]
    RemovalShortfall { requested: usize, available: usize },
    #[error(transparent)]
    Model(#[from] BpeError),
    #[error("surgery invariant violated: {0}")]
    Invariant(String),
}
