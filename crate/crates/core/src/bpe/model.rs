use std::collections::HashMap;
use std::fmt;

use super::{BpeError, Scheme};

/// Index of a token in a model's vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for TokenId {
    fn from(i: usize) -> Self {
        TokenId(u32::try_from(i).expect("vocabulary larger than u32::MAX"))
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One entry of the ordered merge list. `rank` is the position in the list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MergeRule {
    pub left: TokenId,
    pub right: TokenId,
    pub result: TokenId,
    pub rank: u32,
}

/// A validated byte-level BPE model.
///
/// Invariants checked at construction:
/// * every token is non-empty and no two tokens share bytes;
/// * all 256 single-byte tokens are present;
/// * every merge joins two existing tokens into an existing token;
/// * no token is produced by more than one merge.
///
/// Models are immutable. Surgery builds new ones.
#[derive(Clone)]
pub struct BpeModel {
    tokens: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, TokenId>,
    merges: Vec<MergeRule>,
    pair_ranks: HashMap<(TokenId, TokenId), (u32, TokenId)>,
    forming: HashMap<TokenId, u32>,
    byte_ids: [TokenId; 256],
    scheme: Scheme,
}

impl BpeModel {
    /// Builds a model from its vocabulary (position = id) and merge pairs in
    /// rank order. Each merge's result is looked up by concatenating the
    /// bytes of its two sides.
    pub fn new(
        tokens: Vec<Vec<u8>>,
        merges: Vec<(TokenId, TokenId)>,
        scheme: Scheme,
    ) -> Result<Self, BpeError> {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, bytes) in tokens.iter().enumerate() {
            let id = TokenId::from(i);
            if bytes.is_empty() {
                return Err(BpeError::EmptyToken(id));
            }
            if let Some(first) = index.insert(bytes.clone(), id) {
                return Err(BpeError::DuplicateToken { first, second: id });
            }
        }

        let mut byte_ids = [TokenId(0); 256];
        for b in 0..=255u8 {
            match index.get(&[b][..]) {
                Some(&id) => byte_ids[b as usize] = id,
                None => return Err(BpeError::MissingByte(b)),
            }
        }

        let mut rules = Vec::with_capacity(merges.len());
        let mut pair_ranks = HashMap::with_capacity(merges.len());
        let mut forming: HashMap<TokenId, u32> = HashMap::with_capacity(merges.len());
        let mut joined = Vec::new();
        for (rank, (left, right)) in merges.into_iter().enumerate() {
            let rank = rank as u32;
            for id in [left, right] {
                if id.index() >= tokens.len() {
                    return Err(BpeError::UnknownMergeToken { rank, id });
                }
            }
            joined.clear();
            joined.extend_from_slice(&tokens[left.index()]);
            joined.extend_from_slice(&tokens[right.index()]);
            let Some(&result) = index.get(joined.as_slice()) else {
                return Err(BpeError::MissingMergeResult { rank, left, right });
            };
            if let Some(&first_rank) = forming.get(&result) {
                return Err(BpeError::DuplicateMergeResult {
                    token: result,
                    first_rank,
                    second_rank: rank,
                });
            }
            forming.insert(result, rank);
            pair_ranks.insert((left, right), (rank, result));
            rules.push(MergeRule {
                left,
                right,
                result,
                rank,
            });
        }

        Ok(Self {
            tokens,
            index,
            merges: rules,
            pair_ranks,
            forming,
            byte_ids,
            scheme,
        })
    }

    /// The 256 single-byte tokens in byte order and no merges.
    pub fn byte_level(scheme: Scheme) -> Self {
        let tokens = (0..=255u8).map(|b| vec![b]).collect();
        Self::new(tokens, Vec::new(), scheme).expect("byte alphabet is a valid model")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn tokens(&self) -> &[Vec<u8>] {
        &self.tokens
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    pub fn ids(&self) -> impl Iterator<Item = TokenId> + '_ {
        (0..self.tokens.len()).map(TokenId::from)
    }

    pub fn token_bytes(&self, id: TokenId) -> Result<&[u8], BpeError> {
        self.tokens
            .get(id.index())
            .map(Vec::as_slice)
            .ok_or(BpeError::TokenOutOfRange {
                id,
                vocab_size: self.tokens.len(),
            })
    }

    pub fn token_id(&self, bytes: &[u8]) -> Option<TokenId> {
        self.index.get(bytes).copied()
    }

    pub fn byte_token(&self, byte: u8) -> TokenId {
        self.byte_ids[byte as usize]
    }

    /// The merge producing `id`, if any.
    pub fn forming_merge(&self, id: TokenId) -> Option<&MergeRule> {
        self.forming
            .get(&id)
            .map(|&rank| &self.merges[rank as usize])
    }

    /// Rank and result of the merge joining `left` and `right`.
    pub fn merge_for(&self, left: TokenId, right: TokenId) -> Option<(u32, TokenId)> {
        self.pair_ranks.get(&(left, right)).copied()
    }
}

impl PartialEq for BpeModel {
    fn eq(&self, other: &Self) -> bool {
        self.scheme == other.scheme && self.tokens == other.tokens && self.merges == other.merges
    }
}

impl Eq for BpeModel {}

impl fmt::Debug for BpeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BpeModel")
            .field("vocab", &self.tokens.len())
            .field("merges", &self.merges.len())
            .field("scheme", &self.scheme)
            .finish()
    }
}

/// Incremental construction of a model on top of the byte alphabet, mostly
/// useful for fixtures and tests.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    tokens: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, TokenId>,
    merges: Vec<(TokenId, TokenId)>,
    scheme: Scheme,
}

impl ModelBuilder {
    pub fn new(scheme: Scheme) -> Self {
        let mut builder = Self {
            tokens: Vec::new(),
            index: HashMap::new(),
            merges: Vec::new(),
            scheme,
        };
        for b in 0..=255u8 {
            builder.token(&[b]);
        }
        builder
    }

    /// Adds a vocabulary entry without a forming merge. Returns the existing
    /// id when the bytes are already present.
    pub fn token(&mut self, bytes: &[u8]) -> TokenId {
        if let Some(&id) = self.index.get(bytes) {
            return id;
        }
        let id = TokenId::from(self.tokens.len());
        self.tokens.push(bytes.to_vec());
        self.index.insert(bytes.to_vec(), id);
        id
    }

    /// Appends the merge `left + right`, adding both sides and the result to
    /// the vocabulary as needed.
    pub fn merge(&mut self, left: &[u8], right: &[u8]) -> TokenId {
        let l = self.token(left);
        let r = self.token(right);
        let result = self.token(&[left, right].concat());
        self.merges.push((l, r));
        result
    }

    /// Appends merges that build `word` left to right, one code point at a
    /// time, skipping merges whose result already exists. `word` must be
    /// non-empty.
    pub fn chain(&mut self, word: &str) -> TokenId {
        let bytes = word.as_bytes();
        let mut end = 0;
        for (start, c) in word.char_indices() {
            let next_end = start + c.len_utf8();
            self.spell(&bytes[start..next_end]);
            if start > 0 && !self.index.contains_key(&bytes[..next_end]) {
                self.merge(&bytes[..end], &bytes[start..next_end]);
            }
            end = next_end;
        }
        self.index[bytes]
    }

    /// Makes sure a single code point is formed from its bytes.
    fn spell(&mut self, ch: &[u8]) -> TokenId {
        let mut end = 1;
        while end < ch.len() {
            if !self.index.contains_key(&ch[..end + 1]) {
                self.merge(&ch[..end], &ch[end..end + 1]);
            }
            end += 1;
        }
        self.index[ch]
    }

    pub fn build(self) -> Result<BpeModel, BpeError> {
        BpeModel::new(self.tokens, self.merges, self.scheme)
    }
}
