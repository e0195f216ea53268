use std::collections::BTreeMap;

use crate::bpe::{BpeModel, TokenId};

/// Token occurrence counts over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreqTable {
    counts: BTreeMap<TokenId, u64>,
    total_tokens: u64,
    corpus_label: String,
}

impl FreqTable {
    pub fn new(corpus_label: impl Into<String>) -> Self {
        Self {
            corpus_label: corpus_label.into(),
            ..Self::default()
        }
    }

    pub fn from_counts(
        corpus_label: impl Into<String>,
        counts: impl IntoIterator<Item = (TokenId, u64)>,
    ) -> Self {
        let mut table = Self::new(corpus_label);
        for (id, n) in counts {
            table.add_n(id, n);
        }
        table
    }

    pub fn add(&mut self, id: TokenId) {
        self.add_n(id, 1);
    }

    pub fn add_n(&mut self, id: TokenId, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(id).or_default() += n;
        self.total_tokens += n;
    }

    pub fn extend(&mut self, ids: &[TokenId]) {
        for &id in ids {
            self.add(id);
        }
    }

    pub fn count(&self, id: TokenId) -> u64 {
        self.counts.get(&id).copied().unwrap_or(0)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn corpus_label(&self) -> &str {
        &self.corpus_label
    }

    /// Ids with a non-zero count, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (TokenId, u64)> + '_ {
        self.counts.iter().map(|(&id, &n)| (id, n))
    }

    pub fn max_id(&self) -> Option<TokenId> {
        self.counts.keys().next_back().copied()
    }

    pub fn merge(&mut self, other: &FreqTable) {
        for (id, n) in other.iter() {
            self.add_n(id, n);
        }
    }
}

/// Counts tokens over bare words, each encoded without pretokenization.
pub fn token_frequency<W: AsRef<str>>(
    model: &BpeModel,
    words: impl IntoIterator<Item = W>,
    corpus_label: &str,
) -> FreqTable {
    let mut table = FreqTable::new(corpus_label);
    for word in words {
        let word = word.as_ref().as_bytes();
        if let Ok(ids) = model.encode_word(word) {
            table.extend(&ids);
        }
    }
    table
}

/// Counts tokens over running text encoded with the model's own pretokenizer.
pub fn token_frequency_text<T: AsRef<[u8]>>(
    model: &BpeModel,
    texts: impl IntoIterator<Item = T>,
    corpus_label: &str,
) -> FreqTable {
    let mut table = FreqTable::new(corpus_label);
    for text in texts {
        table.extend(&model.encode(text.as_ref()));
    }
    table
}
