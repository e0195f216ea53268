use std::collections::BTreeMap;
use std::fmt;

use crate::bpe::{BpeModel, TokenId};
use crate::unicode::{cyrillic_count, decode, is_latin_letter, is_punct_or_symbol};

/// Why a token may not be removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProtectionClass {
    /// At most two code points (or two bytes when not valid UTF-8).
    ShortUnit,
    Cyrillic,
    /// Only Latin letters, optionally after one leading space.
    PureLatin,
    /// Only punctuation and symbol code points.
    Punctuation,
    /// Declared as an added or special token by the model file.
    Special,
}

impl ProtectionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtectionClass::ShortUnit => "short-unit",
            ProtectionClass::Cyrillic => "cyrillic",
            ProtectionClass::PureLatin => "pure-latin",
            ProtectionClass::Punctuation => "punctuation",
            ProtectionClass::Special => "special",
        }
    }
}

impl fmt::Display for ProtectionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The first protection class that `bytes` satisfies, checked in the order
/// short-unit, cyrillic, pure-latin, punctuation.
pub fn protection_class(bytes: &[u8]) -> Option<ProtectionClass> {
    let text = decode(bytes);
    let short = match text {
        Some(s) => s.chars().count() <= 2,
        None => bytes.len() <= 2,
    };
    if short {
        return Some(ProtectionClass::ShortUnit);
    }
    if cyrillic_count(bytes) > 0 {
        return Some(ProtectionClass::Cyrillic);
    }
    let text = text?;
    let latin = text.strip_prefix(' ').unwrap_or(text);
    if !latin.is_empty() && latin.chars().all(is_latin_letter) {
        return Some(ProtectionClass::PureLatin);
    }
    if text.chars().all(is_punct_or_symbol) {
        return Some(ProtectionClass::Punctuation);
    }
    None
}

/// Protected token ids with the reason each is protected.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProtectedSet {
    reasons: BTreeMap<TokenId, ProtectionClass>,
}

impl ProtectedSet {
    pub fn insert(&mut self, id: TokenId, class: ProtectionClass) {
        self.reasons.entry(id).or_insert(class);
    }

    pub fn contains(&self, id: TokenId) -> bool {
        self.reasons.contains_key(&id)
    }

    pub fn reason(&self, id: TokenId) -> Option<ProtectionClass> {
        self.reasons.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.reasons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reasons.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TokenId, ProtectionClass)> + '_ {
        self.reasons.iter().map(|(&id, &c)| (id, c))
    }

    /// Number of protected tokens per class.
    pub fn class_counts(&self) -> BTreeMap<ProtectionClass, usize> {
        let mut counts = BTreeMap::new();
        for class in self.reasons.values() {
            *counts.entry(*class).or_default() += 1;
        }
        counts
    }
}

pub fn classify_protected(model: &BpeModel) -> ProtectedSet {
    let mut set = ProtectedSet::default();
    for (i, bytes) in model.tokens().iter().enumerate() {
        if let Some(class) = protection_class(bytes) {
            set.insert(TokenId::from(i), class);
        }
    }
    set
}
