//! Code point classification shared by pretokenization, protection rules and
//! word segmentation.
//!
//! Every function here works on raw bytes that may or may not be valid UTF-8.
//! Undecodable bytes are surfaced one at a time as `None` units.

use unicode_general_category::{get_general_category, GeneralCategory as Gc};

/// Coarse class used by the category-split pretokenizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    Letter,
    Digit,
    Whitespace,
    Other,
}

/// A decoded unit of a byte string: its byte length and the scalar value, or
/// `None` for a byte that is not part of a valid UTF-8 sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unit {
    pub len: usize,
    pub ch: Option<char>,
}

/// Splits `bytes` into decoded units in order. The unit lengths always sum to
/// `bytes.len()`.
pub fn units(bytes: &[u8]) -> impl Iterator<Item = Unit> + '_ {
    bytes.utf8_chunks().flat_map(|chunk| {
        let valid = chunk.valid().chars().map(|c| Unit {
            len: c.len_utf8(),
            ch: Some(c),
        });
        let invalid = chunk.invalid().iter().map(|_| Unit { len: 1, ch: None });
        valid.chain(invalid)
    })
}

/// Decodes `bytes` as UTF-8, returning `None` if any byte is undecodable.
pub fn decode(bytes: &[u8]) -> Option<&str> {
    std::str::from_utf8(bytes).ok()
}

pub fn classify(unit: Option<char>) -> CharClass {
    let Some(c) = unit else {
        return CharClass::Other;
    };
    if c.is_whitespace() {
        return CharClass::Whitespace;
    }
    if is_letter(c) {
        CharClass::Letter
    } else if is_number(c) {
        CharClass::Digit
    } else {
        CharClass::Other
    }
}

pub fn is_letter(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::UppercaseLetter
            | Gc::LowercaseLetter
            | Gc::TitlecaseLetter
            | Gc::ModifierLetter
            | Gc::OtherLetter
    )
}

pub fn is_number(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::DecimalNumber | Gc::LetterNumber | Gc::OtherNumber
    )
}

/// Unicode general category P* or S*.
pub fn is_punct_or_symbol(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::ConnectorPunctuation
            | Gc::DashPunctuation
            | Gc::OpenPunctuation
            | Gc::ClosePunctuation
            | Gc::InitialPunctuation
            | Gc::FinalPunctuation
            | Gc::OtherPunctuation
            | Gc::MathSymbol
            | Gc::CurrencySymbol
            | Gc::ModifierSymbol
            | Gc::OtherSymbol
    )
}

/// Cyrillic (U+0400..U+04FF) and Cyrillic Supplement (U+0500..U+052F).
pub fn is_cyrillic(c: char) -> bool {
    ('\u{0400}'..='\u{052F}').contains(&c)
}

/// ASCII letters plus letters from the Latin-1 Supplement, Latin Extended-A/B
/// and Latin Extended Additional blocks.
pub fn is_latin_letter(c: char) -> bool {
    if c.is_ascii_alphabetic() {
        return true;
    }
    let in_block = ('\u{00C0}'..='\u{024F}').contains(&c) || ('\u{1E00}'..='\u{1EFF}').contains(&c);
    in_block && is_letter(c)
}

/// Number of Cyrillic code points in the UTF-8 decoding of `bytes`.
pub fn cyrillic_count(bytes: &[u8]) -> usize {
    units(bytes)
        .filter(|u| u.ch.is_some_and(is_cyrillic))
        .count()
}
