use crate::unicode::is_punct_or_symbol;

/// Splits text into words: maximal runs of non-whitespace with leading and
/// trailing punctuation/symbol code points removed. Runs that are entirely
/// punctuation are dropped.
pub fn split_words(text: &str) -> impl Iterator<Item = &str> {
    text.split(char::is_whitespace)
        .map(|run| run.trim_matches(is_punct_or_symbol))
        .filter(|w| !w.is_empty())
}
