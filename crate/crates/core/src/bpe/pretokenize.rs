use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::unicode::{self, CharClass};

use super::BpeError;

/// How raw text is cut into pretokens before merges are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Split before every whitespace run; the run becomes the prefix of the
    /// following pretoken.
    WhitespacePrefix,
    /// Like `WhitespacePrefix`, additionally splitting between letters,
    /// digits and everything else.
    CategorySplit,
    /// The whole input is a single pretoken.
    None,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::WhitespacePrefix,
        Scheme::CategorySplit,
        Scheme::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::WhitespacePrefix => "whitespace-prefix",
            Scheme::CategorySplit => "category-split",
            Scheme::None => "none",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = BpeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| BpeError::UnknownScheme(s.to_string()))
    }
}

/// Cuts `text` into pretokens. The pretokens concatenate back to `text`.
pub fn pretokenize(text: &[u8], scheme: Scheme) -> Vec<&[u8]> {
    if text.is_empty() {
        return Vec::new();
    }
    let class_of = |ch: Option<char>| -> CharClass {
        let class = unicode::classify(ch);
        match scheme {
            Scheme::CategorySplit => class,
            _ if class == CharClass::Whitespace => CharClass::Whitespace,
            _ => CharClass::Other,
        }
    };
    if scheme == Scheme::None {
        return vec![text];
    }

    // Maximal runs of one class, as (start, end, class).
    let mut runs: Vec<(usize, usize, CharClass)> = Vec::new();
    let mut offset = 0;
    for unit in unicode::units(text) {
        let class = class_of(unit.ch);
        match runs.last_mut() {
            Some(last) if last.2 == class => last.1 += unit.len,
            _ => runs.push((offset, offset + unit.len, class)),
        }
        offset += unit.len;
    }

    let mut pieces = Vec::with_capacity(runs.len());
    let mut pending_ws: Option<usize> = None;
    for (start, end, class) in runs {
        if class == CharClass::Whitespace {
            pending_ws = Some(start);
            continue;
        }
        let from = pending_ws.take().unwrap_or(start);
        pieces.push(&text[from..end]);
    }
    if let Some(start) = pending_ws {
        pieces.push(&text[start..]);
    }
    pieces
}
