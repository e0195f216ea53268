use std::collections::HashMap;
use std::io;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bpe::BpeModel;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("corpus `{0}` contains no words")]
    EmptyCorpus(String),
    #[error("failed to read corpus `{corpus}`: {source}")]
    Io {
        corpus: String,
        #[source]
        source: io::Error,
    },
}

/// Tokenization density of one model on one corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub model: String,
    pub corpus: String,
    pub words: u64,
    pub tokens: u64,
    pub tok_per_word: f64,
    pub pct_1: f64,
    pub pct_le2: f64,
    pub pct_gt2: f64,
}

/// Raw per-word tallies. Tallies over disjoint word sets combine with
/// [`DensityTally::merge`] in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DensityTally {
    pub words: u64,
    pub tokens: u64,
    pub one: u64,
    pub le2: u64,
}

impl DensityTally {
    pub fn add(&mut self, n_tokens: usize) {
        self.words += 1;
        self.tokens += n_tokens as u64;
        self.one += u64::from(n_tokens == 1);
        self.le2 += u64::from(n_tokens <= 2);
    }

    pub fn merge(&mut self, other: &DensityTally) {
        self.words += other.words;
        self.tokens += other.tokens;
        self.one += other.one;
        self.le2 += other.le2;
    }

    pub fn report(&self, model: &str, corpus: &str) -> Result<DensityReport, MetricsError> {
        if self.words == 0 {
            return Err(MetricsError::EmptyCorpus(corpus.to_string()));
        }
        let words = self.words as f64;
        Ok(DensityReport {
            model: model.to_string(),
            corpus: corpus.to_string(),
            words: self.words,
            tokens: self.tokens,
            tok_per_word: self.tokens as f64 / words,
            pct_1: 100.0 * self.one as f64 / words,
            pct_le2: 100.0 * self.le2 as f64 / words,
            pct_gt2: 100.0 * (self.words - self.le2) as f64 / words,
        })
    }
}

const CACHE_LIMIT: usize = 1 << 20;

/// Encodes words one at a time, remembering token counts of frequent words.
pub struct WordCounter<'a> {
    model: &'a BpeModel,
    cache: HashMap<String, usize>,
}

impl<'a> WordCounter<'a> {
    pub fn new(model: &'a BpeModel) -> Self {
        Self {
            model,
            cache: HashMap::new(),
        }
    }

    /// Number of tokens in the bare encoding of `word`; empty words count 0.
    pub fn count(&mut self, word: &str) -> usize {
        if let Some(&n) = self.cache.get(word) {
            return n;
        }
        let n = self.model.count_word(word.as_bytes()).unwrap_or(0);
        if self.cache.len() < CACHE_LIMIT {
            self.cache.insert(word.to_owned(), n);
        }
        n
    }

    pub fn tally<W: AsRef<str>>(&mut self, words: impl IntoIterator<Item = W>) -> DensityTally {
        let mut tally = DensityTally::default();
        for w in words {
            let w = w.as_ref();
            if !w.is_empty() {
                tally.add(self.count(w));
            }
        }
        tally
    }
}

pub fn density_report<W: AsRef<str>>(
    model: &BpeModel,
    words: impl IntoIterator<Item = W>,
    model_label: &str,
    corpus_label: &str,
) -> Result<DensityReport, MetricsError> {
    WordCounter::new(model)
        .tally(words)
        .report(model_label, corpus_label)
}

/// Like [`density_report`] over a fallible word stream, stopping at the first
/// read error.
pub fn density_report_stream(
    model: &BpeModel,
    words: impl Iterator<Item = io::Result<String>>,
    model_label: &str,
    corpus_label: &str,
) -> Result<DensityReport, MetricsError> {
    let mut counter = WordCounter::new(model);
    let mut tally = DensityTally::default();
    for word in words {
        let word = word.map_err(|source| MetricsError::Io {
            corpus: corpus_label.to_string(),
            source,
        })?;
        if !word.is_empty() {
            tally.add(counter.count(&word));
        }
    }
    tally.report(model_label, corpus_label)
}

/// A corpus that can be read any number of times.
pub trait CorpusSource: Sync {
    fn label(&self) -> &str;
    fn open(&self) -> io::Result<Box<dyn Iterator<Item = io::Result<String>> + '_>>;
}

/// Words held in memory.
#[derive(Debug, Clone)]
pub struct MemoryCorpus {
    pub label: String,
    pub words: Vec<String>,
}

impl MemoryCorpus {
    pub fn new(
        label: impl Into<String>,
        words: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        Self {
            label: label.into(),
            words: words.into_iter().map(Into::into).collect(),
        }
    }
}

impl CorpusSource for MemoryCorpus {
    fn label(&self) -> &str {
        &self.label
    }

    fn open(&self) -> io::Result<Box<dyn Iterator<Item = io::Result<String>> + '_>> {
        Ok(Box::new(self.words.iter().cloned().map(Ok)))
    }
}

/// Reports for every (model, corpus) pair plus each model's unweighted mean
/// tokens-per-word across corpora.
#[derive(Debug)]
pub struct DensityMatrix {
    pub models: Vec<String>,
    pub corpora: Vec<String>,
    /// `cells[m][c]` is model `m` on corpus `c`.
    pub cells: Vec<Vec<Result<DensityReport, MetricsError>>>,
}

impl DensityMatrix {
    /// Mean tokens-per-word of model `m` over the corpora that produced a
    /// report; `None` when every cell failed.
    pub fn average(&self, m: usize) -> Option<f64> {
        let values: Vec<f64> = self.cells[m]
            .iter()
            .filter_map(|c| c.as_ref().ok().map(|r| r.tok_per_word))
            .collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    pub fn reports(&self) -> impl Iterator<Item = &DensityReport> {
        self.cells.iter().flatten().filter_map(|c| c.as_ref().ok())
    }
}

/// Measures every model on every corpus. Cells are computed in parallel; a
/// failing cell does not affect the others and output order is fixed.
pub fn compare_density(
    models: &[(String, &BpeModel)],
    corpora: &[&dyn CorpusSource],
) -> DensityMatrix {
    let pairs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..corpora.len()).map(move |c| (m, c)))
        .collect();
    let mut flat: Vec<_> = pairs
        .par_iter()
        .map(|&(m, c)| {
            let (label, model) = &models[m];
            let corpus = corpora[c];
            let cell = corpus
                .open()
                .map_err(|source| MetricsError::Io {
                    corpus: corpus.label().to_string(),
                    source,
                })
                .and_then(|words| density_report_stream(model, words, label, corpus.label()));
            (m, c, cell)
        })
        .collect();
    flat.sort_by_key(|&(m, c, _)| (m, c));

    let mut cells: Vec<Vec<_>> = (0..models.len()).map(|_| Vec::new()).collect();
    for (m, _, cell) in flat {
        cells[m].push(cell);
    }
    DensityMatrix {
        models: models.iter().map(|(l, _)| l.clone()).collect(),
        corpora: corpora.iter().map(|c| c.label().to_string()).collect(),
        cells,
    }
}
