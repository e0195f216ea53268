use std::collections::VecDeque;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::PathBuf;

use serde_json::Value;

use crate::metrics::{split_words, CorpusSource};

const CHUNK: usize = 64 * 1024;

/// Counters describing a finished or in-progress word stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamStats {
    pub bytes: u64,
    pub words: u64,
    /// Invalid UTF-8 sequences replaced with U+FFFD.
    pub replaced: u64,
}

/// Words of a plain UTF-8 text source, read in bounded chunks.
///
/// Chunks are cut after the last ASCII whitespace byte, which can never fall
/// inside a multi-byte sequence, so decoding never sees a split character.
pub struct WordStream<R> {
    reader: R,
    scratch: Box<[u8]>,
    buf: Vec<u8>,
    pending: VecDeque<String>,
    eof: bool,
    stats: StreamStats,
}

pub fn stream_words<R: Read>(reader: R) -> WordStream<R> {
    WordStream {
        reader,
        scratch: vec![0; CHUNK].into_boxed_slice(),
        buf: Vec::new(),
        pending: VecDeque::new(),
        eof: false,
        stats: StreamStats::default(),
    }
}

impl<R: Read> WordStream<R> {
    pub fn stats(&self) -> StreamStats {
        self.stats
    }

    fn fill(&mut self) -> io::Result<()> {
        let n = loop {
            match self.reader.read(&mut self.scratch) {
                Ok(n) => break n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            }
        };
        let searched = self.buf.len();
        self.buf.extend_from_slice(&self.scratch[..n]);
        self.stats.bytes += n as u64;
        if n == 0 {
            self.eof = true;
        }

        let cut = if self.eof {
            self.buf.len()
        } else {
            // Bytes before `searched` were already known to hold no whitespace.
            match self.buf[searched..]
                .iter()
                .rposition(u8::is_ascii_whitespace)
            {
                Some(i) => searched + i + 1,
                None => return Ok(()),
            }
        };
        let (text, replaced) = decode_lossy(&self.buf[..cut]);
        self.buf.drain(..cut);
        self.stats.replaced += replaced;
        self.pending.extend(split_words(&text).map(str::to_owned));
        Ok(())
    }
}

impl<R: Read> Iterator for WordStream<R> {
    type Item = io::Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(word) = self.pending.pop_front() {
                self.stats.words += 1;
                return Some(Ok(word));
            }
            if self.eof {
                return None;
            }
            if let Err(e) = self.fill() {
                self.eof = true;
                return Some(Err(e));
            }
        }
    }
}

/// Words from the `field` string of every line of a JSON-lines source.
/// Blank lines are skipped; lines without the field contribute nothing.
pub fn stream_jsonl_words<R: Read>(
    reader: R,
    field: &str,
) -> impl Iterator<Item = io::Result<String>> {
    let field = field.to_string();
    BufReader::new(reader).lines().enumerate().flat_map(
        move |(i, line)| -> Box<dyn Iterator<Item = io::Result<String>>> {
            let line = match line {
                Ok(line) => line,
                Err(e) => return Box::new(std::iter::once(Err(e))),
            };
            if line.trim().is_empty() {
                return Box::new(std::iter::empty());
            }
            match serde_json::from_str::<Value>(&line) {
                Ok(v) => {
                    let text = v.get(&field).and_then(Value::as_str).unwrap_or("");
                    let words: Vec<_> = split_words(text).map(|w| Ok(w.to_owned())).collect();
                    Box::new(words.into_iter())
                }
                Err(e) => Box::new(std::iter::once(Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("line {}: {e}", i + 1),
                )))),
            }
        },
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusFormat {
    /// Plain UTF-8 text.
    Plain,
    /// One JSON object per line; words come from the named string field.
    Jsonl { field: String },
}

/// A corpus file, reopened for every pass over it.
#[derive(Debug, Clone)]
pub struct FileCorpus {
    pub label: String,
    pub path: PathBuf,
    pub format: CorpusFormat,
}

impl FileCorpus {
    pub fn open_words(&self) -> io::Result<Box<dyn Iterator<Item = io::Result<String>>>> {
        let file = File::open(&self.path)?;
        Ok(match &self.format {
            CorpusFormat::Plain => Box::new(stream_words(file)),
            CorpusFormat::Jsonl { field } => Box::new(stream_jsonl_words(file, field)),
        })
    }
}

impl CorpusSource for FileCorpus {
    fn label(&self) -> &str {
        &self.label
    }

    fn open(&self) -> io::Result<Box<dyn Iterator<Item = io::Result<String>> + '_>> {
        self.open_words()
    }
}

fn decode_lossy(bytes: &[u8]) -> (String, u64) {
    let mut text = String::with_capacity(bytes.len());
    let mut replaced = 0;
    for chunk in bytes.utf8_chunks() {
        text.push_str(chunk.valid());
        if !chunk.invalid().is_empty() {
            text.push(char::REPLACEMENT_CHARACTER);
            replaced += 1;
        }
    }
    (text, replaced)
}
