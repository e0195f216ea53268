use std::io::{self, Read};

use crate::bpe::Scheme;

const TARGET: usize = 1 << 20;

/// Cuts a byte stream into chunks that end exactly on pretoken boundaries, so
/// encoding the chunks one by one gives the same tokens as encoding the whole
/// stream. Under [`Scheme::None`] the stream is a single pretoken and comes
/// back as one chunk.
pub struct TextChunks<R> {
    reader: R,
    scheme: Scheme,
    target: usize,
    buf: Vec<u8>,
    eof: bool,
}

pub fn text_chunks<R: Read>(reader: R, scheme: Scheme) -> TextChunks<R> {
    TextChunks {
        reader,
        scheme,
        target: TARGET,
        buf: Vec::new(),
        eof: false,
    }
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t'..=b'\r')
}

/// Last offset where an ASCII whitespace byte follows an ASCII non-whitespace
/// byte. Whitespace runs always start a new pretoken under both splitting
/// schemes, so this is a safe cut.
fn last_cut(bytes: &[u8]) -> Option<usize> {
    (1..bytes.len())
        .rev()
        .find(|&i| is_space(bytes[i]) && bytes[i - 1].is_ascii() && !is_space(bytes[i - 1]))
}

impl<R> TextChunks<R> {
    /// Sets the minimum chunk size in bytes (default 1 MiB).
    pub fn with_target(mut self, bytes: usize) -> Self {
        self.target = bytes.max(1);
        self
    }
}

impl<R: Read> Iterator for TextChunks<R> {
    type Item = io::Result<Vec<u8>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.eof {
                return (!self.buf.is_empty()).then(|| Ok(std::mem::take(&mut self.buf)));
            }
            if self.scheme != Scheme::None && self.buf.len() >= self.target {
                if let Some(cut) = last_cut(&self.buf) {
                    let rest = self.buf.split_off(cut);
                    return Some(Ok(std::mem::replace(&mut self.buf, rest)));
                }
            }
            let start = self.buf.len();
            self.buf.resize(start + self.target, 0);
            match self.reader.read(&mut self.buf[start..]) {
                Ok(0) => {
                    self.buf.truncate(start);
                    self.eof = true;
                }
                Ok(n) => self.buf.truncate(start + n),
                Err(e) if e.kind() == io::ErrorKind::Interrupted => self.buf.truncate(start),
                Err(e) => {
                    self.buf.truncate(start);
                    self.eof = true;
                    return Some(Err(e));
                }
            }
        }
    }
}
