use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{pretokenize, BpeError, BpeModel, TokenId};

const NONE: usize = usize::MAX;

#[derive(Clone, Copy)]
struct Symbol {
    id: TokenId,
    prev: usize,
    next: usize,
}

impl BpeModel {
    /// Encodes `text` by pretokenizing it with the model's scheme and merging
    /// each pretoken independently.
    pub fn encode(&self, text: &[u8]) -> Vec<TokenId> {
        let mut out = Vec::with_capacity(text.len() / 2 + 1);
        for piece in pretokenize(text, self.scheme()) {
            self.merge_into(piece, &mut out);
        }
        out
    }

    /// Encodes a single bare word with no pretokenization.
    pub fn encode_word(&self, word: &[u8]) -> Result<Vec<TokenId>, BpeError> {
        if word.is_empty() {
            return Err(BpeError::EmptyInput);
        }
        let mut out = Vec::with_capacity(word.len());
        self.merge_into(word, &mut out);
        Ok(out)
    }

    /// Number of tokens `word` encodes to, without allocating the ids.
    pub fn count_word(&self, word: &[u8]) -> Result<usize, BpeError> {
        self.encode_word(word).map(|ids| ids.len())
    }

    /// How `text` splits into existing tokens under the current merges.
    /// Unlike `encode`, `text` need not correspond to pretoken boundaries.
    pub fn decomposition(&self, text: &[u8]) -> Result<Vec<TokenId>, BpeError> {
        self.encode_word(text)
    }

    /// True when the token's own bytes encode back to exactly that token.
    pub fn is_self_reachable(&self, id: TokenId) -> Result<bool, BpeError> {
        let bytes = self.token_bytes(id)?;
        Ok(self.encode_word(bytes)? == [id])
    }

    pub fn decode(&self, ids: &[TokenId]) -> Result<Vec<u8>, BpeError> {
        let mut out = Vec::with_capacity(ids.len() * 2);
        for &id in ids {
            out.extend_from_slice(self.token_bytes(id)?);
        }
        Ok(out)
    }

    /// Applies merges to one pretoken: repeatedly joins the adjacent pair
    /// with the lowest merge rank, leftmost first, until none applies.
    fn merge_into(&self, piece: &[u8], out: &mut Vec<TokenId>) {
        match piece {
            [] => return,
            [b] => {
                out.push(self.byte_token(*b));
                return;
            }
            _ => {}
        }

        let n = piece.len();
        let mut symbols: Vec<Symbol> = piece
            .iter()
            .enumerate()
            .map(|(i, &b)| Symbol {
                id: self.byte_token(b),
                prev: if i == 0 { NONE } else { i - 1 },
                next: if i + 1 == n { NONE } else { i + 1 },
            })
            .collect();

        // Entries are (rank, position of left symbol). Positions preserve
        // sequence order, so the heap minimum is the leftmost lowest rank.
        // Stale entries are detected by re-reading the pair at that position.
        let mut heap = BinaryHeap::new();
        for i in 0..n - 1 {
            if let Some((rank, _)) = self.merge_for(symbols[i].id, symbols[i + 1].id) {
                heap.push(Reverse((rank, i)));
            }
        }

        while let Some(Reverse((rank, pos))) = heap.pop() {
            let left = symbols[pos];
            if left.next == NONE {
                continue;
            }
            let right = symbols[left.next];
            let Some((current_rank, result)) = self.merge_for(left.id, right.id) else {
                continue;
            };
            if current_rank != rank {
                continue;
            }

            let removed = left.next;
            symbols[pos].id = result;
            symbols[pos].next = right.next;
            if right.next != NONE {
                symbols[right.next].prev = pos;
            }
            // The right symbol is unlinked; clear it so stale entries at its
            // position can never validate.
            symbols[removed].next = NONE;

            if left.prev != NONE {
                if let Some((r, _)) = self.merge_for(symbols[left.prev].id, result) {
                    heap.push(Reverse((r, left.prev)));
                }
            }
            if right.next != NONE {
                if let Some((r, _)) = self.merge_for(result, symbols[right.next].id) {
                    heap.push(Reverse((r, pos)));
                }
            }
        }

        let mut i = 0;
        while i != NONE {
            out.push(symbols[i].id);
            i = symbols[i].next;
        }
    }
}
