//! Test-only helpers shared by integration and acceptance suites: a naive
//! reference encoder and a random model generator.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use vocab_graft::bpe::pretokenize;
use vocab_graft::{BpeModel, Scheme, TokenId};

/// Reference BPE: on every step scan all adjacent pairs, apply the merge
/// with the lowest rank (leftmost on ties), repeat until nothing applies.
/// Works purely on byte strings and the merge list.
pub struct NaiveEncoder {
    ranks: HashMap<(Vec<u8>, Vec<u8>), usize>,
    ids: HashMap<Vec<u8>, TokenId>,
}

impl NaiveEncoder {
    pub fn new(model: &BpeModel) -> Self {
        let tokens = model.tokens();
        let ranks = model
            .merges()
            .iter()
            .enumerate()
            .map(|(rank, m)| {
                (
                    (
                        tokens[m.left.index()].clone(),
                        tokens[m.right.index()].clone(),
                    ),
                    rank,
                )
            })
            .collect();
        let ids = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), TokenId(i as u32)))
            .collect();
        Self { ranks, ids }
    }

    pub fn encode_pieces(&self, text: &[u8]) -> Vec<Vec<u8>> {
        let mut seq: Vec<Vec<u8>> = text.iter().map(|&b| vec![b]).collect();
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in 0..seq.len().saturating_sub(1) {
                if let Some(&rank) = self.ranks.get(&(seq[i].clone(), seq[i + 1].clone())) {
                    if best.is_none_or(|(r, _)| rank < r) {
                        best = Some((rank, i));
                    }
                }
            }
            let Some((_, i)) = best else { break };
            let right = seq.remove(i + 1);
            seq[i].extend_from_slice(&right);
        }
        seq
    }

    /// Encodes `text` as a single pretoken.
    pub fn encode(&self, text: &[u8]) -> Vec<TokenId> {
        self.encode_pieces(text)
            .iter()
            .map(|p| self.ids[p])
            .collect()
    }

    /// Encodes each pretoken of `text` separately.
    pub fn encode_text(&self, text: &[u8], scheme: Scheme) -> Vec<TokenId> {
        pretokenize(text, scheme)
            .into_iter()
            .flat_map(|p| self.encode(p))
            .collect()
    }
}

/// A random byte-level model with up to `max_merges` merges drawn over a
/// small alphabet so that merges actually fire on random text.
pub fn random_model(rng: &mut impl Rng, max_merges: usize, scheme: Scheme) -> BpeModel {
    let alphabet: Vec<Vec<u8>> = ALPHABET.iter().map(|&b| vec![b]).collect();
    let mut tokens: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
    let mut index: HashMap<Vec<u8>, TokenId> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), TokenId(i as u32)))
        .collect();
    let mut pool = alphabet.clone();
    let mut merges = Vec::new();
    let target = rng.gen_range(0..=max_merges);
    let mut attempts = 0;
    while merges.len() < target && attempts < max_merges * 20 {
        attempts += 1;
        let l = pool.choose(rng).unwrap().clone();
        let r = pool.choose(rng).unwrap().clone();
        let joined = [l.as_slice(), r.as_slice()].concat();
        if joined.len() > 8 || index.contains_key(&joined) {
            continue;
        }
        let id = TokenId(tokens.len() as u32);
        tokens.push(joined.clone());
        index.insert(joined.clone(), id);
        merges.push((index[&l], index[&r]));
        pool.push(joined);
    }
    // Shuffle merge order so ranks do not simply follow construction order;
    // a merge may then rank before the merges that form its inputs.
    if rng.gen_bool(0.5) {
        merges.shuffle(rng);
    }
    BpeModel::new(tokens, merges, scheme).expect("generated model is valid")
}

pub const ALPHABET: &[u8] = b"abcde \x00\xd0\xbf";

/// Random text, mostly over the model alphabet with occasional arbitrary bytes.
pub fn random_text(rng: &mut impl Rng, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.1) {
                rng.gen()
            } else {
                *ALPHABET.choose(rng).unwrap()
            }
        })
        .collect()
}
