use log::warn;

use crate::bpe::{BpeModel, TokenId};

use super::{CandidateSet, SurgeryError};

/// Outcome of one refinement pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassRecord {
    /// 1-based pass number.
    pub pass: usize,
    /// Candidates reachable after this pass, cumulative.
    pub reachable: usize,
    pub merges_added: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PassStats {
    pub passes: Vec<PassRecord>,
    /// Size of the candidate set.
    pub candidates: usize,
    /// Candidates already in the base vocabulary and self-reachable there.
    pub present: usize,
    /// Candidates absent from the base vocabulary (and longer than one byte).
    pub new_candidates: usize,
}

impl PassStats {
    pub fn reachable(&self) -> usize {
        self.passes.last().map_or(self.present, |p| p.reachable)
    }

    pub fn merges_added(&self) -> usize {
        self.passes.iter().map(|p| p.merges_added).sum()
    }

    /// Reachable share of all candidates.
    pub fn reachable_fraction(&self) -> f64 {
        ratio(self.reachable(), self.candidates)
    }

    /// Share of new candidates that received a forming merge.
    pub fn new_reachable_fraction(&self) -> f64 {
        ratio(self.reachable() - self.present, self.new_candidates)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// A candidate that received a forming merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedToken {
    pub bytes: Vec<u8>,
    /// Id in the augmented model.
    pub id: TokenId,
    pub left: TokenId,
    pub right: TokenId,
    pub pass: usize,
}

#[derive(Debug, Clone)]
pub struct Refinement {
    /// Base model plus every placed candidate and its merge.
    pub model: BpeModel,
    pub stats: PassStats,
    /// New tokens in the order their merges were appended.
    pub placed: Vec<PlacedToken>,
    /// Candidates still needing more than two pieces, or present in the base
    /// vocabulary without being reachable.
    pub unplaced: Vec<Vec<u8>>,
    /// Single-byte candidates, which need no merge.
    pub skipped: Vec<Vec<u8>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pending,
    Done,
    Unplaceable,
}

/// Gives candidates forming merges wherever they split into exactly two
/// existing tokens, repeating for up to `max_passes` passes.
///
/// Every candidate in a pass is decomposed against the model as it stood at
/// the start of that pass; the resulting merges are appended afterwards in
/// candidate order, at the lowest priority. Passes stop early once nothing is
/// pending or a pass places nothing.
pub fn refine_reachability(
    base: &BpeModel,
    candidates: &CandidateSet,
    max_passes: usize,
) -> Result<Refinement, SurgeryError> {
    if max_passes == 0 {
        return Err(SurgeryError::InvalidArgument(
            "max_passes must be at least 1".into(),
        ));
    }

    let entries = candidates.entries();
    let mut status = vec![Status::Pending; entries.len()];
    let mut stats = PassStats {
        candidates: entries.len(),
        ..PassStats::default()
    };
    let mut skipped = Vec::new();
    for (i, c) in entries.iter().enumerate() {
        if c.bytes.len() == 1 {
            warn!("skipping single-byte candidate 0x{:02x}", c.bytes[0]);
            skipped.push(c.bytes.clone());
            status[i] = Status::Unplaceable;
            continue;
        }
        match base.token_id(&c.bytes) {
            Some(id) => {
                // A vocabulary token either already encodes to itself or is
                // preempted by existing merges; appending merges cannot fix
                // the latter.
                status[i] = if base.is_self_reachable(id)? {
                    stats.present += 1;
                    Status::Done
                } else {
                    Status::Unplaceable
                };
            }
            None => stats.new_candidates += 1,
        }
    }

    let mut model = base.clone();
    let mut placed = Vec::new();
    let mut reachable = stats.present;
    for pass in 1..=max_passes {
        let mut additions: Vec<(usize, TokenId, TokenId)> = Vec::new();
        for (i, c) in entries.iter().enumerate() {
            if status[i] != Status::Pending {
                continue;
            }
            if let [left, right] = model.decomposition(&c.bytes)?[..] {
                additions.push((i, left, right));
            }
        }

        if !additions.is_empty() {
            let mut tokens = model.tokens().to_vec();
            let mut merges: Vec<(TokenId, TokenId)> =
                model.merges().iter().map(|m| (m.left, m.right)).collect();
            for &(i, left, right) in &additions {
                let id = TokenId::from(tokens.len());
                tokens.push(entries[i].bytes.clone());
                merges.push((left, right));
                status[i] = Status::Done;
                placed.push(PlacedToken {
                    bytes: entries[i].bytes.clone(),
                    id,
                    left,
                    right,
                    pass,
                });
            }
            model = BpeModel::new(tokens, merges, model.scheme())?;
        }

        reachable += additions.len();
        stats.passes.push(PassRecord {
            pass,
            reachable,
            merges_added: additions.len(),
        });
        if additions.is_empty() || !status.contains(&Status::Pending) {
            break;
        }
    }

    let unplaced = entries
        .iter()
        .zip(&status)
        .filter(|(c, s)| **s != Status::Done && c.bytes.len() > 1)
        .map(|(c, _)| c.bytes.clone())
        .collect();
    Ok(Refinement {
        model,
        stats,
        placed,
        unplaced,
        skipped,
    })
}
