use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::bpe::{BpeModel, MergeGraph, TokenId};
use crate::metrics::FreqTable;

use super::{
    classify_protected, refine_reachability, score_removal, CandidateSet, PassStats,
    ProtectionClass, SurgeryError,
};

/// How many tokens to swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapCount {
    /// As many as there are placeable new candidates.
    Auto,
    Exactly(usize),
}

#[derive(Debug, Clone)]
pub struct TransplantOptions {
    pub count: SwapCount,
    pub max_passes: usize,
    /// Byte strings that must never be removed, typically the model file's
    /// added/special tokens.
    pub extra_protected: Vec<Vec<u8>>,
}

impl Default for TransplantOptions {
    fn default() -> Self {
        Self {
            count: SwapCount::Auto,
            max_passes: 4,
            extra_protected: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedToken {
    /// Id in the base model.
    pub id: TokenId,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddedToken {
    pub bytes: Vec<u8>,
    pub left: Vec<u8>,
    pub right: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct TransplantResult {
    pub model: BpeModel,
    /// Removed tokens in the order they were selected.
    pub removed: Vec<RemovedToken>,
    /// Added tokens in the order their merges were appended.
    pub added: Vec<AddedToken>,
    pub unplaced: Vec<Vec<u8>>,
    pub stats: PassStats,
}

/// Swaps `k` low-frequency unprotected tokens of `base` for `k` reachable
/// candidates, keeping the vocabulary size fixed.
///
/// Candidates are taken as a prefix of refinement order, so every chosen
/// token's merge only refers to base tokens or earlier chosen tokens. Removal
/// goes leaves first in ranking order: a token is only taken after every
/// token built on it, so no retained merge ever references a removed token
/// and a frequent token never leaves because a rare piece of it ranks low.
pub fn transplant(
    base: &BpeModel,
    candidates: &CandidateSet,
    freqs: &FreqTable,
    options: &TransplantOptions,
) -> Result<TransplantResult, SurgeryError> {
    let refinement = refine_reachability(base, candidates, options.max_passes)?;
    let placeable = refinement.placed.len();
    let k = match options.count {
        SwapCount::Auto => placeable,
        SwapCount::Exactly(k) if k > placeable => {
            return Err(SurgeryError::CandidateShortfall {
                requested: k,
                available: placeable,
            })
        }
        SwapCount::Exactly(k) => k,
    };
    let chosen = &refinement.placed[..k];

    // Base plus the chosen tokens. Base ids are unchanged and the chosen
    // tokens follow in refinement order, matching the augmented model.
    let mut tokens = base.tokens().to_vec();
    let mut merges: Vec<(TokenId, TokenId)> =
        base.merges().iter().map(|m| (m.left, m.right)).collect();
    for p in chosen {
        tokens.push(p.bytes.clone());
        merges.push((p.left, p.right));
    }
    let staged = BpeModel::new(tokens, merges, base.scheme())?;

    let mut protected = classify_protected(&staged);
    for bytes in &options.extra_protected {
        if let Some(id) = staged.token_id(bytes) {
            protected.insert(id, ProtectionClass::Special);
        }
    }
    let ranking = score_removal(&staged, freqs, &protected)?;
    if ranking.len() < k {
        return Err(SurgeryError::RemovalShortfall {
            requested: k,
            available: ranking.len(),
        });
    }

    let graph = MergeGraph::build(&staged)?;
    let ranked: Vec<TokenId> = ranking.ids().collect();
    let selected = select_removals(&graph, &ranked, k);
    if selected.len() != k {
        return Err(SurgeryError::Invariant(format!(
            "selected {} removals, expected {k}",
            selected.len()
        )));
    }

    let removed_set: BTreeSet<TokenId> = selected.iter().copied().collect();
    let model = rebuild_without(&staged, &removed_set)?;

    if model.len() != base.len() {
        return Err(SurgeryError::Invariant(format!(
            "vocabulary size changed from {} to {}",
            base.len(),
            model.len()
        )));
    }
    let added: Vec<AddedToken> = chosen
        .iter()
        .map(|p| AddedToken {
            bytes: p.bytes.clone(),
            left: staged.tokens()[p.left.index()].clone(),
            right: staged.tokens()[p.right.index()].clone(),
        })
        .collect();
    for a in &added {
        let id = model.token_id(&a.bytes).expect("added token kept");
        if !model.is_self_reachable(id)? {
            return Err(SurgeryError::Invariant(format!(
                "added token {:?} is not self-reachable",
                String::from_utf8_lossy(&a.bytes)
            )));
        }
    }

    Ok(TransplantResult {
        model,
        removed: selected
            .into_iter()
            .map(|id| RemovedToken {
                id,
                bytes: base.tokens()[id.index()].clone(),
            })
            .collect(),
        added,
        unplaced: refinement.unplaced,
        stats: refinement.stats,
    })
}

/// Removes `k` tokens leaves first: a token becomes available once every
/// merge consuming it has lost its result, and the available token that ranks
/// lowest goes next. `ranked` must be closed under dependents, which
/// [`score_removal`] guarantees, so the longest remaining token is always
/// available and exactly `min(k, ranked.len())` tokens are returned.
fn select_removals(graph: &MergeGraph, ranked: &[TokenId], k: usize) -> Vec<TokenId> {
    let position: HashMap<TokenId, usize> =
        ranked.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut blocking: Vec<usize> = ranked
        .iter()
        .map(|&id| graph.dependents(id).count())
        .collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..ranked.len())
        .filter(|&i| blocking[i] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let Some(Reverse(i)) = ready.pop() else {
            break;
        };
        let id = ranked[i];
        order.push(id);
        if let Some((left, right)) = graph.forming_edge(id) {
            let sides = if left == right {
                vec![left]
            } else {
                vec![left, right]
            };
            for side in sides {
                if let Some(&j) = position.get(&side) {
                    blocking[j] -= 1;
                    if blocking[j] == 0 {
                        ready.push(Reverse(j));
                    }
                }
            }
        }
    }
    order
}

/// Drops `removed` tokens and every merge producing them. Retained tokens
/// keep their relative order and get contiguous ids.
fn rebuild_without(
    model: &BpeModel,
    removed: &BTreeSet<TokenId>,
) -> Result<BpeModel, SurgeryError> {
    let mut remap: HashMap<TokenId, TokenId> = HashMap::with_capacity(model.len());
    let mut tokens = Vec::with_capacity(model.len() - removed.len());
    for (i, bytes) in model.tokens().iter().enumerate() {
        let old = TokenId::from(i);
        if !removed.contains(&old) {
            remap.insert(old, TokenId::from(tokens.len()));
            tokens.push(bytes.clone());
        }
    }
    let mut merges = Vec::with_capacity(model.merges().len());
    for m in model.merges() {
        if removed.contains(&m.result) {
            continue;
        }
        match (remap.get(&m.left), remap.get(&m.right)) {
            (Some(&l), Some(&r)) => merges.push((l, r)),
            _ => {
                return Err(SurgeryError::Invariant(format!(
                    "retained merge #{} references a removed token",
                    m.rank
                )))
            }
        }
    }
    let rebuilt = BpeModel::new(tokens, merges, model.scheme())?;
    MergeGraph::build(&rebuilt)?;
    Ok(rebuilt)
}
