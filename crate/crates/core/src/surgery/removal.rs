use std::collections::{BTreeSet, VecDeque};

use crate::bpe::{BpeModel, MergeGraph, TokenId};
use crate::metrics::FreqTable;

use super::{ProtectedSet, SurgeryError};

/// Restricts `proposed` to the largest subset that can be removed without
/// leaving a retained merge that mentions a removed token.
///
/// A token stays removable only while every merge consuming it produces a
/// token that is itself removed. Protected tokens are never removable.
pub fn removable_closure(
    graph: &MergeGraph,
    proposed: &BTreeSet<TokenId>,
    protected: &ProtectedSet,
) -> BTreeSet<TokenId> {
    let mut removable: BTreeSet<TokenId> = proposed
        .iter()
        .copied()
        .filter(|&id| !protected.contains(id) && id.index() < graph.len())
        .collect();

    let mut queue: VecDeque<TokenId> = removable
        .iter()
        .copied()
        .filter(|&id| graph.dependents(id).any(|m| !removable.contains(&m.result)))
        .collect();
    for id in &queue {
        removable.remove(id);
    }
    // A token that becomes retained keeps its forming merge, so both sides of
    // that merge have to stay as well.
    while let Some(id) = queue.pop_front() {
        if let Some((left, right)) = graph.forming_edge(id) {
            for side in [left, right] {
                if removable.remove(&side) {
                    queue.push_back(side);
                }
            }
        }
    }
    removable
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedToken {
    pub id: TokenId,
    pub score: f64,
}

/// Removal candidates, lowest score first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RemovalRanking {
    entries: Vec<RankedToken>,
}

impl RemovalRanking {
    pub fn entries(&self) -> &[RankedToken] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.entries.iter().map(|e| e.id)
    }
}

/// Log-smoothed frequency score.
pub fn removal_score(count: u64) -> f64 {
    (count as f64).ln_1p()
}

/// Ranks every removable token by `ln(1 + count)`, ascending. Ties go to the
/// shorter token, then to the lexicographically smaller byte string.
pub fn score_removal(
    model: &BpeModel,
    freqs: &FreqTable,
    protected: &ProtectedSet,
) -> Result<RemovalRanking, SurgeryError> {
    if let Some(id) = freqs.max_id().filter(|id| id.index() >= model.len()) {
        return Err(SurgeryError::UnknownFrequencyToken {
            id,
            vocab_size: model.len(),
        });
    }
    let graph = MergeGraph::build(model)?;
    let proposed: BTreeSet<TokenId> = model.ids().filter(|&id| !protected.contains(id)).collect();
    let eligible = removable_closure(&graph, &proposed, protected);

    let tokens = model.tokens();
    let mut entries: Vec<RankedToken> = eligible
        .into_iter()
        .map(|id| RankedToken {
            id,
            score: removal_score(freqs.count(id)),
        })
        .collect();
    entries.sort_by(|a, b| {
        let (ta, tb) = (&tokens[a.id.index()], &tokens[b.id.index()]);
        a.score
            .total_cmp(&b.score)
            .then(ta.len().cmp(&tb.len()))
            .then_with(|| ta.cmp(tb))
    });
    Ok(RemovalRanking { entries })
}
