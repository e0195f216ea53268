use super::{BpeError, BpeModel, MergeRule, TokenId};

/// Token dependency structure induced by the merge list.
///
/// Every token has at most one forming merge. `dependents(t)` lists the
/// merges that consume `t` as their left or right side.
#[derive(Debug, Clone)]
pub struct MergeGraph {
    merges: Vec<MergeRule>,
    forming: Vec<Option<usize>>,
    dependents: Vec<Vec<usize>>,
}

impl MergeGraph {
    pub fn build(model: &BpeModel) -> Result<Self, BpeError> {
        Self::from_parts(model.tokens(), model.merges())
    }

    /// Builds the graph from a raw vocabulary and merge list, checking that
    /// every merge refers to known tokens and that its result is exactly the
    /// concatenation of its sides.
    pub fn from_parts(tokens: &[Vec<u8>], merges: &[MergeRule]) -> Result<Self, BpeError> {
        let n = tokens.len();
        let mut forming = vec![None; n];
        let mut dependents = vec![Vec::new(); n];
        for (i, m) in merges.iter().enumerate() {
            for id in [m.left, m.right, m.result] {
                if id.index() >= n {
                    return Err(BpeError::UnknownMergeToken { rank: m.rank, id });
                }
            }
            let (l, r, res) = (
                &tokens[m.left.index()],
                &tokens[m.right.index()],
                &tokens[m.result.index()],
            );
            if res.len() != l.len() + r.len() || res[..l.len()] != l[..] || res[l.len()..] != r[..]
            {
                return Err(BpeError::MergeLengthMismatch { rank: m.rank });
            }
            if let Some(first) = forming[m.result.index()] {
                let first: &MergeRule = &merges[first];
                return Err(BpeError::DuplicateMergeResult {
                    token: m.result,
                    first_rank: first.rank,
                    second_rank: m.rank,
                });
            }
            forming[m.result.index()] = Some(i);
            dependents[m.left.index()].push(i);
            if m.right != m.left {
                dependents[m.right.index()].push(i);
            }
        }
        Ok(Self {
            merges: merges.to_vec(),
            forming,
            dependents,
        })
    }

    pub fn len(&self) -> usize {
        self.forming.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forming.is_empty()
    }

    pub fn forming_merge(&self, id: TokenId) -> Option<&MergeRule> {
        self.forming
            .get(id.index())
            .copied()
            .flatten()
            .map(|i| &self.merges[i])
    }

    /// The `(left, right)` pair that forms `id`.
    pub fn forming_edge(&self, id: TokenId) -> Option<(TokenId, TokenId)> {
        self.forming_merge(id).map(|m| (m.left, m.right))
    }

    pub fn dependents(&self, id: TokenId) -> impl Iterator<Item = &MergeRule> + '_ {
        self.dependents
            .get(id.index())
            .into_iter()
            .flatten()
            .map(|&i| &self.merges[i])
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }
}
