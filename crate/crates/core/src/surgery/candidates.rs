use std::collections::HashMap;

use crate::bpe::BpeModel;
use crate::unicode::cyrillic_count;

use super::SurgeryError;

/// A candidate token and the donors it was found in, in donor order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub bytes: Vec<u8>,
    pub donors: Vec<String>,
}

/// Cyrillic-bearing token strings, deduplicated by bytes and kept in
/// first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSet {
    entries: Vec<Candidate>,
    index: HashMap<Vec<u8>, usize>,
}

impl CandidateSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `bytes` with provenance `donor`, or records `donor` on the
    /// existing entry.
    pub fn insert(&mut self, bytes: &[u8], donor: &str) -> Result<(), SurgeryError> {
        if cyrillic_count(bytes) == 0 {
            return Err(SurgeryError::NotCyrillic(bytes.to_vec()));
        }
        match self.index.get(bytes) {
            Some(&i) => {
                let donors = &mut self.entries[i].donors;
                if !donors.iter().any(|d| d == donor) {
                    donors.push(donor.to_string());
                }
            }
            None => {
                self.index.insert(bytes.to_vec(), self.entries.len());
                self.entries.push(Candidate {
                    bytes: bytes.to_vec(),
                    donors: vec![donor.to_string()],
                });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, bytes: &[u8]) -> Option<&Candidate> {
        self.index.get(bytes).map(|&i| &self.entries[i])
    }
}

/// Collects every donor token containing at least `min_cyrillic` Cyrillic
/// code points. Donors are scanned in order, each in token-id order.
pub fn extract_candidates(
    donors: &[(&str, &BpeModel)],
    min_cyrillic: usize,
) -> Result<CandidateSet, SurgeryError> {
    if donors.is_empty() {
        return Err(SurgeryError::InvalidArgument(
            "at least one donor model is required".into(),
        ));
    }
    if min_cyrillic == 0 {
        return Err(SurgeryError::InvalidArgument(
            "min_cyrillic must be at least 1".into(),
        ));
    }
    let mut set = CandidateSet::new();
    for (label, model) in donors {
        for bytes in model.tokens() {
            if cyrillic_count(bytes) >= min_cyrillic {
                set.insert(bytes, label)?;
            }
        }
    }
    Ok(set)
}
