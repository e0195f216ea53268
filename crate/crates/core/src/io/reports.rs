use std::fmt::Write as _;
use std::io::{Read, Write};

use serde_json::{json, Map, Value};

use crate::metrics::{DensityMatrix, DensityReport};
use crate::surgery::{CandidateSet, TransplantResult};

use super::{byte_unicode_map, LoadError};

fn render(bytes: &[u8]) -> Value {
    Value::String(byte_unicode_map().render(bytes))
}

fn write_json(value: &Value, mut sink: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut sink, value)?;
    sink.write_all(b"\n")
}

/// `{"candidates": [{"token": <rendered>, "donors": [...]}, ...]}`
pub fn save_candidates(set: &CandidateSet, sink: impl Write) -> std::io::Result<()> {
    let entries: Vec<Value> = set
        .entries()
        .iter()
        .map(|c| json!({ "token": render(&c.bytes), "donors": c.donors }))
        .collect();
    write_json(&json!({ "candidates": entries }), sink)
}

pub fn load_candidates(mut source: impl Read) -> Result<CandidateSet, LoadError> {
    let mut raw = Vec::new();
    source.read_to_end(&mut raw)?;
    let root: Value = serde_json::from_slice(&raw).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let entries = root
        .get("candidates")
        .and_then(Value::as_array)
        .ok_or_else(|| LoadError::Layout("missing `candidates` array".into()))?;
    let map = byte_unicode_map();
    let mut set = CandidateSet::new();
    for (i, entry) in entries.iter().enumerate() {
        let token = entry
            .get("token")
            .and_then(Value::as_str)
            .ok_or_else(|| LoadError::Layout(format!("candidate #{i} has no `token` string")))?;
        let bytes = map.parse(token).map_err(|c| {
            LoadError::Layout(format!(
                "candidate #{i} contains {c:?}, outside the byte map"
            ))
        })?;
        let donors: Vec<&str> = entry
            .get("donors")
            .and_then(Value::as_array)
            .map(|d| d.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        let donors = if donors.is_empty() {
            vec!["unknown"]
        } else {
            donors
        };
        for donor in donors {
            set.insert(&bytes, donor)
                .map_err(|e| LoadError::Layout(format!("candidate #{i}: {e}")))?;
        }
    }
    Ok(set)
}

/// The surgery report. Besides the per-pass records and token lists it
/// carries reachability over both denominators: all candidates, and only
/// those absent from the base vocabulary.
pub fn surgery_report(result: &TransplantResult) -> Value {
    let stats = &result.stats;
    let passes: Vec<Value> = stats
        .passes
        .iter()
        .map(
            |p| json!({ "pass": p.pass, "reachable": p.reachable, "merges_added": p.merges_added }),
        )
        .collect();
    let mut root = Map::new();
    root.insert("passes".into(), Value::Array(passes));
    root.insert(
        "removed".into(),
        result.removed.iter().map(|t| render(&t.bytes)).collect(),
    );
    root.insert(
        "added".into(),
        result.added.iter().map(|t| render(&t.bytes)).collect(),
    );
    root.insert(
        "unplaced".into(),
        result.unplaced.iter().map(|b| render(b)).collect(),
    );
    root.insert("candidates_total".into(), json!(stats.candidates));
    root.insert("candidates_present".into(), json!(stats.present));
    root.insert("candidates_new".into(), json!(stats.new_candidates));
    root.insert(
        "reachable_fraction".into(),
        json!(stats.reachable_fraction()),
    );
    root.insert(
        "reachable_fraction_new".into(),
        json!(stats.new_reachable_fraction()),
    );
    Value::Object(root)
}

pub fn save_surgery_report(result: &TransplantResult, sink: impl Write) -> std::io::Result<()> {
    write_json(&surgery_report(result), sink)
}

pub fn density_json(report: &DensityReport) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

/// Every successful cell of `matrix` as a JSON array, model-major.
pub fn density_matrix_json(matrix: &DensityMatrix) -> Value {
    Value::Array(matrix.reports().map(density_json).collect())
}

/// Plain-text table: one row per (corpus, model) cell with tokens per word
/// and the 1 / ≤2 / >2 token shares, followed by each model's average.
pub fn density_table(matrix: &DensityMatrix) -> String {
    let header = [
        "Corpus",
        "Tokenizer",
        "tok/word",
        "1 tok (%)",
        "≤2 tok (%)",
        ">2 tok (%)",
    ];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (c, corpus) in matrix.corpora.iter().enumerate() {
        for (m, model) in matrix.models.iter().enumerate() {
            let row = match &matrix.cells[m][c] {
                Ok(r) => vec![
                    corpus.clone(),
                    model.clone(),
                    format!("{:.2}", r.tok_per_word),
                    format!("{:.1}", r.pct_1),
                    format!("{:.1}", r.pct_le2),
                    format!("{:.1}", r.pct_gt2),
                ],
                Err(e) => vec![
                    corpus.clone(),
                    model.clone(),
                    format!("error: {e}"),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            };
            rows.push(row);
        }
    }

    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            if i < 2 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "{cell:>w$}");
            }
        }
        out.trim_end().to_string()
    };

    let mut out = String::new();
    out.push_str(&line(&header.map(String::from)));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    for (m, model) in matrix.models.iter().enumerate() {
        match matrix.average(m) {
            Some(avg) => {
                let _ = writeln!(out, "Avg tok/word  {model}  {avg:.2}");
            }
            None => {
                let _ = writeln!(out, "Avg tok/word  {model}  n/a");
            }
        }
    }
    out
}
