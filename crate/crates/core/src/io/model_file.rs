use std::collections::HashMap;
use std::io::{Read, Write};

use serde_json::{Map, Value};
use thiserror::Error;

use crate::bpe::{BpeError, BpeModel, Scheme, TokenId};

use super::byte_unicode_map;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("failed to read model: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unexpected model layout: {0}")]
    Layout(String),
    #[error("vocabulary is missing the single-byte token 0x{0:02x}")]
    MissingByte(u8),
    #[error("merge `{pair}` references unknown token `{token}`")]
    UnknownMergeToken { pair: String, token: String },
    #[error("merge `{pair}` produces a token that is not in the vocabulary")]
    MissingMergeResult { pair: String },
    #[error("token `{token}` is produced by merges #{first_rank} and #{second_rank}")]
    DuplicateMergeResult {
        token: String,
        first_rank: u32,
        second_rank: u32,
    },
    #[error("invalid model: {0}")]
    Model(BpeError),
}

/// Everything in a model file that is not the vocabulary, merge list or
/// pretokenizer tag. Kept verbatim so that added/special-token sections and
/// other tooling fields survive a load/save cycle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    /// Top-level keys besides `model` and `pretokenizer`.
    pub top: Map<String, Value>,
    /// Keys of the `model` object besides `type`, `vocab` and `merges`.
    pub model: Map<String, Value>,
}

impl Metadata {
    /// Byte strings of tokens declared in an `added_tokens` section.
    pub fn added_token_contents(&self) -> Vec<Vec<u8>> {
        let Some(Value::Array(entries)) = self.top.get("added_tokens") else {
            return Vec::new();
        };
        entries
            .iter()
            .filter_map(|e| e.get("content").and_then(Value::as_str))
            .map(|s| s.as_bytes().to_vec())
            .collect()
    }
}

/// A model together with the opaque parts of the file it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: BpeModel,
    pub metadata: Metadata,
}

impl ModelFile {
    pub fn new(model: BpeModel) -> Self {
        Self {
            model,
            metadata: Metadata::default(),
        }
    }
}

pub fn load_model(source: impl Read) -> Result<BpeModel, LoadError> {
    load_model_file(source).map(|f| f.model)
}

pub fn save_model(model: &BpeModel, sink: impl Write) -> std::io::Result<()> {
    save_model_file(
        &ModelFile {
            model: model.clone(),
            metadata: Metadata::default(),
        },
        sink,
    )
}

/// Canonical serialization as an in-memory buffer.
pub fn model_to_vec(file: &ModelFile) -> Vec<u8> {
    let mut out = Vec::new();
    save_model_file(file, &mut out).expect("writing to a Vec cannot fail");
    out
}

/// Reads a model in either the nested layout (`{"model": {...}}`) or the flat
/// layout where `vocab` and `merges` sit at the top level.
pub fn load_model_file(mut source: impl Read) -> Result<ModelFile, LoadError> {
    let mut raw = Vec::new();
    source.read_to_end(&mut raw)?;
    let root: Value = serde_json::from_slice(&raw).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(mut root) = root else {
        return Err(LoadError::Layout("top level is not a JSON object".into()));
    };

    let scheme = scheme_from(&root)?;
    root.remove("pretokenizer");

    let (mut body, top) = match root.remove("model") {
        Some(Value::Object(body)) => (body, root),
        Some(_) => return Err(LoadError::Layout("`model` is not an object".into())),
        None => {
            // Flat layout: whatever sits beside vocab/merges is top-level metadata.
            let mut body = root;
            let mut top = Map::new();
            for key in body.keys().cloned().collect::<Vec<_>>() {
                if !matches!(key.as_str(), "type" | "vocab" | "merges") {
                    top.insert(key.clone(), body.remove(&key).expect("key listed"));
                }
            }
            (body, top)
        }
    };

    match body.remove("type") {
        None => {}
        Some(Value::String(t)) if t == "BPE" => {}
        Some(other) => {
            return Err(LoadError::Layout(format!(
                "unsupported model type {other}, only BPE is handled"
            )))
        }
    }

    let (tokens, by_rendered) = parse_vocab(body.remove("vocab"))?;
    let merges = parse_merges(body.remove("merges"), &tokens, &by_rendered)?;
    let model = BpeModel::new(tokens, merges, scheme).map_err(|e| match e {
        BpeError::MissingByte(b) => LoadError::MissingByte(b),
        BpeError::DuplicateMergeResult {
            token,
            first_rank,
            second_rank,
        } => LoadError::DuplicateMergeResult {
            token: rendered_of(&by_rendered, token),
            first_rank,
            second_rank,
        },
        other => LoadError::Model(other),
    })?;

    Ok(ModelFile {
        model,
        metadata: Metadata { top, model: body },
    })
}

/// Writes the canonical nested layout: object keys sorted, merges in rank
/// order as `"left right"` strings, two-space indentation, trailing newline.
pub fn save_model_file(file: &ModelFile, mut sink: impl Write) -> std::io::Result<()> {
    let map = byte_unicode_map();
    let model = &file.model;

    let mut vocab = Map::new();
    for (i, bytes) in model.tokens().iter().enumerate() {
        vocab.insert(map.render(bytes), Value::from(i as u64));
    }
    let merges: Vec<Value> = model
        .merges()
        .iter()
        .map(|m| {
            let left = map.render(&model.tokens()[m.left.index()]);
            let right = map.render(&model.tokens()[m.right.index()]);
            Value::String(format!("{left} {right}"))
        })
        .collect();

    let mut body = file.metadata.model.clone();
    body.insert("type".into(), Value::from("BPE"));
    body.insert("vocab".into(), Value::Object(vocab));
    body.insert("merges".into(), Value::Array(merges));

    let mut root = file.metadata.top.clone();
    root.insert("model".into(), Value::Object(body));
    root.insert("pretokenizer".into(), Value::from(model.scheme().as_str()));

    serde_json::to_writer_pretty(&mut sink, &Value::Object(root))?;
    sink.write_all(b"\n")
}

fn scheme_from(root: &Map<String, Value>) -> Result<Scheme, LoadError> {
    match root.get("pretokenizer") {
        Some(Value::String(tag)) => tag.parse().map_err(LoadError::Model),
        Some(other) => Err(LoadError::Layout(format!(
            "`pretokenizer` must be a string tag, found {other}"
        ))),
        // Files produced by other tooling describe their pretokenizer in a
        // `pre_tokenizer` object; category splitting is the closest scheme.
        None => match root.get("pre_tokenizer") {
            Some(Value::Null) | None => Ok(Scheme::None),
            Some(_) => Ok(Scheme::CategorySplit),
        },
    }
}

type RenderedIndex = HashMap<String, TokenId>;

fn parse_vocab(vocab: Option<Value>) -> Result<(Vec<Vec<u8>>, RenderedIndex), LoadError> {
    let Some(Value::Object(vocab)) = vocab else {
        return Err(LoadError::Layout("missing `vocab` object".into()));
    };
    let map = byte_unicode_map();
    let n = vocab.len();
    let mut slots: Vec<Option<Vec<u8>>> = vec![None; n];
    let mut by_rendered = HashMap::with_capacity(n);
    for (rendered, id) in vocab {
        let id = id
            .as_u64()
            .and_then(|id| usize::try_from(id).ok())
            .filter(|&id| id < n)
            .ok_or_else(|| {
                LoadError::Layout(format!(
                    "token `{rendered}` has id {id}; ids must be a permutation of 0..{n}"
                ))
            })?;
        if slots[id].is_some() {
            return Err(LoadError::Layout(format!("id {id} is assigned twice")));
        }
        let bytes = map.parse(&rendered).map_err(|c| {
            LoadError::Layout(format!(
                "token `{rendered}` contains {c:?}, which is outside the byte map"
            ))
        })?;
        slots[id] = Some(bytes);
        by_rendered.insert(rendered, TokenId::from(id));
    }
    // Every slot is filled: n distinct ids below n.
    let tokens = slots.into_iter().map(|s| s.expect("permutation")).collect();
    Ok((tokens, by_rendered))
}

fn parse_merges(
    merges: Option<Value>,
    tokens: &[Vec<u8>],
    by_rendered: &RenderedIndex,
) -> Result<Vec<(TokenId, TokenId)>, LoadError> {
    let entries = match merges {
        None => return Ok(Vec::new()),
        Some(Value::Array(entries)) => entries,
        Some(_) => return Err(LoadError::Layout("`merges` is not an array".into())),
    };
    let mut out = Vec::with_capacity(entries.len());
    for (rank, entry) in entries.into_iter().enumerate() {
        let (left, right) = match &entry {
            Value::String(s) => match s.split_once(' ') {
                Some((l, r)) if !r.contains(' ') => (l.to_string(), r.to_string()),
                _ => {
                    return Err(LoadError::Layout(format!(
                        "merge #{rank} `{s}` is not of the form `left right`"
                    )))
                }
            },
            Value::Array(pair) => match pair.as_slice() {
                [Value::String(l), Value::String(r)] => (l.clone(), r.clone()),
                _ => {
                    return Err(LoadError::Layout(format!(
                        "merge #{rank} is not a pair of strings"
                    )))
                }
            },
            other => {
                return Err(LoadError::Layout(format!(
                    "merge #{rank} has unexpected form {other}"
                )))
            }
        };
        let pair = format!("{left} {right}");
        let lookup = |token: &str| {
            by_rendered
                .get(token)
                .copied()
                .ok_or_else(|| LoadError::UnknownMergeToken {
                    pair: pair.clone(),
                    token: token.to_string(),
                })
        };
        let l = lookup(&left)?;
        let r = lookup(&right)?;
        let joined = [tokens[l.index()].as_slice(), tokens[r.index()].as_slice()].concat();
        if !tokens_contains(by_rendered, &joined) {
            return Err(LoadError::MissingMergeResult { pair });
        }
        out.push((l, r));
    }
    Ok(out)
}

fn tokens_contains(by_rendered: &RenderedIndex, bytes: &[u8]) -> bool {
    by_rendered.contains_key(&byte_unicode_map().render(bytes))
}

fn rendered_of(by_rendered: &RenderedIndex, id: TokenId) -> String {
    by_rendered
        .iter()
        .find(|(_, &v)| v == id)
        .map(|(k, _)| k.clone())
        .unwrap_or_else(|| id.to_string())
}
