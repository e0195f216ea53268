//! File formats: models, corpora, candidate sets and reports.

mod bytemap;
mod chunks;
mod corpus;
mod model_file;
mod reports;

pub use bytemap::{byte_unicode_map, ByteUnicodeMap};
pub use chunks::{text_chunks, TextChunks};
pub use corpus::{
    stream_jsonl_words, stream_words, CorpusFormat, FileCorpus, StreamStats, WordStream,
};
pub use model_file::{
    load_model, load_model_file, model_to_vec, save_model, save_model_file, LoadError, Metadata,
    ModelFile,
};
pub use reports::{
    density_json, density_matrix_json, density_table, load_candidates, save_candidates,
    save_surgery_report, surgery_report,
};
