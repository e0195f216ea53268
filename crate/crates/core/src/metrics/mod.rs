//! Token frequencies and tokenization density.

mod density;
mod freq;
mod words;

pub use density::{
    compare_density, density_report, density_report_stream, CorpusSource, DensityMatrix,
    DensityReport, DensityTally, MemoryCorpus, MetricsError, WordCounter,
};
pub use freq::{token_frequency, token_frequency_text, FreqTable};
pub use words::split_words;
