//! Command-line front end for `vocab-graft`.
//!
//! [`run`] is the whole program; `main` only forwards the process arguments
//! and exit code. Exit codes: 0 on success, 1 on usage errors, 2 when input
//! data is missing, malformed or fails an integrity check.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vocab_graft::surgery::SwapCount;
use vocab_graft::Scheme;

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "VOCAB_GRAFT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "vocab-graft",
    version,
    about = "Byte-level BPE vocabulary surgery and density metrics"
)]
pub struct Cli {
    /// Pretokenizer to use for every loaded model instead of the one recorded
    /// in the file.
    #[arg(long, global = true, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vocabulary and merge statistics with protection class counts.
    Inspect { model: PathBuf },
    /// Collect Cyrillic-bearing tokens from donor models into a candidate set.
    Extract {
        /// Donor model as LABEL=PATH; repeatable.
        #[arg(long = "donor", value_parser = parse_labeled, required = true)]
        donors: Vec<(String, PathBuf)>,
        /// Minimum number of Cyrillic code points per candidate.
        #[arg(long, default_value_t = 1)]
        min_cyrillic: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Swap low-frequency tokens of a base model for reachable candidates.
    Transplant(TransplantArgs),
    /// Tokens-per-word statistics for every model on every corpus.
    Density(DensityArgs),
    /// Encode text and print ids, rendered pieces and the token count.
    Encode {
        #[arg(long)]
        model: PathBuf,
        /// Read the text from a file instead of the command line.
        #[arg(long, conflicts_with = "text")]
        file: Option<PathBuf>,
        #[arg(required_unless_present = "file")]
        text: Option<String>,
    },
    /// Tokens and merges present in one model but not the other.
    Diff { model_a: PathBuf, model_b: PathBuf },
}

#[derive(Debug, Args)]
pub struct TransplantArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub candidates: PathBuf,
    /// Plain-text corpus for frequency counts; repeatable.
    #[arg(long = "corpus", required = true)]
    pub corpora: Vec<PathBuf>,
    /// Number of tokens to swap, or `auto` for every placeable candidate.
    #[arg(short = 'k', long = "count", default_value = "auto", value_parser = parse_count)]
    pub count: SwapCount,
    /// Maximum refinement passes.
    #[arg(long, default_value_t = 4)]
    pub passes: usize,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Model as LABEL=PATH; repeatable.
    #[arg(long = "model", value_parser = parse_labeled, required = true)]
    pub models: Vec<(String, PathBuf)>,
    /// Corpus as LABEL=PATH; repeatable.
    #[arg(long = "corpus", value_parser = parse_labeled, required = true)]
    pub corpora: Vec<(String, PathBuf)>,
    /// Treat corpora as JSON lines and read words from this string field.
    #[arg(long)]
    pub jsonl_field: Option<String>,
    /// Print a JSON array of per-cell reports.
    #[arg(long, conflicts_with = "table")]
    pub json: bool,
    /// Print an aligned table (the default).
    #[arg(long)]
    pub table: bool,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: vocab_graft::BpeError| e.to_string())
}

fn parse_labeled(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => {
            Ok((label.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected LABEL=PATH, got `{s}`")),
    }
}

fn parse_count(s: &str) -> Result<SwapCount, String> {
    if s == "auto" {
        return Ok(SwapCount::Auto);
    }
    s.parse()
        .map(SwapCount::Exactly)
        .map_err(|_| format!("expected a non-negative integer or `auto`, got `{s}`"))
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n = raw
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
    // The global pool can only be built once per process; later calls keep
    // the first configuration.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .try_init();

    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match commands::dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}
