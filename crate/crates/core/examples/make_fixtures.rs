//! Writes the synthetic fixture set used by the acceptance suite.
//!
//! Usage: cargo run -p vocab-graft --example make_fixtures -- OUT_DIR
//!
//! Output is a pure function of the fixed seed below.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vocab_graft::io::{save_candidates, save_model};
use vocab_graft::surgery::{refine_reachability, CandidateSet};
use vocab_graft::{ModelBuilder, Scheme};

const SEED: u64 = 0x5eed_2024;

const ENGLISH: &[&str] = &[
    "the",
    "of",
    "and",
    "to",
    "in",
    "is",
    "was",
    "for",
    "that",
    "with",
    "as",
    "by",
    "on",
    "are",
    "from",
    "his",
    "at",
    "which",
    "also",
    "an",
    "be",
    "or",
    "has",
    "first",
    "were",
    "had",
    "one",
    "after",
    "their",
    "its",
    "new",
    "who",
    "they",
    "two",
    "been",
    "this",
    "her",
    "other",
    "not",
    "year",
    "time",
    "city",
    "during",
    "most",
    "into",
    "people",
    "world",
    "state",
    "years",
    "later",
    "known",
    "used",
    "many",
    "school",
    "war",
    "team",
    "series",
    "some",
    "three",
    "between",
    "since",
    "would",
    "where",
    "made",
    "season",
    "such",
    "there",
    "under",
    "film",
    "number",
    "before",
    "while",
    "well",
    "family",
    "born",
    "national",
    "part",
    "over",
    "album",
    "district",
    "name",
    "university",
    "several",
    "south",
    "north",
    "river",
    "music",
    "second",
    "company",
    "following",
    "county",
    "being",
    "area",
    "early",
    "both",
    "until",
    "these",
    "government",
    "only",
    "through",
    "against",
    "population",
    "century",
    "history",
    "high",
    "each",
    "when",
    "however",
    "played",
    "released",
    "based",
    "public",
    "house",
    "large",
    "language",
    "village",
    "around",
    "march",
    "group",
    "game",
    "member",
    "club",
    "life",
    "work",
    "station",
    "west",
    "east",
    "including",
    "local",
    "album",
    "song",
    "church",
    "army",
    "line",
];

const MIXED: &[&str] = &[
    "2019", "2020", "2021", "1990", "1984", "100", "250", "x86", "mp3", "k8s", "h264", "3d", "b2b",
    "4k", "utf8", "ipv6", "covid19", "win32", "a1", "v2", "x64", "i18n", "s3", "ec2", "md5",
    "sha256", "http2", "py3", "gpt2", "top10", "no1", "mk2", "f16", "t800", "r2d2",
];

const CONSONANTS: &[char] = &[
    'б', 'в', 'г', 'д', 'ж', 'з', 'к', 'л', 'м', 'н', 'п', 'р', 'с', 'т', 'ф', 'х', 'ц', 'ч', 'ш',
];
const VOWELS: &[char] = &['а', 'е', 'и', 'о', 'у', 'ы', 'я'];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures".to_string());
    let out = Path::new(&out);
    fs::create_dir_all(out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    // Base model: byte alphabet, Cyrillic letters, English words (bare and
    // space-prefixed), digit/mixed tokens, then unreachable leftovers.
    let mut b = ModelBuilder::new(Scheme::WhitespacePrefix);
    for c in ('а'..='я').chain(['ё']) {
        b.chain(&c.to_string());
    }
    for (i, w) in ENGLISH.iter().enumerate() {
        if i < 60 {
            b.chain(&format!(" {w}"));
        }
        if i < 25 {
            b.chain(w);
        }
    }
    for w in MIXED {
        b.chain(w);
    }
    let mut junk = BTreeSet::new();
    while junk.len() < 440 {
        let len = rng.gen_range(3..6);
        let s: String = (0..len)
            .map(|i| {
                if i == 1 {
                    char::from(b'0' + rng.gen_range(0..10))
                } else {
                    char::from(b'a' + rng.gen_range(0..26))
                }
            })
            .collect();
        junk.insert(s);
    }
    for s in &junk {
        b.token(s.as_bytes());
    }
    let base = b.build()?;

    // Candidates: syllables (pass 1), two-syllable stems (pass 2), longer
    // words built on those stems (pass 3), a few space-prefixed words, and
    // long strings with no intermediate pieces, which stay unplaced.
    let mut syllables = BTreeSet::new();
    while syllables.len() < 70 {
        let c = *CONSONANTS.choose(&mut rng).unwrap();
        let v = *VOWELS.choose(&mut rng).unwrap();
        syllables.insert(format!("{c}{v}"));
    }
    let syllables: Vec<String> = syllables.into_iter().collect();
    let mut stems = BTreeSet::new();
    while stems.len() < 180 {
        let a = syllables.choose(&mut rng).unwrap();
        let z = syllables.choose(&mut rng).unwrap();
        stems.insert(format!("{a}{z}"));
    }
    let stems: Vec<String> = stems.into_iter().collect();
    let mut words = BTreeSet::new();
    while words.len() < 200 {
        let a = stems.choose(&mut rng).unwrap();
        let tail = if rng.gen_bool(0.5) {
            stems.choose(&mut rng).unwrap()
        } else {
            syllables.choose(&mut rng).unwrap()
        };
        words.insert(format!("{a}{tail}"));
    }
    let words: Vec<String> = words.into_iter().collect();
    let cyr: Vec<char> = ('а'..='я').collect();
    let long: Vec<String> = (0..15)
        .map(|_| (0..14).map(|_| *cyr.choose(&mut rng).unwrap()).collect())
        .collect();

    let mut candidates = CandidateSet::new();
    for (i, s) in syllables.iter().chain(&stems).chain(&words).enumerate() {
        let donor = if i % 3 == 0 { "donor-b" } else { "donor-a" };
        candidates.insert(s.as_bytes(), donor)?;
        if i % 5 == 0 {
            candidates.insert(s.as_bytes(), "donor-c")?;
        }
    }
    for s in stems.iter().take(30) {
        candidates.insert(format!(" {s}").as_bytes(), "donor-c")?;
    }
    for s in &long {
        candidates.insert(s.as_bytes(), "donor-a")?;
    }

    let refinement = refine_reachability(&base, &candidates, 4)?;
    eprintln!(
        "base: {} tokens, {} merges; candidates: {}; reachable after {} passes: {:.4}",
        base.len(),
        base.merges().len(),
        candidates.len(),
        refinement.stats.passes.len(),
        refinement.stats.reachable_fraction()
    );

    save_model(&base, BufWriter::new(File::create(out.join("base.json"))?))?;
    save_candidates(
        &candidates,
        BufWriter::new(File::create(out.join("candidates.json"))?),
    )?;

    // Training corpus for frequency counts: English text with mixed tokens.
    let mut train = BufWriter::new(File::create(out.join("train.txt"))?);
    for _ in 0..2000 {
        let n = rng.gen_range(5..15);
        let line: Vec<&str> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.08) {
                    *MIXED.choose(&mut rng).unwrap()
                } else {
                    *ENGLISH.choose(&mut rng).unwrap()
                }
            })
            .collect();
        writeln!(train, "{}.", line.join(" "))?;
    }
    train.flush()?;

    // Synthetic Cyrillic text drawn from the candidate vocabulary.
    let cyr_word = |rng: &mut ChaCha8Rng| -> String {
        match rng.gen_range(0..10) {
            0..=4 => words.choose(rng).unwrap().clone(),
            5..=7 => stems.choose(rng).unwrap().clone(),
            _ => syllables.choose(rng).unwrap().clone(),
        }
    };
    let mut cyrillic = BufWriter::new(File::create(out.join("cyrillic.txt"))?);
    for _ in 0..400 {
        let n = rng.gen_range(4..12);
        let line: Vec<String> = (0..n).map(|_| cyr_word(&mut rng)).collect();
        writeln!(cyrillic, "{}.", line.join(" "))?;
    }
    cyrillic.flush()?;

    // Mini bilingual corpus with punctuation, digits and capitalised words.
    let mut bilingual = BufWriter::new(File::create(out.join("bilingual.txt"))?);
    for i in 0..300 {
        let n = rng.gen_range(4..12);
        let mut line: Vec<String> = (0..n)
            .map(|_| match (i % 2, rng.gen_range(0..10)) {
                (_, 0) => MIXED.choose(&mut rng).unwrap().to_string(),
                (0, _) => ENGLISH.choose(&mut rng).unwrap().to_string(),
                (_, _) => cyr_word(&mut rng),
            })
            .collect();
        if let Some(first) = line.first_mut() {
            let mut chars = first.chars();
            let head: String = chars
                .next()
                .into_iter()
                .flat_map(char::to_uppercase)
                .collect();
            *first = head + chars.as_str();
        }
        if rng.gen_bool(0.3) {
            let j = rng.gen_range(0..line.len());
            line[j] = format!("«{}»", line[j]);
        }
        if rng.gen_bool(0.3) {
            let j = rng.gen_range(0..line.len());
            line[j].push(',');
        }
        let end = ['.', '!', '?'][rng.gen_range(0..3)];
        writeln!(bilingual, "{} {end}", line.join(" "))?;
    }
    bilingual.flush()?;
    Ok(())
}
