use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use log::info;
use rayon::prelude::*;
use vocab_graft::io::{
    byte_unicode_map, density_matrix_json, density_table, load_candidates, load_model_file,
    save_candidates, save_model_file, save_surgery_report, text_chunks, CorpusFormat, FileCorpus,
    ModelFile,
};
use vocab_graft::metrics::{compare_density, CorpusSource, FreqTable};
use vocab_graft::surgery::{classify_protected, extract_candidates, transplant, TransplantOptions};
use vocab_graft::{BpeModel, Scheme};

use crate::{Cli, Command, DensityArgs, TransplantArgs};

pub(crate) fn dispatch(cli: &Cli) -> Result<()> {
    let scheme = cli.scheme;
    match &cli.command {
        Command::Inspect { model } => inspect(&load(model, scheme)?.model),
        Command::Extract {
            donors,
            min_cyrillic,
            output,
        } => {
            let models = donors
                .iter()
                .map(|(label, path)| Ok((label.as_str(), load(path, scheme)?.model)))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<(&str, &BpeModel)> = models.iter().map(|(l, m)| (*l, m)).collect();
            let set = extract_candidates(&refs, *min_cyrillic)?;
            info!(
                "extracted {} candidates from {} donors",
                set.len(),
                refs.len()
            );
            write_file(output, |w| save_candidates(&set, w))
        }
        Command::Transplant(args) => run_transplant(args, scheme),
        Command::Density(args) => density(args, scheme),
        Command::Encode { model, file, text } => {
            let model = load(model, scheme)?.model;
            let text = match (file, text) {
                (Some(path), _) => {
                    std::fs::read(path).with_context(|| format!("reading {}", path.display()))?
                }
                (None, Some(text)) => text.clone().into_bytes(),
                (None, None) => unreachable!("clap requires TEXT or --file"),
            };
            encode(&model, &text)
        }
        Command::Diff { model_a, model_b } => {
            diff(&load(model_a, scheme)?.model, &load(model_b, scheme)?.model)
        }
    }
}

fn load(path: &Path, scheme: Option<Scheme>) -> Result<ModelFile> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut loaded = load_model_file(BufReader::new(file))
        .with_context(|| format!("loading model {}", path.display()))?;
    if let Some(scheme) = scheme {
        loaded.model = loaded.model.with_scheme(scheme);
    }
    Ok(loaded)
}

fn write_file(
    path: &Path,
    save: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    save(&mut w)
        .and_then(|()| w.flush())
        .with_context(|| format!("writing {}", path.display()))
}

fn inspect(model: &BpeModel) -> Result<()> {
    let self_reachable = model
        .ids()
        .par_bridge()
        .filter(|&id| model.is_self_reachable(id).unwrap_or(false))
        .count();
    let orphans = model
        .ids()
        .filter(|&id| model.tokens()[id.index()].len() > 1 && model.forming_merge(id).is_none())
        .count();
    let longest = model.tokens().iter().map(Vec::len).max().unwrap_or(0);
    let protected = classify_protected(model);

    let mut out = std::io::stdout().lock();
    writeln!(out, "vocab: {}", model.len())?;
    writeln!(out, "merges: {}", model.merges().len())?;
    writeln!(out, "scheme: {}", model.scheme())?;
    writeln!(out, "self-reachable: {self_reachable}")?;
    writeln!(out, "without forming merge: {orphans}")?;
    writeln!(out, "longest token (bytes): {longest}")?;
    writeln!(out, "protected: {}", protected.len())?;
    for (class, n) in protected.class_counts() {
        writeln!(out, "  {class}: {n}")?;
    }
    Ok(())
}

/// Token counts over the corpus files, encoded as running text. Chunks are
/// cut on pretoken boundaries, so the totals equal whole-file encoding.
fn corpus_frequencies(model: &BpeModel, paths: &[impl AsRef<Path>]) -> Result<FreqTable> {
    let mut total = FreqTable::new("corpus");
    for path in paths {
        let path = path.as_ref();
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let table = text_chunks(file, model.scheme())
            .par_bridge()
            .map(|chunk| -> std::io::Result<FreqTable> {
                let mut t = FreqTable::new("corpus");
                t.extend(&model.encode(&chunk?));
                Ok(t)
            })
            .try_reduce(
                || FreqTable::new("corpus"),
                |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                },
            )
            .with_context(|| format!("reading {}", path.display()))?;
        info!("{}: {} tokens", path.display(), table.total_tokens());
        total.merge(&table);
    }
    Ok(total)
}

fn run_transplant(args: &TransplantArgs, scheme: Option<Scheme>) -> Result<()> {
    let base = load(&args.base, scheme)?;
    let candidates = {
        let file = File::open(&args.candidates)
            .with_context(|| format!("opening {}", args.candidates.display()))?;
        load_candidates(BufReader::new(file))
            .with_context(|| format!("loading candidates {}", args.candidates.display()))?
    };
    info!("{} candidates", candidates.len());
    let freqs = corpus_frequencies(&base.model, &args.corpora)?;

    let options = TransplantOptions {
        count: args.count,
        max_passes: args.passes,
        extra_protected: base.metadata.added_token_contents(),
    };
    let result = transplant(&base.model, &candidates, &freqs, &options)?;
    for p in &result.stats.passes {
        info!(
            "pass {}: {} reachable, {} merges added",
            p.pass, p.reachable, p.merges_added
        );
    }
    info!(
        "swapped {} tokens; reachable fraction {:.4}",
        result.added.len(),
        result.stats.reachable_fraction()
    );

    write_file(&args.report, |w| save_surgery_report(&result, w))?;
    let output = ModelFile {
        model: result.model,
        metadata: base.metadata,
    };
    write_file(&args.output, |w| save_model_file(&output, w))
}

fn density(args: &DensityArgs, scheme: Option<Scheme>) -> Result<()> {
    let models = args
        .models
        .iter()
        .map(|(label, path)| Ok((label.clone(), load(path, scheme)?.model)))
        .collect::<Result<Vec<_>>>()?;
    let format = match &args.jsonl_field {
        Some(field) => CorpusFormat::Jsonl {
            field: field.clone(),
        },
        None => CorpusFormat::Plain,
    };
    let corpora: Vec<FileCorpus> = args
        .corpora
        .iter()
        .map(|(label, path)| FileCorpus {
            label: label.clone(),
            path: path.clone(),
            format: format.clone(),
        })
        .collect();

    let model_refs: Vec<(String, &BpeModel)> = models.iter().map(|(l, m)| (l.clone(), m)).collect();
    let corpus_refs: Vec<&dyn CorpusSource> =
        corpora.iter().map(|c| c as &dyn CorpusSource).collect();
    let matrix = compare_density(&model_refs, &corpus_refs);

    let mut out = std::io::stdout().lock();
    if args.json {
        serde_json::to_writer_pretty(&mut out, &density_matrix_json(&matrix))?;
        writeln!(out)?;
    } else {
        write!(out, "{}", density_table(&matrix))?;
    }

    let failures: Vec<String> = matrix
        .cells
        .iter()
        .flatten()
        .filter_map(|c| c.as_ref().err().map(ToString::to_string))
        .collect();
    for f in &failures {
        eprintln!("error: {f}");
    }
    if !failures.is_empty() {
        bail!(
            "{} of {} cells failed",
            failures.len(),
            models.len() * corpora.len()
        );
    }
    Ok(())
}

fn encode(model: &BpeModel, text: &[u8]) -> Result<()> {
    let ids = model.encode(text);
    let map = byte_unicode_map();
    let mut out = std::io::stdout().lock();
    let id_list: Vec<String> = ids.iter().map(ToString::to_string).collect();
    let pieces = ids
        .iter()
        .map(|&id| model.token_bytes(id).map(|b| map.render(b)))
        .collect::<Result<Vec<_>, _>>()?;
    writeln!(out, "ids: {}", id_list.join(" "))?;
    writeln!(out, "pieces: {}", pieces.join(" "))?;
    writeln!(out, "count: {}", ids.len())?;
    Ok(())
}

fn diff(a: &BpeModel, b: &BpeModel) -> Result<()> {
    let map = byte_unicode_map();
    let tokens_a: HashSet<&[u8]> = a.tokens().iter().map(Vec::as_slice).collect();
    let tokens_b: HashSet<&[u8]> = b.tokens().iter().map(Vec::as_slice).collect();
    let pairs = |m: &BpeModel| -> Vec<(String, String)> {
        m.merges()
            .iter()
            .map(|r| {
                (
                    map.render(&m.tokens()[r.left.index()]),
                    map.render(&m.tokens()[r.right.index()]),
                )
            })
            .collect()
    };
    let merges_a = pairs(a);
    let merges_b = pairs(b);
    let set_a: HashSet<&(String, String)> = merges_a.iter().collect();
    let set_b: HashSet<&(String, String)> = merges_b.iter().collect();

    let mut out = std::io::stdout().lock();
    let removed: Vec<&Vec<u8>> = a
        .tokens()
        .iter()
        .filter(|t| !tokens_b.contains(t.as_slice()))
        .collect();
    let added: Vec<&Vec<u8>> = b
        .tokens()
        .iter()
        .filter(|t| !tokens_a.contains(t.as_slice()))
        .collect();
    writeln!(out, "tokens only in A: {}", removed.len())?;
    for t in removed {
        writeln!(out, "- {}", map.render(t))?;
    }
    writeln!(out, "tokens only in B: {}", added.len())?;
    for t in added {
        writeln!(out, "+ {}", map.render(t))?;
    }
    let gone: Vec<_> = merges_a.iter().filter(|p| !set_b.contains(p)).collect();
    let new: Vec<_> = merges_b.iter().filter(|p| !set_a.contains(p)).collect();
    writeln!(out, "merges only in A: {}", gone.len())?;
    for (l, r) in gone {
        writeln!(out, "- {l} {r}")?;
    }
    writeln!(out, "merges only in B: {}", new.len())?;
    for (l, r) in new {
        writeln!(out, "+ {l} {r}")?;
    }
    Ok(())
}
