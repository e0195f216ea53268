use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vocab-graft"))
        .env("RUST_LOG", "off")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        cli(&["density", "--model", "nolabel"]).status.code(),
        Some(1)
    );
    assert_eq!(cli(&["transplant", "-k", "many"]).status.code(), Some(1));
    let missing = cli(&["inspect", "/nonexistent/model.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error:"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"vocab\": ").unwrap();
    assert_eq!(cli(&["inspect", path(&bad)]).status.code(), Some(2));
}

#[test]
fn thread_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_vocab-graft"))
        .env("VOCAB_GRAFT_THREADS", "zero")
        .args(["inspect", path(&fixture("base.json"))])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn encode_prints_ids_pieces_and_count() {
    let base = fixture("base.json");
    let out = cli(&["encode", "--model", path(&base), "the city"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("ids: "));
    assert_eq!(lines[1], "pieces: the Ġcity");
    assert_eq!(lines[2], "count: 2");

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(&input, "the city").unwrap();
    let from_file = cli(&["encode", "--model", path(&base), "--file", path(&input)]);
    assert_eq!(stdout(&from_file), text);

    // Splitting letters from digits keeps the merged "x86" from forming.
    let whole = cli(&["encode", "--model", path(&base), "x86"]);
    assert!(stdout(&whole).ends_with("count: 1\n"), "{}", stdout(&whole));
    let split = cli(&[
        "--scheme",
        "category-split",
        "encode",
        "--model",
        path(&base),
        "x86",
    ]);
    assert!(stdout(&split).ends_with("count: 3\n"), "{}", stdout(&split));
}

#[test]
fn identity_transplant_reproduces_base() {
    let dir = tempfile::tempdir().unwrap();
    let out_model = dir.path().join("model.json");
    let report = dir.path().join("report.json");
    let out = cli(&[
        "transplant",
        "--base",
        path(&fixture("base.json")),
        "--candidates",
        path(&fixture("candidates.json")),
        "--corpus",
        path(&fixture("train.txt")),
        "-k",
        "0",
        "-o",
        path(&out_model),
        "--report",
        path(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read(&out_model).unwrap(),
        fs::read(fixture("base.json")).unwrap()
    );
    let report: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(report["removed"].as_array().unwrap().len(), 0);
    assert_eq!(report["added"].as_array().unwrap().len(), 0);
    assert!(report["passes"].as_array().unwrap().len() <= 4);
}

#[test]
fn transplant_capacity_error_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "transplant",
        "--base",
        path(&fixture("base.json")),
        "--candidates",
        path(&fixture("candidates.json")),
        "--corpus",
        path(&fixture("train.txt")),
        "-k",
        "100000",
        "-o",
        path(&dir.path().join("m.json")),
        "--report",
        path(&dir.path().join("r.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn added_tokens_survive_and_stay_protected() {
    let dir = tempfile::tempdir().unwrap();
    let mut base: Value = serde_json::from_slice(&fs::read(fixture("base.json")).unwrap()).unwrap();
    // "a0e" is one of the unused tokens the plain transplant removes first.
    base["added_tokens"] = serde_json::json!([{ "id": 0, "content": "a0e", "special": true }]);
    let base_path = dir.path().join("base.json");
    fs::write(&base_path, serde_json::to_vec(&base).unwrap()).unwrap();
    let out_model = dir.path().join("model.json");
    let report = dir.path().join("report.json");
    let out = cli(&[
        "transplant",
        "--base",
        path(&base_path),
        "--candidates",
        path(&fixture("candidates.json")),
        "--corpus",
        path(&fixture("train.txt")),
        "-k",
        "10",
        "-o",
        path(&out_model),
        "--report",
        path(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let model: Value = serde_json::from_slice(&fs::read(&out_model).unwrap()).unwrap();
    assert_eq!(model["added_tokens"], base["added_tokens"]);
    assert!(model["model"]["vocab"].get("a0e").is_some());
    let report: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    let removed: Vec<&str> = report["removed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(removed.len(), 10);
    assert!(!removed.contains(&"a0e"));
}

#[test]
fn density_table_and_json() {
    let args = [
        "density",
        "--model",
        &format!("base={}", path(&fixture("base.json"))),
        "--model",
        &format!("new={}", path(&fixture("surgered.json"))),
        "--corpus",
        &format!("ru={}", path(&fixture("cyrillic.txt"))),
    ];
    let table = cli(&args);
    assert!(table.status.success());
    let text = stdout(&table);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("Corpus"));
    assert!(lines[0].contains("tok/word") && lines[0].contains("≤2 tok (%)"));
    assert!(lines[1].starts_with("ru") && lines[1].contains("base"));
    assert!(lines[2].starts_with("ru") && lines[2].contains("new"));
    assert!(lines
        .iter()
        .any(|l| l.starts_with("Avg tok/word") && l.contains("new")));

    let mut json_args = args.to_vec();
    json_args.push("--json");
    let json = cli(&json_args);
    assert!(json.status.success());
    let cells: Value = serde_json::from_slice(&json.stdout).unwrap();
    let cells = cells.as_array().unwrap();
    assert_eq!(cells.len(), 2);
    for cell in cells {
        for key in [
            "model",
            "corpus",
            "words",
            "tokens",
            "tok_per_word",
            "pct_1",
            "pct_le2",
            "pct_gt2",
        ] {
            assert!(cell.get(key).is_some(), "missing {key}");
        }
    }
    assert!(cells[1]["tok_per_word"].as_f64() < cells[0]["tok_per_word"].as_f64());
}

#[test]
fn density_reports_failed_cells() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, " ... ").unwrap();
    let out = cli(&[
        "density",
        "--model",
        &format!("base={}", path(&fixture("base.json"))),
        "--corpus",
        &format!("ok={}", path(&fixture("cyrillic.txt"))),
        "--corpus",
        &format!("empty={}", path(&empty)),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("ok"));
}

#[test]
fn density_reads_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    fs::write(&corpus, "{\"text\": \"the city\"}\n{\"text\": \"war\"}\n").unwrap();
    let out = cli(&[
        "density",
        "--model",
        &format!("base={}", path(&fixture("base.json"))),
        "--corpus",
        &format!("c={}", path(&corpus)),
        "--jsonl-field",
        "text",
        "--json",
    ]);
    assert!(out.status.success());
    let cells: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cells[0]["words"], 3);
}

#[test]
fn extract_inspect_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    let out = cli(&[
        "extract",
        "--donor",
        &format!("new={}", path(&fixture("surgered.json"))),
        "--donor",
        &format!("base={}", path(&fixture("base.json"))),
        "--min-cyrillic",
        "2",
        "-o",
        path(&set),
    ]);
    assert!(out.status.success());
    let set: Value = serde_json::from_slice(&fs::read(&set).unwrap()).unwrap();
    let entries = set["candidates"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries
        .iter()
        .all(|e| e["donors"] == serde_json::json!(["new"])));

    let inspect = stdout(&cli(&["inspect", path(&fixture("base.json"))]));
    assert!(inspect.contains("vocab: 1023"));
    assert!(inspect.contains("scheme: whitespace-prefix"));
    assert!(inspect.contains("pure-latin:"));

    let diff = stdout(&cli(&[
        "diff",
        path(&fixture("base.json")),
        path(&fixture("surgered.json")),
    ]));
    let report: Value =
        serde_json::from_slice(&fs::read(fixture("surgery_report.json")).unwrap()).unwrap();
    let removed = report["removed"].as_array().unwrap().len();
    assert!(diff.contains(&format!("tokens only in A: {removed}")));
    assert!(diff.contains(&format!("tokens only in B: {removed}")));
}
