use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn revkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revkit")).args(args).env_remove("REVKIT_LOG").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = revkit(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const PARAS: [&[&str]; 2] = [
    &[
        "We study how authors revise their scientific papers .",
        "Revisions are collected from public preprint servers .",
    ],
    &[
        "Each sentence pair is labeled by two trained annotators .",
        "Disagreements are resolved by a third expert annotator .",
    ],
];

fn version(v: u32, ts: i64, paras: &[&[&str]]) -> Value {
    json!({
        "version": v,
        "timestamp": ts,
        "paragraphs": paras.iter().map(|s| json!({ "sentences": s })).collect::<Vec<_>>(),
    })
}

fn write_corpus(dir: &Path, versions: Vec<Value>) -> PathBuf {
    let path = dir.join("corpus.json");
    let corpus = json!([{ "arxiv_id": "2101.00001", "subject": "cs.CL", "versions": versions }]);
    std::fs::write(&path, serde_json::to_string_pretty(&corpus).unwrap()).unwrap();
    path
}

fn identical_corpus(dir: &Path) -> PathBuf {
    write_corpus(dir, vec![version(1, 1_600_000_000, &PARAS), version(2, 1_600_086_400, &PARAS)])
}

fn revised_corpus(dir: &Path) -> PathBuf {
    let revised: [&[&str]; 2] = [
        &[
            "We study how authors revise their scientific papers .",
            "Revisions are gathered from public preprint servers .",
        ],
        &[
            "Each sentence pair is labeled by two trained annotators .",
            "Disagreements are resolved by a third expert annotator .",
        ],
    ];
    write_corpus(dir, vec![version(1, 1_600_000_000, &PARAS), version(2, 1_600_864_000, &revised)])
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn identical_versions_align_on_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = identical_corpus(dir.path());
    let out = dir.path().join("aligned");
    ok(&["align", "--corpus", p(&corpus), "--out", p(&out)]);
    let file = read_json(&out.join("2101.00001__v1-v2.json"));
    assert_eq!(file["arxiv_id"], "2101.00001");
    let pairs = file["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 4);
    for pair in pairs {
        assert_eq!(pair["src"], pair["tgt"]);
        assert_eq!(pair["label"], "aligned");
    }
}

#[test]
fn missing_input_exits_with_two_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = revkit(&["align", "--corpus", p(&missing), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(p(&missing)));

    let out = revkit(&["align", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = revised_corpus(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["align", "--corpus", p(&corpus), "--out", p(&a), "--jobs", "1"]);
    ok(&["align", "--corpus", p(&corpus), "--out", p(&b), "--jobs", "4"]);
    let name = "2101.00001__v1-v2.json";
    assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
}

#[test]
fn invalid_corpus_leaves_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.json");
    std::fs::write(&corpus, r#"[{"arxiv_id": "x", "subject": "cs", "versions": [{"version": 1}]}]"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = revkit(&["align", "--corpus", p(&corpus), "--out", p(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("versions[0]"), "{stderr}");
    assert!(!out_dir.exists() || std::fs::read_dir(&out_dir).unwrap().next().is_none());
}

fn write_revisions(dir: &Path, pairs: &[(&str, &str)]) -> PathBuf {
    let path = dir.join("revisions.jsonl");
    let lines: Vec<String> = pairs
        .iter()
        .enumerate()
        .map(|(k, (s, t))| json!({ "id": format!("r{k}"), "src": s, "tgt": t, "edits": [] }).to_string())
        .collect();
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    path
}

fn jsonl(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn diff_baseline_turns_not_into_note() {
    let dir = tempfile::tempdir().unwrap();
    let revs = write_revisions(
        dir.path(),
        &[("Not all results hold for larger models .", "Note all results hold for larger models ."), ("Same text .", "Same text .")],
    );
    let out = jsonl(&ok(&["extract-edits", "--revisions", p(&revs), "--method", "diff-baseline"]));
    assert_eq!(out[0]["edits"], json!([{ "src": [0, 1], "tgt": [0, 1], "kind": "substitute", "intention": null }]));
    assert_eq!(out[1]["edits"], json!([]));
}

#[test]
fn extraction_from_alignments_skips_identical_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = revised_corpus(dir.path());
    let aligned = dir.path().join("aligned");
    ok(&["align", "--corpus", p(&corpus), "--out", p(&aligned)]);
    let base = ["extract-edits", "--corpus", p(&corpus), "--alignments", p(&aligned), "--rule-intentions"];
    let out = jsonl(&ok(&[&base[..], &["--method", "diff-baseline"]].concat()));
    assert_eq!(out.len(), 1);
    assert_eq!(out[0]["id"], "2101.00001:v1-v2:0.1-0.1");
    let edits = out[0]["edits"].as_array().unwrap();
    assert_eq!(edits.len(), 1);
    assert_eq!(edits[0]["kind"], "substitute");
    assert_eq!(edits[0]["intention"], "Lang-Other");

    // without word alignments the links come from a diff and leave changed words unaligned
    let out = jsonl(&ok(&base));
    let kinds: Vec<&Value> = out[0]["edits"].as_array().unwrap().iter().map(|e| &e["kind"]).collect();
    assert_eq!(kinds, [&json!("insert"), &json!("delete")]);
}

#[test]
fn parse_at_level_zero_matches_simple() {
    let dir = tempfile::tempdir().unwrap();
    let revs = write_revisions(
        dir.path(),
        &[("the dog quickly ran home", "the dog sprinted fast home"), ("a b c", "a c b")],
    );
    let wa = dir.path().join("wa.txt");
    std::fs::write(&wa, "0-0 1-1 2-3 3-2 4-4\n0-0 1-2 2-1\n").unwrap();
    let src_trees = dir.path().join("src.trees");
    let tgt_trees = dir.path().join("tgt.trees");
    std::fs::write(&src_trees, "(S (NP the dog) (VP (ADVP quickly) (VBD ran) (NP home)))\n(S a (X b c))\n").unwrap();
    std::fs::write(&tgt_trees, "(S (NP the dog) (VP (VBD sprinted) (ADVP fast) (NP home)))\n(S a (X c b))\n").unwrap();
    let (simple, parse0, parse2) = (dir.path().join("s.jsonl"), dir.path().join("p0.jsonl"), dir.path().join("p2.jsonl"));
    let common = ["extract-edits", "--revisions", p(&revs), "--word-alignments", p(&wa)];
    let trees = ["--src-trees", p(&src_trees), "--tgt-trees", p(&tgt_trees)];
    ok(&[&common[..], &["--method", "simple", "--out", p(&simple)]].concat());
    ok(&[&common[..], &trees[..], &["--method", "parse", "--max-level", "0", "--out", p(&parse0)]].concat());
    ok(&[&common[..], &trees[..], &["--method", "parse", "--max-level", "2", "--out", p(&parse2)]].concat());
    assert_eq!(std::fs::read(&simple).unwrap(), std::fs::read(&parse0).unwrap());
    let p2 = jsonl(&std::fs::read_to_string(&parse2).unwrap());
    assert_eq!(p2[0]["edits"], json!([{ "src": [2, 4], "tgt": [2, 4], "kind": "substitute", "intention": null }]));
    let s = jsonl(&std::fs::read_to_string(&simple).unwrap());
    assert!(s[1]["edits"].as_array().unwrap().iter().any(|e| e["kind"] == "reorder"), "{}", s[1]);
}

#[test]
fn count_mismatch_names_lines() {
    let dir = tempfile::tempdir().unwrap();
    let revs = write_revisions(dir.path(), &[("a b", "a c"), ("d e", "d f"), ("g h", "g i")]);
    let wa = dir.path().join("wa.txt");
    std::fs::write(&wa, "0-0\n0-0\n").unwrap();
    let out = revkit(&["extract-edits", "--revisions", p(&revs), "--word-alignments", p(&wa)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("lines 3..3"), "{stderr}");

    std::fs::write(&wa, "0-0\n0-5\n0-0\n").unwrap();
    let out = revkit(&["extract-edits", "--revisions", p(&revs), "--word-alignments", p(&wa)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn predictions_attach_and_errors_list_keys() {
    let dir = tempfile::tempdir().unwrap();
    let revs = write_revisions(dir.path(), &[("Not all results hold .", "Note all results hold .")]);
    let preds = dir.path().join("preds.jsonl");
    std::fs::write(&preds, r#"{"revision_id": "r0", "edit_index": 0, "label": "grammar_typo"}"#).unwrap();
    let args = ["extract-edits", "--revisions", p(&revs), "--method", "diff-baseline", "--predictions", p(&preds)];
    let out = jsonl(&ok(&args));
    assert_eq!(out[0]["edits"][0]["intention"], "Grammar-Typo");

    std::fs::write(&preds, r#"{"revision_id": "r9", "edit_index": 0, "label": "Grammar-Typo"}"#).unwrap();
    let out = revkit(&args);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("r9#0") && stderr.contains("r0#0"), "{stderr}");
}

#[test]
fn stats_on_an_identical_pair() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = identical_corpus(dir.path());
    let aligned = dir.path().join("aligned");
    let report = dir.path().join("report");
    ok(&["align", "--corpus", p(&corpus), "--out", p(&aligned)]);
    let table = ok(&["stats", "--corpus", p(&corpus), "--alignments", p(&aligned), "--out", p(&report)]);
    assert!(table.contains("copying"), "{table}");
    let csv = std::fs::read_to_string(report.join("update_ratio.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[..4], ["2101.00001", "1", "2", "0.000000"]);
    assert_eq!(row[4], "1.000");
    let ops = read_json(&report.join("ops.json"));
    assert_eq!(ops["total"]["counts"]["copying"], 4);
    for name in ["positions_inserted.csv", "positions_deleted.csv", "positions_revised.csv", "composition.csv"] {
        assert!(report.join(name).exists(), "{name}");
    }
    assert_eq!(read_json(&report.join("summary.json"))["pearson_ratio_days"], Value::Null);
}

#[test]
fn eval_alignment_against_itself_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = revised_corpus(dir.path());
    let aligned = dir.path().join("aligned");
    ok(&["align", "--corpus", p(&corpus), "--out", p(&aligned)]);
    let report: Value = serde_json::from_str(&ok(&[
        "eval", "--task", "alignment", "--corpus", p(&corpus), "--pred", p(&aligned), "--gold", p(&aligned),
    ]))
    .unwrap();
    assert_eq!(report["f1"], 1.0);

    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let report: Value = serde_json::from_str(&ok(&[
        "eval", "--task", "alignment", "--corpus", p(&corpus), "--pred", p(&empty), "--gold", p(&aligned),
    ]))
    .unwrap();
    assert_eq!(report["recall"], 0.0);
    assert_eq!(report["missing_predictions"], 1);
}

#[test]
fn eval_edits_and_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let revs = write_revisions(dir.path(), &[("Not all results hold .", "Note all results hold .")]);
    let pred = dir.path().join("pred.jsonl");
    ok(&["extract-edits", "--revisions", p(&revs), "--method", "diff-baseline", "--out", p(&pred)]);
    let report: Value =
        serde_json::from_str(&ok(&["eval", "--task", "edits", "--pred", p(&pred), "--gold", p(&pred)])).unwrap();
    assert_eq!(report["all"]["prf"]["f1"], 1.0);
    assert_eq!(report["all"]["exact_match"], 1.0);

    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, r#"{"id": "r0", "src": "a", "tgt": "b", "edits": [{"src": [0, 1], "kind": "swap"}]}"#).unwrap();
    let out = revkit(&["eval", "--task", "edits", "--pred", p(&bad), "--gold", p(&pred)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edits[0]"));
}

#[test]
fn config_file_values_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = revised_corpus(dir.path());
    let cfg = dir.path().join("run.toml");
    // an unreachable threshold aligns nothing
    std::fs::write(&cfg, format!("corpus = {:?}\nthreshold = 1.0\nmetric = \"jaccard\"\n", p(&corpus))).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["align", "--config", p(&cfg), "--out", p(&a)]);
    let strict = read_json(&a.join("2101.00001__v1-v2.json"));
    let strict_pairs = strict["pairs"].as_array().unwrap().len();
    ok(&["align", "--config", p(&cfg), "--out", p(&b), "--threshold", "0.3"]);
    let loose = read_json(&b.join("2101.00001__v1-v2.json"));
    assert!(loose["pairs"].as_array().unwrap().len() > strict_pairs);

    std::fs::write(&cfg, "tau5 = 0.1\n").unwrap();
    let out = revkit(&["align", "--config", p(&cfg), "--corpus", p(&corpus), "--out", p(&a)]);
    assert_eq!(out.status.code(), Some(2));
}
