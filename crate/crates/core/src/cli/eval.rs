use std::collections::HashMap;
use std::path::PathBuf;

use serde::Serialize;

use super::align::Corpus;
use super::extract::read_revisions;
use super::output::{emit, load_alignments, read_text, Outputs};
use super::{CliError, CliResult, Task};
use crate::config::RunConfig;
use crate::edits::SentenceRevision;
use crate::intention::{ingest_predictions, LabelScheme};
use crate::metrics::{eval_alignment, eval_classification, eval_edit_corpus, Prf};
use crate::sentence::SentenceAlignment;

fn json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn read_all_revisions(paths: &[PathBuf]) -> CliResult<Vec<SentenceRevision>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_revisions(p)?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct AlignmentEval {
    #[serde(flatten)]
    prf: Prf,
    version_pairs: usize,
    missing_predictions: usize,
}

fn eval_alignments(cfg: &RunConfig, released: bool, pred: &[PathBuf], gold: &[PathBuf]) -> CliResult<String> {
    type Key = (String, u32, u32);
    let corpus = Corpus::load(cfg, released)?;
    let mut preds: HashMap<Key, SentenceAlignment> = HashMap::new();
    for (path, file) in load_alignments(pred)? {
        let (group, _, _) = corpus.resolve(&path, &file)?;
        let a = file.alignment;
        let key = (group.arxiv_id.clone(), a.src_version, a.tgt_version);
        if preds.insert(key, a).is_some() {
            return Err(CliError::input(format!("{}: duplicate prediction for this version pair", path.display())));
        }
    }
    let mut total = Prf::from_counts(0, 0, 0);
    let (mut pairs, mut missing) = (0, 0);
    for (path, file) in load_alignments(gold)? {
        let (group, src, tgt) = corpus.resolve(&path, &file)?;
        let g = &file.alignment;
        let key = (group.arxiv_id.clone(), g.src_version, g.tgt_version);
        let empty = SentenceAlignment::new(g.src_version, g.tgt_version);
        let p = preds.remove(&key).unwrap_or_else(|| {
            log::warn!("no prediction for {} v{}-v{}", key.0, key.1, key.2);
            missing += 1;
            empty
        });
        let prf = eval_alignment(&p, g, src, tgt).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        total = total.merge(&prf);
        pairs += 1;
    }
    for (id, s, t) in preds.keys() {
        log::warn!("prediction for {id} v{s}-v{t} has no gold alignment");
    }
    eprintln!(
        "P {:.4}  R {:.4}  F1 {:.4}  ({pairs} version pairs)",
        total.precision, total.recall, total.f1
    );
    json(&AlignmentEval { prf: total, version_pairs: pairs, missing_predictions: missing })
}

fn eval_edits(pred: &[PathBuf], gold: &[PathBuf]) -> CliResult<String> {
    let mut preds: HashMap<String, SentenceRevision> =
        read_all_revisions(pred)?.into_iter().map(|r| (r.id.clone(), r)).collect();
    let mut scored = Vec::new();
    for g in read_all_revisions(gold)? {
        let alts = g.gold_alternatives.clone().unwrap_or_else(|| vec![g.edits.clone()]);
        let edits = match preds.remove(&g.id) {
            Some(p) => p.edits,
            None => {
                log::warn!("no prediction for revision {}", g.id);
                Vec::new()
            }
        };
        scored.push(SentenceRevision { edits, gold_alternatives: Some(alts), ..g });
    }
    if scored.is_empty() {
        return Err(CliError::input("gold file has no revisions"));
    }
    let report = eval_edit_corpus(&scored)?;
    eprint!("{}", report.to_table());
    json(&report)
}

fn eval_intentions(pred: &[PathBuf], gold: &[PathBuf], scheme: LabelScheme) -> CliResult<String> {
    let golds = read_all_revisions(gold)?;
    let mut labeled = golds.clone();
    for r in &mut labeled {
        r.edits.iter_mut().for_each(|e| e.intention = None);
    }
    let mut text = String::new();
    for p in pred {
        text.push_str(&read_text(p)?);
        text.push('\n');
    }
    ingest_predictions(&text, &mut labeled, scheme)?;

    let (mut p, mut g) = (Vec::new(), Vec::new());
    let mut unlabeled = 0;
    for (gr, pr) in golds.iter().zip(&labeled) {
        for (ge, pe) in gr.edits.iter().zip(&pr.edits) {
            match (ge.intention, pe.intention) {
                (Some(gl), Some(pl)) => {
                    g.push(gl.as_str().to_string());
                    p.push(pl.as_str().to_string());
                }
                _ => unlabeled += 1,
            }
        }
    }
    if unlabeled > 0 {
        log::warn!("{unlabeled} gold edits have no intention and were not scored");
    }
    let report = eval_classification(&p, &g, scheme)?;
    eprint!("{}", report.to_table());
    json(&report)
}

pub(super) fn cmd_eval(
    cfg: &RunConfig,
    task: Task,
    pred: &[PathBuf],
    gold: &[PathBuf],
    released: bool,
    scheme: LabelScheme,
) -> CliResult<()> {
    let text = match task {
        Task::Alignment => eval_alignments(cfg, released, pred, gold)?,
        Task::Edits => eval_edits(pred, gold)?,
        Task::Intention => eval_intentions(pred, gold, scheme)?,
    };
    let mut outputs = Outputs::default();
    emit(&mut outputs, cfg.out.as_deref(), &text)?;
    outputs.commit();
    Ok(())
}
