use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::align::Corpus;
use super::output::{emit, load_alignments, read_text, Outputs};
use super::{CliError, CliResult};
use crate::config::{ExtractMethod, RunConfig};
use crate::edits::{
    derive_reorder, diff_edits, edits_from_alignment_simple, edits_with_parse, parse_tree_read, read_alignment_json,
    read_pharaoh_lines, Edit, ParseTree, RevisionRecord, SentenceRevision, WordAlignment,
};
use crate::intention::{ingest_predictions, rule_baseline_classify, Intention, LabelScheme};

pub(super) struct ExtractInputs<'a> {
    pub released: bool,
    pub alignments: &'a [PathBuf],
    pub revisions: Option<&'a Path>,
    pub word_alignments: Option<&'a Path>,
    pub src_trees: Option<&'a Path>,
    pub tgt_trees: Option<&'a Path>,
    pub reorder: bool,
    pub rule_intentions: bool,
    pub predictions: Option<&'a Path>,
    pub scheme: LabelScheme,
}

pub(super) fn read_revisions(path: &Path) -> CliResult<Vec<SentenceRevision>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let at = |e: String| CliError::input(format!("{} line {}: {e}", path.display(), n + 1));
            let de = &mut serde_json::Deserializer::from_str(line);
            let rec: RevisionRecord =
                serde_path_to_error::deserialize(de).map_err(|e| at(format!("at `{}`: {}", e.path(), e.inner())))?;
            rec.into_revision().map_err(|e| at(e.to_string()))
        })
        .collect()
}

pub(super) fn write_revisions(revisions: &[SentenceRevision]) -> CliResult<String> {
    let mut out = String::new();
    for r in revisions {
        let line = serde_json::to_string(&RevisionRecord::from_revision(r)).map_err(|e| CliError::internal(e.to_string()))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Aligned, non-identical sentence pairs in file and pair order.
fn revisions_from_alignments(cfg: &RunConfig, released: bool, paths: &[PathBuf]) -> CliResult<Vec<SentenceRevision>> {
    if paths.is_empty() {
        return Err(CliError::input("either --revisions or --corpus with --alignments is required"));
    }
    let corpus = Corpus::load(cfg, released)?;
    let mut out = Vec::new();
    for (path, file) in load_alignments(paths)? {
        let (group, src, tgt) = corpus.resolve(&path, &file)?;
        for (s, t, _) in file.alignment.positive() {
            let (a, b) = (src.sentence(s).expect("validated"), tgt.sentence(t).expect("validated"));
            if a.is_identical_to(b) {
                continue;
            }
            let id = format!(
                "{}:v{}-v{}:{}.{}-{}.{}",
                group.arxiv_id, s.version, t.version, s.paragraph, s.sentence, t.paragraph, t.sentence
            );
            out.push(SentenceRevision::new(id, a.clone(), b.clone()));
        }
    }
    Ok(out)
}

fn check_count(path: &Path, what: &str, got: usize, want: usize) -> CliResult<()> {
    if got == want {
        return Ok(());
    }
    let detail = if got < want {
        format!("lines {}..{} are missing", got + 1, want)
    } else {
        format!("lines {}..{} have no revision", want + 1, got)
    };
    Err(CliError::input(format!("{}: {got} {what} for {want} revisions; {detail}", path.display())))
}

fn read_word_alignments(path: &Path, revisions: &[SentenceRevision]) -> CliResult<Vec<WordAlignment>> {
    let text = read_text(path)?;
    let parsed = if path.extension().is_some_and(|x| x == "json") {
        read_alignment_json(text.as_bytes())
    } else {
        read_pharaoh_lines(&text)
    };
    let mut was = parsed.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    // a trailing newline-terminated empty line is not a pair
    if was.len() == revisions.len() + 1 && was.last().is_some_and(|w| w.links.is_empty()) && text.ends_with("\n\n") {
        was.pop();
    }
    check_count(path, "word alignments", was.len(), revisions.len())?;
    for (n, (wa, r)) in was.iter().zip(revisions).enumerate() {
        wa.validate(r.src.len(), r.tgt.len())
            .map_err(|e| CliError::input(format!("{} line {} ({}): {e}", path.display(), n + 1, r.id)))?;
    }
    Ok(was)
}

fn read_trees(path: &Path, lengths: impl Iterator<Item = usize>, count: usize) -> CliResult<Vec<ParseTree>> {
    let text = read_text(path)?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    check_count(path, "trees", lines.len(), count)?;
    lines
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(n, (line, len))| {
            let at = |m: String| CliError::input(format!("{} line {}: {m}", path.display(), n + 1));
            let tree = parse_tree_read(line).map_err(|e| at(e.to_string()))?;
            if tree.leaf_count() != len {
                return Err(at(format!("tree has {} leaves, sentence has {len} tokens", tree.leaf_count())));
            }
            Ok(tree)
        })
        .collect()
}

pub(super) fn cmd_extract_edits(cfg: &RunConfig, inputs: &ExtractInputs) -> CliResult<()> {
    let mut revisions = match inputs.revisions {
        Some(p) => read_revisions(p)?,
        None => revisions_from_alignments(cfg, inputs.released, inputs.alignments)?,
    };

    let word_alignments = match (cfg.method, inputs.word_alignments) {
        (ExtractMethod::DiffBaseline, _) => None,
        (_, Some(p)) => Some(read_word_alignments(p, &revisions)?),
        (_, None) => {
            log::warn!("no --word-alignments given; deriving links from a token diff");
            Some(revisions.iter().map(|r| WordAlignment::from_diff(&r.src, &r.tgt)).collect())
        }
    };
    let trees = match cfg.method {
        ExtractMethod::Parse => {
            let (Some(sp), Some(tp)) = (inputs.src_trees, inputs.tgt_trees) else {
                return Err(CliError::input("--method parse needs --src-trees and --tgt-trees"));
            };
            let n = revisions.len();
            let src = read_trees(sp, revisions.iter().map(|r| r.src.len()), n)?;
            let tgt = read_trees(tp, revisions.iter().map(|r| r.tgt.len()), n)?;
            Some((src, tgt))
        }
        _ => None,
    };

    let extracted: Vec<Vec<Edit>> = revisions
        .par_iter()
        .enumerate()
        .map(|(k, r)| -> crate::Result<Vec<Edit>> {
            let edits = match (cfg.method, &word_alignments, &trees) {
                (ExtractMethod::DiffBaseline, _, _) => return Ok(diff_edits(&r.src, &r.tgt)),
                (ExtractMethod::Parse, Some(was), Some((ts, tt))) => {
                    edits_with_parse(&r.src, &r.tgt, &was[k], &ts[k], &tt[k], cfg.max_level)?
                }
                (_, Some(was), _) => edits_from_alignment_simple(&r.src, &r.tgt, &was[k])?,
                _ => unreachable!("word alignments are always present for alignment-based methods"),
            };
            match (&word_alignments, inputs.reorder) {
                (Some(was), true) => derive_reorder(&edits, &was[k], &r.src, &r.tgt),
                _ => Ok(edits),
            }
        })
        .collect::<crate::Result<_>>()?;
    for (r, edits) in revisions.iter_mut().zip(extracted) {
        r.edits = edits;
    }

    if inputs.rule_intentions {
        for r in &mut revisions {
            let labels: Vec<_> = r.edits.iter().map(|e| rule_baseline_classify(e, &r.src, &r.tgt)).collect();
            for (e, l) in r.edits.iter_mut().zip(labels) {
                e.intention = Some(Intention::Fine(l));
            }
        }
    } else if let Some(p) = inputs.predictions {
        ingest_predictions(&read_text(p)?, &mut revisions, inputs.scheme)
            .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
    }

    let mut outputs = Outputs::default();
    emit(&mut outputs, cfg.out.as_deref(), &write_revisions(&revisions)?)?;
    outputs.commit();
    Ok(())
}
