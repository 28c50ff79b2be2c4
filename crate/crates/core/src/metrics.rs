//! Evaluation for sentence alignment, edit extraction and intention classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{DocVersion, SentenceId};
use crate::edits::{Edit, EditKind, Span, SentenceRevision};
use crate::error::{Error, Result};
use crate::intention::LabelScheme;
use crate::sentence::SentenceAlignment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Prf {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Prf { precision, recall, f1, tp, fp, fn_ }
    }

    /// Micro-average: sums the counts and recomputes the scores.
    pub fn merge(&self, other: &Prf) -> Prf {
        Prf::from_counts(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)
    }

    fn of_sets<T: Ord>(pred: &BTreeSet<T>, gold: &BTreeSet<T>) -> Prf {
        let tp = pred.intersection(gold).count();
        Prf::from_counts(tp, pred.len() - tp, gold.len() - tp)
    }
}

fn positives(
    a: &SentenceAlignment,
    src: &DocVersion,
    tgt: &DocVersion,
) -> Result<BTreeSet<(SentenceId, SentenceId)>> {
    let mut out = BTreeSet::new();
    for (s, t, _) in a.positive() {
        let ss = src.sentence(s).ok_or(Error::UnknownSentence(s))?;
        let ts = tgt.sentence(t).ok_or(Error::UnknownSentence(t))?;
        if !ss.is_identical_to(ts) {
            out.insert((s, t));
        }
    }
    Ok(out)
}

/// Binary alignment scores over aligned and partially-aligned pairs.
///
/// Pairs whose two sentences are identical are left out of every count.
pub fn eval_alignment(
    pred: &SentenceAlignment,
    gold: &SentenceAlignment,
    src: &DocVersion,
    tgt: &DocVersion,
) -> Result<Prf> {
    let versions = (src.version_index, tgt.version_index);
    for (name, a) in [("prediction", pred), ("gold", gold)] {
        if (a.src_version, a.tgt_version) != versions {
            return Err(Error::VersionMismatch(format!(
                "{name} aligns v{} to v{}, documents are v{} and v{}",
                a.src_version, a.tgt_version, versions.0, versions.1
            )));
        }
    }
    Ok(Prf::of_sets(&positives(pred, src, tgt)?, &positives(gold, src, tgt)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EditScore {
    pub prf: Prf,
    pub exact_match: bool,
    /// Index of the gold alternative that was scored.
    pub alternative: usize,
}

type EditKey = (Option<Span>, Option<Span>, EditKind);

fn keys(edits: &[Edit]) -> BTreeSet<EditKey> {
    edits.iter().map(Edit::key).collect()
}

/// Scores against the best-F1 gold alternative (first on ties); intentions are ignored.
pub fn eval_edits(pred: &[Edit], gold_alts: &[Vec<Edit>]) -> Result<EditScore> {
    if gold_alts.is_empty() {
        return Err(Error::Empty("no gold alternatives".into()));
    }
    let p = keys(pred);
    let mut best: Option<(usize, Prf)> = None;
    let mut exact_match = false;
    for (k, alt) in gold_alts.iter().enumerate() {
        let g = keys(alt);
        exact_match |= p == g;
        let prf = Prf::of_sets(&p, &g);
        if best.is_none_or(|(_, b)| prf.f1 > b.f1) {
            best = Some((k, prf));
        }
    }
    let (alternative, prf) = best.expect("non-empty");
    Ok(EditScore { prf, exact_match, alternative })
}

/// Corpus-level edit scores: micro-averaged counts and mean exact match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EditEvalReport {
    pub prf: Prf,
    pub exact_match: f64,
    pub revisions: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EditEvalAccumulator {
    tp: usize,
    fp: usize,
    fn_: usize,
    exact: usize,
    revisions: usize,
}

impl EditEvalAccumulator {
    pub fn add(&mut self, s: &EditScore) {
        self.tp += s.prf.tp;
        self.fp += s.prf.fp;
        self.fn_ += s.prf.fn_;
        self.exact += s.exact_match as usize;
        self.revisions += 1;
    }

    pub fn finish(&self) -> EditEvalReport {
        EditEvalReport {
            prf: Prf::from_counts(self.tp, self.fp, self.fn_),
            exact_match: ratio(self.exact, self.revisions),
            revisions: self.revisions,
        }
    }
}

/// Revisions with at most this many gold edits form the small bucket.
pub const SMALL_REVISION_EDITS: usize = 5;

/// Size used for bucketing: the first gold alternative when present, else the edits.
fn bucket_size(r: &SentenceRevision) -> usize {
    r.gold_alternatives.as_ref().and_then(|a| a.first()).map_or(r.edits.len(), Vec::len)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EditEvalSplit {
    pub all: EditEvalReport,
    pub small: EditEvalReport,
}

/// Scores each revision's `edits` against its gold alternatives.
pub fn eval_edit_corpus(revisions: &[SentenceRevision]) -> Result<EditEvalSplit> {
    let (mut all, mut small) = (EditEvalAccumulator::default(), EditEvalAccumulator::default());
    for r in revisions {
        let alts = r
            .gold_alternatives
            .as_deref()
            .ok_or_else(|| Error::Validation(format!("revision {} has no gold edits", r.id)))?;
        let score = eval_edits(&r.edits, alts)?;
        all.add(&score);
        if bucket_size(r) <= SMALL_REVISION_EDITS {
            small.add(&score);
        }
    }
    Ok(EditEvalSplit { all: all.finish(), small: small.finish() })
}

impl EditEvalSplit {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:>6} {:>6} {:>6} {:>6} {:>9}", "Subset", "P", "R", "F1", "EM", "Revisions");
        for (name, r) in [("all", &self.all), ("<=5 edits", &self.small)] {
            let _ = writeln!(
                out,
                "{:<12} {:>6.1} {:>6.1} {:>6.1} {:>6.1} {:>9}",
                name,
                100.0 * r.prf.precision,
                100.0 * r.prf.recall,
                100.0 * r.prf.f1,
                100.0 * r.exact_match,
                r.revisions
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub prf: Prf,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub total: usize,
}

impl ClassificationReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<22} {:>9} {:>9} {:>9} {:>8}", "Label", "Precision", "Recall", "F1", "Support");
        for (label, m) in &self.per_class {
            let _ = writeln!(
                out,
                "{:<22} {:>9.4} {:>9.4} {:>9.4} {:>8}",
                label, m.prf.precision, m.prf.recall, m.prf.f1, m.support
            );
        }
        let _ = writeln!(out, "{:<22} {:>9.4}", "accuracy", self.accuracy);
        let _ = writeln!(out, "{:<22} {:>9.4} {:>28}", "weighted F1", self.weighted_f1, self.total);
        out
    }
}

/// Per-class scores over every label seen in either sequence; weighted F1 uses gold support.
pub fn classification_report<L: Ord + Clone + ToString>(preds: &[L], golds: &[L]) -> Result<ClassificationReport> {
    if preds.len() != golds.len() {
        return Err(Error::LengthMismatch(format!("{} predictions, {} gold labels", preds.len(), golds.len())));
    }
    if golds.is_empty() {
        return Err(Error::Empty("no labels to evaluate".into()));
    }
    let classes: BTreeSet<&L> = preds.iter().chain(golds).collect();
    let mut per_class = BTreeMap::new();
    let mut weighted = 0.0;
    for c in classes {
        let tp = preds.iter().zip(golds).filter(|(p, g)| *p == c && *g == c).count();
        let pred_c = preds.iter().filter(|p| *p == c).count();
        let support = golds.iter().filter(|g| *g == c).count();
        let prf = Prf::from_counts(tp, pred_c - tp, support - tp);
        weighted += support as f64 * prf.f1;
        per_class.insert(c.to_string(), ClassMetrics { prf, support });
    }
    let correct = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(ClassificationReport {
        accuracy: ratio(correct, golds.len()),
        weighted_f1: weighted / golds.len() as f64,
        per_class,
        total: golds.len(),
    })
}

/// Classification report over label strings of one scheme.
pub fn eval_classification(preds: &[String], golds: &[String], scheme: LabelScheme) -> Result<ClassificationReport> {
    let parse = |v: &[String]| v.iter().map(|s| scheme.parse_label(s).map(|l| l.as_str())).collect::<Result<Vec<_>>>();
    classification_report(&parse(preds)?, &parse(golds)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditStats {
    pub revisions: usize,
    pub edits: usize,
    /// Share of edits of each kind.
    pub fraction: BTreeMap<EditKind, f64>,
    /// Mean token length per kind; a substitute counts the mean of its two spans.
    pub mean_len: BTreeMap<EditKind, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditStatsReport {
    pub all: EditStats,
    pub small: EditStats,
}

fn edit_len(e: &Edit) -> f64 {
    let len = |s: Option<Span>| s.map_or(0, |s| s.len()) as f64;
    match e.kind {
        EditKind::Insert => len(e.tgt),
        EditKind::Delete | EditKind::Reorder => len(e.src),
        EditKind::Substitute => (len(e.src) + len(e.tgt)) / 2.0,
    }
}

fn stats_of<'a>(revisions: impl Iterator<Item = &'a SentenceRevision>) -> EditStats {
    let mut count: BTreeMap<EditKind, usize> = BTreeMap::new();
    let mut length: BTreeMap<EditKind, f64> = BTreeMap::new();
    let (mut n_rev, mut n_edits) = (0, 0);
    for r in revisions {
        n_rev += 1;
        for e in &r.edits {
            n_edits += 1;
            *count.entry(e.kind).or_default() += 1;
            *length.entry(e.kind).or_default() += edit_len(e);
        }
    }
    let fraction = EditKind::ALL.iter().map(|&k| (k, ratio(count.get(&k).copied().unwrap_or(0), n_edits))).collect();
    let mean_len = EditKind::ALL
        .iter()
        .map(|&k| {
            let n = count.get(&k).copied().unwrap_or(0);
            (k, if n == 0 { 0.0 } else { length[&k] / n as f64 })
        })
        .collect();
    EditStats { revisions: n_rev, edits: n_edits, fraction, mean_len }
}

pub fn edit_stats(revisions: &[SentenceRevision]) -> EditStatsReport {
    EditStatsReport {
        all: stats_of(revisions.iter()),
        small: stats_of(revisions.iter().filter(|r| bucket_size(r) <= SMALL_REVISION_EDITS)),
    }
}

impl EditStatsReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<12}", "Subset");
        for k in EditKind::ALL {
            let _ = write!(out, " {:>11}", format!("%{}", k.as_str()));
        }
        for k in EditKind::ALL {
            let _ = write!(out, " {:>11}", format!("len {}", k.as_str()));
        }
        out.push('\n');
        for (name, s) in [("all", &self.all), ("<=5 edits", &self.small)] {
            let _ = write!(out, "{name:<12}");
            for k in EditKind::ALL {
                let _ = write!(out, " {:>11.1}", 100.0 * s.fraction[&k]);
            }
            for k in EditKind::ALL {
                let _ = write!(out, " {:>11.2}", s.mean_len[&k]);
            }
            out.push('\n');
        }
        out
    }
}
