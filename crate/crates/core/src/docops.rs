//! Document-level revision operations derived from a sentence alignment.
//!
//! The aligned and partially-aligned pairs form a bipartite graph between
//! the two versions; each connected component is one operation, classified
//! by how many source and target sentences it touches.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{DocVersion, SentenceId};
use crate::error::{Error, Result};
use crate::sentence::SentenceAlignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Insertion,
    Deletion,
    Rephrasing,
    Splitting,
    Merging,
    Fusion,
    Copying,
}

impl Operation {
    pub const ALL: [Operation; 7] = [
        Operation::Insertion,
        Operation::Deletion,
        Operation::Rephrasing,
        Operation::Splitting,
        Operation::Merging,
        Operation::Fusion,
        Operation::Copying,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Operation::Insertion => "sent. insertion (0-to-1)",
            Operation::Deletion => "sent. deletion (1-to-0)",
            Operation::Rephrasing => "sent. rephrasing (1-to-1)",
            Operation::Splitting => "sent. splitting (1-to-n)",
            Operation::Merging => "sent. merging (n-to-1)",
            Operation::Fusion => "sent. fusion (m-to-n)",
            Operation::Copying => "sent. copying (1-to-1)",
        }
    }
}

/// One connected component of the alignment graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpComponent {
    pub op: Operation,
    pub src: Vec<SentenceId>,
    pub tgt: Vec<SentenceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocOpsReport {
    pub counts: BTreeMap<Operation, usize>,
    /// Non-skipped sentences in the source version(s).
    pub src_sentences: usize,
    pub tgt_sentences: usize,
    #[serde(skip)]
    pub components: Vec<OpComponent>,
}

impl Default for DocOpsReport {
    fn default() -> Self {
        DocOpsReport {
            counts: Operation::ALL.iter().map(|&op| (op, 0)).collect(),
            src_sentences: 0,
            tgt_sentences: 0,
            components: Vec::new(),
        }
    }
}

impl DocOpsReport {
    pub fn count(&self, op: Operation) -> usize {
        self.counts.get(&op).copied().unwrap_or(0)
    }

    /// Adds the counts of `other`; components are not carried over.
    pub fn absorb(&mut self, other: &DocOpsReport) {
        for (op, n) in &other.counts {
            *self.counts.entry(*op).or_insert(0) += n;
        }
        self.src_sentences += other.src_sentences;
        self.tgt_sentences += other.tgt_sentences;
    }

    pub fn non_copy_total(&self) -> usize {
        Operation::ALL.iter().filter(|&&op| op != Operation::Copying).map(|&op| self.count(op)).sum()
    }

    /// Two-column text table in the order of [`Operation::ALL`].
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<32} {:>10}", "Operation at document level", "Count");
        for op in Operation::ALL {
            let _ = writeln!(out, "# of {:<27} {:>10}", op.label(), self.count(op));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Src(SentenceId),
    Tgt(SentenceId),
}

fn classify(src: &[SentenceId], tgt: &[SentenceId], identical: impl Fn() -> bool) -> Operation {
    match (src.len(), tgt.len()) {
        (1, 0) => Operation::Deletion,
        (0, 1) => Operation::Insertion,
        (1, 1) if identical() => Operation::Copying,
        (1, 1) => Operation::Rephrasing,
        (1, _) => Operation::Splitting,
        (_, 1) => Operation::Merging,
        _ => Operation::Fusion,
    }
}

/// Connected components over non-skipped sentences plus any sentence the alignment references.
pub fn components(a: &SentenceAlignment, src: &DocVersion, tgt: &DocVersion) -> Result<Vec<OpComponent>> {
    a.validate_against(src, tgt)?;
    let mut adjacency: HashMap<Node, Vec<Node>> = HashMap::new();
    let mut order: BTreeSet<(u8, SentenceId)> = BTreeSet::new();
    for s in src.active_sentences() {
        adjacency.entry(Node::Src(s.id)).or_default();
        order.insert((0, s.id));
    }
    for t in tgt.active_sentences() {
        adjacency.entry(Node::Tgt(t.id)).or_default();
        order.insert((1, t.id));
    }
    for (s, t, _) in a.positive() {
        adjacency.entry(Node::Src(s)).or_default().push(Node::Tgt(t));
        adjacency.entry(Node::Tgt(t)).or_default().push(Node::Src(s));
        order.insert((0, s));
        order.insert((1, t));
    }

    let mut seen: BTreeSet<(u8, SentenceId)> = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &order {
        if seen.contains(&start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        let (mut cs, mut ct) = (Vec::new(), Vec::new());
        while let Some((side, id)) = queue.pop_front() {
            let node = if side == 0 { cs.push(id); Node::Src(id) } else { ct.push(id); Node::Tgt(id) };
            for next in &adjacency[&node] {
                let key = match *next {
                    Node::Src(i) => (0, i),
                    Node::Tgt(i) => (1, i),
                };
                if seen.insert(key) {
                    queue.push_back(key);
                }
            }
        }
        cs.sort();
        ct.sort();
        let op = classify(&cs, &ct, || {
            let s = src.sentence(cs[0]).expect("validated");
            let t = tgt.sentence(ct[0]).expect("validated");
            s.is_identical_to(t)
        });
        out.push(OpComponent { op, src: cs, tgt: ct });
    }
    Ok(out)
}

pub fn classify_operations(a: &SentenceAlignment, src: &DocVersion, tgt: &DocVersion) -> Result<DocOpsReport> {
    let comps = components(a, src, tgt)?;
    let mut report = DocOpsReport {
        src_sentences: src.active_sentences().count(),
        tgt_sentences: tgt.active_sentences().count(),
        ..Default::default()
    };
    for c in &comps {
        *report.counts.entry(c.op).or_insert(0) += 1;
    }
    report.components = comps;
    Ok(report)
}

/// Which sentences count as kept when computing the update ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeptDefinition {
    #[default]
    CopyOnly,
    CopyOrRephrase,
}

impl std::str::FromStr for KeptDefinition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "copy_only" | "copy-only" => Ok(KeptDefinition::CopyOnly),
            "copy_or_rephrase" | "copy-or-rephrase" => Ok(KeptDefinition::CopyOrRephrase),
            _ => Err(Error::InvalidArgument(format!("unknown kept definition `{s}`"))),
        }
    }
}

/// `1 - kept / total` over the non-skipped source sentences.
pub fn update_ratio_with(
    a: &SentenceAlignment,
    src: &DocVersion,
    tgt: &DocVersion,
    kept: KeptDefinition,
) -> Result<f64> {
    let total = src.active_sentences().count();
    if total == 0 {
        return Err(Error::Empty(format!("v{} has no non-skipped sentences", src.version_index)));
    }
    let kept_ops: &[Operation] = match kept {
        KeptDefinition::CopyOnly => &[Operation::Copying],
        KeptDefinition::CopyOrRephrase => &[Operation::Copying, Operation::Rephrasing],
    };
    let copied = components(a, src, tgt)?
        .iter()
        .filter(|c| kept_ops.contains(&c.op))
        .flat_map(|c| &c.src)
        .filter(|id| src.sentence(**id).is_some_and(|s| !s.skipped))
        .count();
    Ok(1.0 - copied as f64 / total as f64)
}

pub fn update_ratio(a: &SentenceAlignment, src: &DocVersion, tgt: &DocVersion) -> Result<f64> {
    update_ratio_with(a, src, tgt, KeptDefinition::CopyOnly)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionOp {
    Inserted,
    Deleted,
    Revised,
}

impl PositionOp {
    pub fn as_str(self) -> &'static str {
        match self {
            PositionOp::Inserted => "inserted",
            PositionOp::Deleted => "deleted",
            PositionOp::Revised => "revised",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistBin {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

/// Relative positions (ordinal over non-skipped sentences) of one kind of change.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionHistogram {
    pub op: PositionOp,
    pub positions: Vec<f64>,
}

impl PositionHistogram {
    pub fn new(op: PositionOp) -> Self {
        PositionHistogram { op, positions: Vec::new() }
    }

    pub fn extend(&mut self, other: &PositionHistogram) {
        self.positions.extend_from_slice(&other.positions);
    }

    /// Counts in `n` uniform bins over `[0, 1]`; the last bin is closed.
    pub fn bins(&self, n: usize) -> Vec<HistBin> {
        let n = n.max(1);
        let mut counts = vec![0usize; n];
        for &p in &self.positions {
            counts[bin_index(p, n)] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| HistBin { start: i as f64 / n as f64, end: (i + 1) as f64 / n as f64, count })
            .collect()
    }

    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("bin_start,bin_end,count\n");
        for b in self.bins(n) {
            let _ = writeln!(out, "{:.4},{:.4},{}", b.start, b.end, b.count);
        }
        out
    }
}

fn bin_index(x: f64, n: usize) -> usize {
    ((x * n as f64).floor() as usize).min(n - 1)
}

/// Inserted positions are measured in the target; deleted and revised (rephrased) in the source.
pub fn position_histograms(
    a: &SentenceAlignment,
    src: &DocVersion,
    tgt: &DocVersion,
) -> Result<Vec<PositionHistogram>> {
    let ordinals = |d: &DocVersion| -> (HashMap<SentenceId, usize>, usize) {
        let ids: HashMap<_, _> = d.active_sentences().enumerate().map(|(i, s)| (s.id, i)).collect();
        let n = ids.len();
        (ids, n)
    };
    let (src_ord, src_n) = ordinals(src);
    let (tgt_ord, tgt_n) = ordinals(tgt);
    let pos = |ord: &HashMap<SentenceId, usize>, n: usize, id: &SentenceId| ord.get(id).map(|&i| i as f64 / n as f64);

    let mut inserted = PositionHistogram::new(PositionOp::Inserted);
    let mut deleted = PositionHistogram::new(PositionOp::Deleted);
    let mut revised = PositionHistogram::new(PositionOp::Revised);
    for c in components(a, src, tgt)? {
        match c.op {
            Operation::Insertion => inserted.positions.extend(pos(&tgt_ord, tgt_n, &c.tgt[0])),
            Operation::Deletion => deleted.positions.extend(pos(&src_ord, src_n, &c.src[0])),
            Operation::Rephrasing => revised.positions.extend(pos(&src_ord, src_n, &c.src[0])),
            _ => {}
        }
    }
    for h in [&mut inserted, &mut deleted, &mut revised] {
        h.positions.sort_by(f64::total_cmp);
    }
    Ok(vec![inserted, deleted, revised])
}

/// Share of each change action among the non-copy operations falling in one update-ratio bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionBin {
    pub ratio_start: f64,
    pub ratio_end: f64,
    pub revisions: usize,
    pub insertion: f64,
    pub deletion: f64,
    pub rephrasing: f64,
    /// Splitting, merging and fusion together.
    pub other: f64,
}

pub fn action_composition_by_ratio(reports: &[(DocOpsReport, f64)], bins: usize) -> Vec<CompositionBin> {
    let n = bins.max(1);
    let mut pooled: Vec<(DocOpsReport, usize)> = vec![(DocOpsReport::default(), 0); n];
    for (report, ratio) in reports {
        let slot = &mut pooled[bin_index(ratio.clamp(0.0, 1.0), n)];
        slot.0.absorb(report);
        slot.1 += 1;
    }
    pooled
        .into_iter()
        .enumerate()
        .filter_map(|(i, (r, revisions))| {
            let total = r.non_copy_total();
            if total == 0 {
                return None;
            }
            let frac = |op| r.count(op) as f64 / total as f64;
            let (ins, del, reph) = (frac(Operation::Insertion), frac(Operation::Deletion), frac(Operation::Rephrasing));
            Some(CompositionBin {
                ratio_start: i as f64 / n as f64,
                ratio_end: (i + 1) as f64 / n as f64,
                revisions,
                insertion: ins,
                deletion: del,
                rephrasing: reph,
                other: 1.0 - ins - del - reph,
            })
        })
        .collect()
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(format!("{} x values, {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidArgument("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
