//! Sentence alignment within aligned paragraph pairs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{DocVersion, Sentence, SentenceId};
use crate::error::{Error, Result};
use crate::paragraph::ParaAlignment;
use crate::similarity::{jaccard, SentenceSimilarity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SentAlignLabel {
    Aligned,
    #[serde(alias = "partially_aligned", alias = "partial")]
    PartiallyAligned,
    #[serde(alias = "not_aligned")]
    NotAligned,
}

impl SentAlignLabel {
    pub fn is_positive(self) -> bool {
        !matches!(self, SentAlignLabel::NotAligned)
    }

    fn join(self, other: SentAlignLabel) -> SentAlignLabel {
        if self == SentAlignLabel::Aligned && other == SentAlignLabel::Aligned {
            SentAlignLabel::Aligned
        } else {
            SentAlignLabel::PartiallyAligned
        }
    }
}

/// Labeled sentence pairs between two versions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceAlignment {
    pub src_version: u32,
    pub tgt_version: u32,
    pairs: BTreeMap<(SentenceId, SentenceId), SentAlignLabel>,
}

impl SentenceAlignment {
    pub fn new(src_version: u32, tgt_version: u32) -> Self {
        SentenceAlignment { src_version, tgt_version, pairs: BTreeMap::new() }
    }

    pub fn insert(&mut self, src: SentenceId, tgt: SentenceId, label: SentAlignLabel) -> Result<()> {
        if src.version != self.src_version || tgt.version != self.tgt_version {
            return Err(Error::VersionMismatch(format!(
                "pair {src} -> {tgt} does not belong to v{} -> v{}",
                self.src_version, self.tgt_version
            )));
        }
        self.pairs.insert((src, tgt), label);
        Ok(())
    }

    pub fn label(&self, src: SentenceId, tgt: SentenceId) -> Option<SentAlignLabel> {
        self.pairs.get(&(src, tgt)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SentenceId, SentenceId, SentAlignLabel)> + '_ {
        self.pairs.iter().map(|(&(s, t), &l)| (s, t, l))
    }

    /// Aligned and partially-aligned pairs.
    pub fn positive(&self) -> impl Iterator<Item = (SentenceId, SentenceId, SentAlignLabel)> + '_ {
        self.iter().filter(|(_, _, l)| l.is_positive())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Swaps the roles of the two versions.
    pub fn reversed(&self) -> SentenceAlignment {
        SentenceAlignment {
            src_version: self.tgt_version,
            tgt_version: self.src_version,
            pairs: self.pairs.iter().map(|(&(s, t), &l)| ((t, s), l)).collect(),
        }
    }

    /// Checks that every id exists in the given versions.
    pub fn validate_against(&self, src: &DocVersion, tgt: &DocVersion) -> Result<()> {
        if src.version_index != self.src_version || tgt.version_index != self.tgt_version {
            return Err(Error::VersionMismatch(format!(
                "alignment v{} -> v{} applied to v{} -> v{}",
                self.src_version, self.tgt_version, src.version_index, tgt.version_index
            )));
        }
        for (s, t, _) in self.iter() {
            if src.sentence(s).is_none() {
                return Err(Error::UnknownSentence(s));
            }
            if tgt.sentence(t).is_none() {
                return Err(Error::UnknownSentence(t));
            }
        }
        Ok(())
    }
}

fn lower_identical(a: &Sentence, b: &Sentence) -> bool {
    a.normalized().to_lowercase() == b.normalized().to_lowercase()
}

/// Best target per source sentence, independent of the threshold.
#[derive(Debug, Clone)]
pub struct DirectionalCandidates {
    src_version: u32,
    tgt_version: u32,
    best: Vec<(SentenceId, SentenceId, f64, bool)>,
}

impl DirectionalCandidates {
    pub fn compute(
        paras: &ParaAlignment,
        src: &DocVersion,
        tgt: &DocVersion,
        metric: &dyn SentenceSimilarity,
    ) -> Self {
        let mut best = Vec::new();
        for sp in src.active_paragraphs() {
            let targets: Vec<&Sentence> = tgt
                .active_paragraphs()
                .filter(|tp| paras.contains(sp.index, tp.index))
                .flat_map(|tp| tp.active_sentences())
                .collect();
            if targets.is_empty() {
                continue;
            }
            for s in sp.active_sentences() {
                let mut top: Option<(&Sentence, f64)> = None;
                for t in &targets {
                    let score = metric.similarity(s, t);
                    if top.is_none_or(|(_, b)| score > b) {
                        top = Some((t, score));
                    }
                }
                if let Some((t, score)) = top {
                    let identical = lower_identical(s, t);
                    best.push((s.id, t.id, score, identical));
                }
            }
        }
        DirectionalCandidates { src_version: src.version_index, tgt_version: tgt.version_index, best }
    }

    pub fn at_threshold(&self, threshold: f64) -> SentenceAlignment {
        let mut out = SentenceAlignment::new(self.src_version, self.tgt_version);
        for &(s, t, score, identical) in &self.best {
            if score >= threshold {
                let label = if identical { SentAlignLabel::Aligned } else { SentAlignLabel::PartiallyAligned };
                out.pairs.insert((s, t), label);
            }
        }
        out
    }
}

/// Aligns each source sentence to its best-scoring target within the aligned paragraphs.
pub fn align_sentences_directional(
    paras: &ParaAlignment,
    src: &DocVersion,
    tgt: &DocVersion,
    metric: &dyn SentenceSimilarity,
    threshold: f64,
) -> SentenceAlignment {
    DirectionalCandidates::compute(paras, src, tgt, metric).at_threshold(threshold)
}

/// Intersection of a forward alignment and a backward (target to source) one.
pub fn merge_bidirectional(fwd: &SentenceAlignment, bwd: &SentenceAlignment) -> Result<SentenceAlignment> {
    if fwd.src_version != bwd.tgt_version || fwd.tgt_version != bwd.src_version {
        return Err(Error::VersionMismatch(format!(
            "forward v{} -> v{} cannot merge with backward v{} -> v{}",
            fwd.src_version, fwd.tgt_version, bwd.src_version, bwd.tgt_version
        )));
    }
    let mut out = SentenceAlignment::new(fwd.src_version, fwd.tgt_version);
    for (s, t, l) in fwd.positive() {
        if let Some(back) = bwd.label(t, s).filter(|b| b.is_positive()) {
            out.pairs.insert((s, t), l.join(back));
        }
    }
    Ok(out)
}

/// Chains `v0 -> v1` and `v1 -> v2` into `v0 -> v2`.
pub fn derive_transitive(a01: &SentenceAlignment, a12: &SentenceAlignment) -> Result<SentenceAlignment> {
    if a01.tgt_version != a12.src_version {
        return Err(Error::VersionMismatch(format!(
            "cannot chain v{} -> v{} with v{} -> v{}",
            a01.src_version, a01.tgt_version, a12.src_version, a12.tgt_version
        )));
    }
    let mut out = SentenceAlignment::new(a01.src_version, a12.tgt_version);
    for (s, t, l1) in a01.positive() {
        let next = a12.pairs.range((t, SentenceId::new(0, 0, 0))..).take_while(|((m, _), _)| *m == t);
        for (&(_, u), &l2) in next {
            if !l2.is_positive() {
                continue;
            }
            let label = l1.join(l2);
            // keep the strongest label if several paths reach the same pair
            let entry = out.pairs.entry((s, u)).or_insert(label);
            if label == SentAlignLabel::Aligned {
                *entry = label;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HybridPartition {
    pub auto_aligned: Vec<usize>,
    pub auto_not_aligned: Vec<usize>,
    pub needs_human: Vec<usize>,
}

const AUTO_ALIGNED_ABOVE: f64 = 0.7;
const AUTO_NOT_ALIGNED_BELOW: f64 = 0.2;

/// Splits candidate pairs into those labeled automatically and those needing annotation.
pub fn auto_label_hybrid(candidates: &[(&Sentence, &Sentence)]) -> HybridPartition {
    let mut out = HybridPartition::default();
    for (i, (a, b)) in candidates.iter().enumerate() {
        let j = jaccard(a, b);
        if j > AUTO_ALIGNED_ABOVE {
            out.auto_aligned.push(i);
        } else if j < AUTO_NOT_ALIGNED_BELOW {
            out.auto_not_aligned.push(i);
        } else {
            out.needs_human.push(i);
        }
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct PairRecord {
    src: [usize; 2],
    tgt: [usize; 2],
    label: SentAlignLabel,
}

#[derive(Debug, Serialize, Deserialize)]
struct AlignmentRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arxiv_id: Option<String>,
    src_version: u32,
    tgt_version: u32,
    pairs: Vec<PairRecord>,
}

/// Alignment file contents: an optional group id plus the alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentFile {
    pub arxiv_id: Option<String>,
    pub alignment: SentenceAlignment,
}

impl AlignmentFile {
    pub fn to_json(&self) -> Result<String> {
        let a = &self.alignment;
        let record = AlignmentRecord {
            arxiv_id: self.arxiv_id.clone(),
            src_version: a.src_version,
            tgt_version: a.tgt_version,
            pairs: a
                .iter()
                .map(|(s, t, label)| PairRecord { src: [s.paragraph, s.sentence], tgt: [t.paragraph, t.sentence], label })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&record)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(bytes: &[u8]) -> Result<AlignmentFile> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let record: AlignmentRecord = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })?;
        let mut alignment = SentenceAlignment::new(record.src_version, record.tgt_version);
        for p in record.pairs {
            alignment.insert(
                SentenceId::new(record.src_version, p.src[0], p.src[1]),
                SentenceId::new(record.tgt_version, p.tgt[0], p.tgt[1]),
                p.label,
            )?;
        }
        Ok(AlignmentFile { arxiv_id: record.arxiv_id, alignment })
    }
}
