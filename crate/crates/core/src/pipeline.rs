//! End-to-end alignment of a version pair and threshold fitting.

use serde::{Deserialize, Serialize};

use crate::corpus::DocVersion;
use crate::error::{Error, Result};
use crate::metrics::{eval_alignment, Prf};
use crate::paragraph::{align_paragraphs, ParaAlignment, Thresholds};
use crate::sentence::{merge_bidirectional, DirectionalCandidates, SentenceAlignment};
use crate::similarity::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    /// Intersection of both directions.
    Both,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            "both" => Ok(Direction::Both),
            _ => Err(Error::InvalidArgument(format!("unknown direction `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignConfig {
    pub thresholds: Thresholds,
    pub metric: Metric,
    pub threshold: f64,
    pub direction: Direction,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            thresholds: Thresholds::default(),
            metric: Metric::Jaccard,
            threshold: Metric::Jaccard.default_threshold(),
            direction: Direction::Both,
        }
    }
}

/// Threshold-free scores for one version pair; cheap to re-threshold.
pub struct PairCandidates {
    src_version: u32,
    tgt_version: u32,
    forward: Option<DirectionalCandidates>,
    backward: Option<DirectionalCandidates>,
}

impl PairCandidates {
    pub fn compute(src: &DocVersion, tgt: &DocVersion, cfg: &AlignConfig) -> Result<PairCandidates> {
        let empty = |c: &DocVersion| c.paragraphs.is_empty();
        let paras =
            if empty(src) || empty(tgt) { ParaAlignment::default() } else { align_paragraphs(src, tgt, &cfg.thresholds)? };
        let scorer = cfg.metric.scorer(src, tgt);
        let scorer = match scorer {
            Ok(s) => s,
            // tf-idf over two empty versions: nothing to align
            Err(Error::Empty(_)) => {
                return Ok(PairCandidates {
                    src_version: src.version_index,
                    tgt_version: tgt.version_index,
                    forward: None,
                    backward: None,
                })
            }
            Err(e) => return Err(e),
        };
        let want_fwd = matches!(cfg.direction, Direction::Forward | Direction::Both);
        let want_bwd = matches!(cfg.direction, Direction::Backward | Direction::Both);
        Ok(PairCandidates {
            src_version: src.version_index,
            tgt_version: tgt.version_index,
            forward: want_fwd.then(|| DirectionalCandidates::compute(&paras, src, tgt, &scorer)),
            backward: want_bwd.then(|| DirectionalCandidates::compute(&paras.reversed(), tgt, src, &scorer)),
        })
    }

    pub fn at_threshold(&self, threshold: f64) -> Result<SentenceAlignment> {
        match (&self.forward, &self.backward) {
            (Some(f), Some(b)) => merge_bidirectional(&f.at_threshold(threshold), &b.at_threshold(threshold)),
            (Some(f), None) => Ok(f.at_threshold(threshold)),
            (None, Some(b)) => Ok(b.at_threshold(threshold).reversed()),
            (None, None) => Ok(SentenceAlignment::new(self.src_version, self.tgt_version)),
        }
    }
}

/// Paragraph alignment followed by sentence alignment in the configured direction(s).
pub fn align_versions(src: &DocVersion, tgt: &DocVersion, cfg: &AlignConfig) -> Result<SentenceAlignment> {
    PairCandidates::compute(src, tgt, cfg)?.at_threshold(cfg.threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub threshold: f64,
    pub prf: Prf,
}

/// Grid search over thresholds `0.00, 0.01, ..., 1.00` maximizing micro F1.
///
/// Ties go to the lowest threshold.
pub fn tune_threshold(
    dev: &[(&DocVersion, &DocVersion, &SentenceAlignment)],
    cfg: &AlignConfig,
) -> Result<TuneResult> {
    if dev.is_empty() {
        return Err(Error::Empty("tuning needs at least one gold alignment".into()));
    }
    let candidates = dev
        .iter()
        .map(|(s, t, _)| PairCandidates::compute(s, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<TuneResult> = None;
    for step in 0..=100 {
        let threshold = step as f64 / 100.0;
        let mut total = Prf::from_counts(0, 0, 0);
        for (c, (s, t, gold)) in candidates.iter().zip(dev) {
            let pred = c.at_threshold(threshold)?;
            total = total.merge(&eval_alignment(&pred, gold, s, t)?);
        }
        if best.as_ref().is_none_or(|b| total.f1 > b.prf.f1) {
            best = Some(TuneResult { threshold, prf: total });
        }
    }
    Ok(best.expect("grid is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_versions_align_all_sentences() {
        let p = ["We introduce a corpus of revised papers .", "It contains many aligned sentence pairs ."];
        let a = DocVersion::new(1, 1, [p]);
        let b = DocVersion::new(2, 2, [p]);
        for metric in Metric::ALL {
            let cfg = AlignConfig { metric, threshold: metric.default_threshold(), ..Default::default() };
            let out = align_versions(&a, &b, &cfg).unwrap();
            assert_eq!(out.len(), 2, "{metric:?}");
        }
    }

    #[test]
    fn backward_only_is_reported_source_to_target() {
        let p = ["We introduce a corpus of revised papers .", "It contains many aligned sentence pairs ."];
        let a = DocVersion::new(1, 1, [p]);
        let b = DocVersion::new(2, 2, [p]);
        let cfg = AlignConfig { direction: Direction::Backward, ..Default::default() };
        let out = align_versions(&a, &b, &cfg).unwrap();
        assert_eq!((out.src_version, out.tgt_version), (1, 2));
        assert_eq!(out.len(), 2);
    }
}
