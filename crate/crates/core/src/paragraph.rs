//! Threshold-gated paragraph alignment.
//!
//! Two similarity matrices are computed over the non-skipped paragraphs of
//! a version pair, then two argmax passes (one per target column, one per
//! source row) add a pair when its similarity and relative-position gap
//! pass the thresholds. The column pass takes its argmax over the
//! target-averaged matrix but gates on the source-averaged one, and the row
//! pass does the reverse.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{DocVersion, Paragraph};
use crate::error::{Error, Result};
use crate::similarity::{jaccard_sets, token_set};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau4: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { tau1: 0.28, tau2: 0.15, tau3: 0.85, tau4: 0.2 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau1", self.tau1), ("tau2", self.tau2), ("tau3", self.tau3), ("tau4", self.tau4)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Paragraph similarity matrices over non-skipped paragraphs.
///
/// `sim1[i][j]` averages, over the sentences of source paragraph `i`, the
/// best match among the sentences of target paragraph `j`; `sim2[i][j]`
/// averages over the target paragraph's sentences instead.
#[derive(Debug, Clone, PartialEq)]
pub struct ParaSimTensor {
    pub sim1: Vec<Vec<f64>>,
    pub sim2: Vec<Vec<f64>>,
    /// Original paragraph index of each row.
    pub src_paragraphs: Vec<usize>,
    /// Original paragraph index of each column.
    pub tgt_paragraphs: Vec<usize>,
}

impl ParaSimTensor {
    pub fn k(&self) -> usize {
        self.src_paragraphs.len()
    }

    pub fn l(&self) -> usize {
        self.tgt_paragraphs.len()
    }
}

/// Pairs of original paragraph indices `(source, target)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParaAlignment {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl ParaAlignment {
    pub fn contains(&self, src: usize, tgt: usize) -> bool {
        self.pairs.contains(&(src, tgt))
    }

    /// The same pairs with source and target swapped.
    pub fn reversed(&self) -> ParaAlignment {
        ParaAlignment { pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn sentence_sets(p: &Paragraph) -> Vec<HashSet<String>> {
    p.active_sentences().map(token_set).collect()
}

/// Mean over `outer` of the best jaccard against any of `inner`; 0 when either is empty.
fn avg_max(outer: &[HashSet<String>], inner: &[HashSet<String>]) -> f64 {
    if outer.is_empty() || inner.is_empty() {
        return 0.0;
    }
    let total: f64 = outer
        .iter()
        .map(|s| inner.iter().map(|c| jaccard_sets(s, c)).fold(0.0, f64::max))
        .sum();
    total / outer.len() as f64
}

pub fn compute_sim_tensor(src: &DocVersion, tgt: &DocVersion) -> Result<ParaSimTensor> {
    if src.paragraphs.is_empty() || tgt.paragraphs.is_empty() {
        return Err(Error::Empty(format!(
            "cannot align v{} ({} paragraphs) with v{} ({} paragraphs)",
            src.version_index,
            src.paragraphs.len(),
            tgt.version_index,
            tgt.paragraphs.len()
        )));
    }
    let src_paras: Vec<&Paragraph> = src.active_paragraphs().collect();
    let tgt_paras: Vec<&Paragraph> = tgt.active_paragraphs().collect();
    let src_sets: Vec<_> = src_paras.iter().map(|p| sentence_sets(p)).collect();
    let tgt_sets: Vec<_> = tgt_paras.iter().map(|p| sentence_sets(p)).collect();

    let rows: Vec<(Vec<f64>, Vec<f64>)> = src_sets
        .par_iter()
        .map(|s| {
            let sim1 = tgt_sets.iter().map(|c| avg_max(s, c)).collect();
            let sim2 = tgt_sets.iter().map(|c| avg_max(c, s)).collect();
            (sim1, sim2)
        })
        .collect();
    let (sim1, sim2) = rows.into_iter().unzip();
    Ok(ParaSimTensor {
        sim1,
        sim2,
        src_paragraphs: src_paras.iter().map(|p| p.index).collect(),
        tgt_paragraphs: tgt_paras.iter().map(|p| p.index).collect(),
    })
}

/// First index of the maximum.
fn argmax(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Relative-position gap with 1-based positions, `|i/k - j/l|`.
fn position_gap(i: usize, k: usize, j: usize, l: usize) -> f64 {
    ((i + 1) as f64 / k as f64 - (j + 1) as f64 / l as f64).abs()
}

/// Runs the two alignment passes over a precomputed tensor.
pub fn align_from_tensor(tensor: &ParaSimTensor, t: &Thresholds) -> ParaAlignment {
    let (k, l) = (tensor.k(), tensor.l());
    let mut compact = BTreeSet::new();
    if k == 0 || l == 0 {
        return ParaAlignment::default();
    }
    for j in 0..l {
        let i_max = argmax((0..k).map(|i| tensor.sim2[i][j])).expect("k > 0");
        let s = tensor.sim1[i_max][j];
        if (s > t.tau1 && position_gap(i_max, k, j, l) < t.tau2) || s > t.tau3 {
            compact.insert((i_max, j));
        }
    }
    for i in 0..k {
        let j_max = argmax(tensor.sim1[i].iter().copied()).expect("l > 0");
        let s = tensor.sim2[i][j_max];
        if (s > t.tau1 && position_gap(i, k, j_max, l) < t.tau4) || s > t.tau3 {
            compact.insert((i, j_max));
        }
    }
    ParaAlignment {
        pairs: compact
            .into_iter()
            .map(|(i, j)| (tensor.src_paragraphs[i], tensor.tgt_paragraphs[j]))
            .collect(),
    }
}

pub fn align_paragraphs(src: &DocVersion, tgt: &DocVersion, t: &Thresholds) -> Result<ParaAlignment> {
    Ok(align_from_tensor(&compute_sim_tensor(src, tgt)?, t))
}
