//! Sentence-pair similarity metrics.
//!
//! All metrics work on lowercased surfaces, are bounded in `[0, 1]` and
//! return exactly `1.0` for identical inputs (BLEU excepts empty sentences,
//! which score `0`).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{DocVersion, Sentence};
use crate::error::{Error, Result};

pub fn token_set(s: &Sentence) -> HashSet<String> {
    s.tokens.iter().map(|t| t.lowercase()).collect()
}

fn lower_tokens(s: &Sentence) -> Vec<String> {
    s.tokens.iter().map(|t| t.lowercase()).collect()
}

/// `|A ∩ B| / |A ∪ B|`; two empty sets count as identical.
pub fn jaccard_sets(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

pub fn jaccard(a: &Sentence, b: &Sentence) -> f64 {
    jaccard_sets(&token_set(a), &token_set(b))
}

fn cosine<K: std::hash::Hash + Eq>(a: &HashMap<K, f64>, b: &HashMap<K, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}

fn char_ngrams(s: &str, n: usize) -> HashMap<String, f64> {
    let chars: Vec<char> = s.to_lowercase().chars().collect();
    let mut counts = HashMap::new();
    if chars.len() >= n {
        for w in chars.windows(n) {
            *counts.entry(w.iter().collect::<String>()).or_insert(0.0) += 1.0;
        }
    }
    counts
}

/// Cosine similarity of character n-gram count vectors over the raw text.
pub fn char_ngram_sim(a: &Sentence, b: &Sentence, n: usize) -> Result<f64> {
    char_ngram_str(&a.raw, &b.raw, n)
}

pub fn char_ngram_str(a: &str, b: &str, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidArgument("n-gram order must be at least 1".into()));
    }
    if a.to_lowercase() == b.to_lowercase() {
        return Ok(1.0);
    }
    Ok(cosine(&char_ngrams(a, n), &char_ngrams(b, n)))
}

/// Inverse document frequencies where every sentence counts as a document.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfModel {
    idf: HashMap<String, f64>,
    doc_count: usize,
}

impl IdfModel {
    pub fn from_documents<'a, I, D>(docs: I) -> Result<IdfModel>
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = &'a Sentence>,
    {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut doc_count = 0usize;
        for doc in docs {
            for s in doc {
                doc_count += 1;
                for t in token_set(s) {
                    *df.entry(t).or_insert(0) += 1;
                }
            }
        }
        if doc_count == 0 {
            return Err(Error::Empty("idf model needs at least one sentence".into()));
        }
        let n = doc_count as f64;
        let idf = df.into_iter().map(|(t, d)| (t, (n / d as f64).ln())).collect();
        Ok(IdfModel { idf, doc_count })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// Unseen tokens back off to a document frequency of one.
    pub fn idf(&self, token: &str) -> f64 {
        self.idf.get(token).copied().unwrap_or_else(|| (self.doc_count as f64).ln())
    }

    fn vector(&self, tokens: &[String]) -> HashMap<String, f64> {
        let mut tf: HashMap<String, f64> = HashMap::new();
        for t in tokens {
            *tf.entry(t.clone()).or_insert(0.0) += 1.0;
        }
        tf.into_iter().map(|(t, c)| {
            let w = c * self.idf(&t);
            (t, w)
        }).collect()
    }
}

/// Fits idf over the non-skipped sentences of the given versions.
pub fn build_idf<'a>(docs: impl IntoIterator<Item = &'a DocVersion>) -> Result<IdfModel> {
    IdfModel::from_documents(docs.into_iter().map(|d| d.active_sentences()))
}

/// Cosine similarity of raw-count tf times idf vectors.
pub fn tfidf_sim(a: &Sentence, b: &Sentence, model: &IdfModel) -> f64 {
    let (ta, tb) = (lower_tokens(a), lower_tokens(b));
    let mut sa = ta.clone();
    let mut sb = tb.clone();
    sa.sort();
    sb.sort();
    if sa == sb {
        return 1.0;
    }
    cosine(&model.vector(&ta), &model.vector(&tb))
}

const BLEU_ORDER: usize = 4;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Sentence BLEU of `hyp` against `reference` with add-one smoothing for n >= 2.
pub fn bleu_directional(hyp: &[String], reference: &[String]) -> f64 {
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=BLEU_ORDER {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        let total: usize = h.values().sum();
        let matched: usize = h.iter().map(|(g, c)| (*c).min(r.get(g).copied().unwrap_or(0))).sum();
        let p = if n == 1 {
            if matched == 0 {
                return 0.0;
            }
            matched as f64 / total as f64
        } else {
            (matched as f64 + 1.0) / (total as f64 + 1.0)
        };
        log_sum += p.ln() / BLEU_ORDER as f64;
    }
    let (c, r) = (hyp.len() as f64, reference.len() as f64);
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    (bp * log_sum.exp()).clamp(0.0, 1.0)
}

/// Sentence BLEU averaged over both directions.
pub fn bleu_sim(a: &Sentence, b: &Sentence) -> f64 {
    let (ta, tb) = (lower_tokens(a), lower_tokens(b));
    if !ta.is_empty() && ta == tb {
        return 1.0;
    }
    0.5 * (bleu_directional(&ta, &tb) + bleu_directional(&tb, &ta))
}

/// Sentence similarity used by the threshold aligners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Jaccard,
    Tfidf,
    Char3gram,
    Bleu,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Jaccard, Metric::Tfidf, Metric::Char3gram, Metric::Bleu];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Jaccard => "jaccard",
            Metric::Tfidf => "tfidf",
            Metric::Char3gram => "char3gram",
            Metric::Bleu => "bleu",
        }
    }

    /// Shipped threshold; see `revkit tune` for fitting one on a dev split.
    pub fn default_threshold(self) -> f64 {
        match self {
            Metric::Jaccard => 0.45,
            Metric::Tfidf => 0.5,
            Metric::Char3gram => 0.6,
            Metric::Bleu => 0.35,
        }
    }

    /// A scorer for comparing sentences of `src` and `tgt`; tf-idf is fitted on the pair.
    pub fn scorer(self, src: &DocVersion, tgt: &DocVersion) -> Result<Scorer> {
        Ok(match self {
            Metric::Jaccard => Scorer::Jaccard,
            Metric::Char3gram => Scorer::CharNgram(3),
            Metric::Bleu => Scorer::Bleu,
            Metric::Tfidf => Scorer::Tfidf(build_idf([src, tgt])?),
        })
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric `{s}`")))
    }
}

pub trait SentenceSimilarity: Sync {
    fn similarity(&self, a: &Sentence, b: &Sentence) -> f64;
}

impl<F> SentenceSimilarity for F
where
    F: Fn(&Sentence, &Sentence) -> f64 + Sync,
{
    fn similarity(&self, a: &Sentence, b: &Sentence) -> f64 {
        self(a, b)
    }
}

#[derive(Debug, Clone)]
pub enum Scorer {
    Jaccard,
    CharNgram(usize),
    Tfidf(IdfModel),
    Bleu,
}

impl SentenceSimilarity for Scorer {
    fn similarity(&self, a: &Sentence, b: &Sentence) -> f64 {
        match self {
            Scorer::Jaccard => jaccard(a, b),
            Scorer::CharNgram(n) => char_ngram_sim(a, b, (*n).max(1)).unwrap_or(0.0),
            Scorer::Tfidf(m) => tfidf_sim(a, b, m),
            Scorer::Bleu => bleu_sim(a, b),
        }
    }
}
