//! Versioned document model.
//!
//! An [`ArticleGroup`] holds every posted version of one paper. Each
//! [`DocVersion`] is a sequence of paragraphs, each paragraph a sequence of
//! pre-segmented sentences. Inline markers (`[REF]`, `[CIT]`, `[MATH]`,
//! `[EQN]`) are already substituted in the sentence text and survive
//! tokenization as single tokens.
//!
//! Skip flags are computed on construction. A sentence is skipped when it
//! fails the sentence filter or sits in a skipped paragraph; skipped
//! sentences stay in the model but never take part in alignment.

mod json;
mod skip;
mod tokenize;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use json::{parse_corpus, parse_released_corpus, serialize_corpus};
pub use skip::{paragraph_skip_filter, sentence_skip_filter, special_fraction};
pub use tokenize::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Reference,
    Citation,
    InlineMath,
    BlockMath,
    Punctuation,
}

impl TokenKind {
    /// Reference, citation and math markers.
    pub fn is_special(self) -> bool {
        matches!(
            self,
            TokenKind::Reference | TokenKind::Citation | TokenKind::InlineMath | TokenKind::BlockMath
        )
    }

    pub fn marker(self) -> Option<&'static str> {
        match self {
            TokenKind::Reference => Some("[REF]"),
            TokenKind::Citation => Some("[CIT]"),
            TokenKind::InlineMath => Some("[MATH]"),
            TokenKind::BlockMath => Some("[EQN]"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn new(surface: impl Into<String>, kind: TokenKind) -> Self {
        Token { surface: surface.into(), kind }
    }

    pub fn lowercase(&self) -> String {
        self.surface.to_lowercase()
    }
}

/// Sentence position: version index, paragraph index, sentence index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentenceId {
    pub version: u32,
    pub paragraph: usize,
    pub sentence: usize,
}

impl SentenceId {
    pub fn new(version: u32, paragraph: usize, sentence: usize) -> Self {
        SentenceId { version, paragraph, sentence }
    }
}

impl fmt::Display for SentenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}:{}.{}", self.version, self.paragraph, self.sentence)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: SentenceId,
    pub tokens: Vec<Token>,
    pub raw: String,
    pub skipped: bool,
}

impl Sentence {
    /// Tokenizes `raw` and applies the sentence filter.
    pub fn new(id: SentenceId, raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        let mut s = Sentence { id, tokens, raw, skipped: false };
        s.skipped = sentence_skip_filter(&s);
        s
    }

    /// A free-standing sentence outside any document, never skipped.
    pub fn from_text(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        Sentence { id: SentenceId::new(0, 0, 0), tokens: tokenize(&raw), raw, skipped: false }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Raw text with runs of whitespace collapsed; used for identity checks.
    pub fn normalized(&self) -> String {
        self.raw.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    pub fn is_identical_to(&self, other: &Sentence) -> bool {
        self.normalized() == other.normalized()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub index: usize,
    pub sentences: Vec<Sentence>,
    pub skipped: bool,
}

impl Paragraph {
    /// Builds a paragraph of version `version` at position `index`, computing skip flags.
    pub fn new<S: Into<String>>(version: u32, index: usize, sentences: impl IntoIterator<Item = S>) -> Self {
        let sentences = sentences
            .into_iter()
            .enumerate()
            .map(|(k, raw)| Sentence::new(SentenceId::new(version, index, k), raw))
            .collect();
        let mut p = Paragraph { index, sentences, skipped: false };
        p.skipped = paragraph_skip_filter(&p);
        if p.skipped {
            for s in &mut p.sentences {
                s.skipped = true;
            }
        }
        p
    }

    /// Sentences that take part in alignment.
    pub fn active_sentences(&self) -> impl Iterator<Item = &Sentence> + '_ {
        self.sentences.iter().filter(|s| !s.skipped)
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocVersion {
    pub version_index: u32,
    pub timestamp: i64,
    pub paragraphs: Vec<Paragraph>,
}

impl DocVersion {
    pub fn new<P, S>(version_index: u32, timestamp: i64, paragraphs: P) -> Self
    where
        P: IntoIterator,
        P::Item: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let paragraphs = paragraphs
            .into_iter()
            .enumerate()
            .map(|(i, sents)| Paragraph::new(version_index, i, sents))
            .collect();
        DocVersion { version_index, timestamp, paragraphs }
    }

    pub fn sentence(&self, id: SentenceId) -> Option<&Sentence> {
        if id.version != self.version_index {
            return None;
        }
        self.paragraphs.get(id.paragraph)?.sentences.get(id.sentence)
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> + '_ {
        self.paragraphs.iter().flat_map(|p| p.sentences.iter())
    }

    /// Non-skipped sentences in document order.
    pub fn active_sentences(&self) -> impl Iterator<Item = &Sentence> + '_ {
        self.sentences().filter(|s| !s.skipped)
    }

    pub fn active_paragraphs(&self) -> impl Iterator<Item = &Paragraph> + '_ {
        self.paragraphs.iter().filter(|p| !p.skipped)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subject {
    #[serde(rename = "physics")]
    Physics,
    #[serde(rename = "math")]
    Math,
    #[serde(rename = "cs")]
    Cs,
    #[serde(rename = "q-bio")]
    QBio,
    #[serde(rename = "q-fin")]
    QFin,
    #[serde(rename = "stat")]
    Stat,
    #[serde(rename = "other")]
    Other,
}

const PHYSICS_ARCHIVES: &[&str] = &[
    "physics", "astro-ph", "cond-mat", "gr-qc", "hep-ex", "hep-lat", "hep-ph", "hep-th", "math-ph",
    "nlin", "nucl-ex", "nucl-th", "quant-ph",
];

impl Subject {
    /// Maps a subject string or arXiv archive name (`hep-th`, `math.AG`, `cs.CL`) onto a subject.
    pub fn from_archive(s: &str) -> Subject {
        let s = s.trim().to_ascii_lowercase();
        let archive = s.split('.').next().unwrap_or("");
        match archive {
            "math" => Subject::Math,
            "cs" => Subject::Cs,
            "q-bio" => Subject::QBio,
            "q-fin" => Subject::QFin,
            "stat" => Subject::Stat,
            a if PHYSICS_ARCHIVES.contains(&a) => Subject::Physics,
            _ => Subject::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Subject::Physics => "physics",
            Subject::Math => "math",
            Subject::Cs => "cs",
            Subject::QBio => "q-bio",
            Subject::QFin => "q-fin",
            Subject::Stat => "stat",
            Subject::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleGroup {
    pub arxiv_id: String,
    pub subject: Subject,
    pub versions: Vec<DocVersion>,
}

impl ArticleGroup {
    pub fn version(&self, index: u32) -> Option<&DocVersion> {
        self.versions.iter().find(|v| v.version_index == index)
    }

    /// Adjacent version pairs `(v_k, v_{k+1})` in order.
    pub fn revisions(&self) -> impl Iterator<Item = (&DocVersion, &DocVersion)> + '_ {
        self.versions.windows(2).map(|w| (&w[0], &w[1]))
    }
}
