//! Span-level edits within one sentence revision.

mod diff;
mod reorder;
mod simple;
mod tree;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::intention::Intention;

pub use diff::{diff_edits, diff_to_edits, myers_diff, DiffOp, DiffRun, EditScript};
pub use reorder::derive_reorder;
pub use simple::{edits_from_alignment_simple, strip_identical_boundaries};
pub use tree::{edits_with_parse, parse_tree_read, ParseTree, DEFAULT_MAX_LEVEL};

/// Half-open token range `[start, end)`, serialized as `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    /// Panics on an empty or inverted range.
    pub fn new(start: usize, end: usize) -> Span {
        assert!(start < end, "empty span [{start}, {end})");
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn hull(&self, other: &Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

impl TryFrom<[usize; 2]> for Span {
    type Error = String;

    fn try_from([start, end]: [usize; 2]) -> Result<Self, String> {
        if start < end {
            Ok(Span { start, end })
        } else {
            Err(format!("span [{start}, {end}] is empty"))
        }
    }
}

impl From<Span> for [usize; 2] {
    fn from(s: Span) -> Self {
        [s.start, s.end]
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Insert,
    Delete,
    Substitute,
    Reorder,
}

impl EditKind {
    pub const ALL: [EditKind; 4] = [EditKind::Insert, EditKind::Delete, EditKind::Substitute, EditKind::Reorder];

    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::Insert => "insert",
            EditKind::Delete => "delete",
            EditKind::Substitute => "substitute",
            EditKind::Reorder => "reorder",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edit {
    pub src: Option<Span>,
    pub tgt: Option<Span>,
    pub kind: EditKind,
    #[serde(default)]
    pub intention: Option<Intention>,
}

impl Edit {
    pub fn insert(tgt: Span) -> Edit {
        Edit { src: None, tgt: Some(tgt), kind: EditKind::Insert, intention: None }
    }

    pub fn delete(src: Span) -> Edit {
        Edit { src: Some(src), tgt: None, kind: EditKind::Delete, intention: None }
    }

    pub fn substitute(src: Span, tgt: Span) -> Edit {
        Edit { src: Some(src), tgt: Some(tgt), kind: EditKind::Substitute, intention: None }
    }

    pub fn reorder(src: Span, tgt: Span) -> Edit {
        Edit { src: Some(src), tgt: Some(tgt), kind: EditKind::Reorder, intention: None }
    }

    /// The part of an edit that matching and exact match compare.
    pub fn key(&self) -> (Option<Span>, Option<Span>, EditKind) {
        (self.src, self.tgt, self.kind)
    }

    pub fn src_surfaces<'a>(&self, src: &'a Sentence) -> Vec<&'a str> {
        self.src.map_or_else(Vec::new, |s| src.tokens[s.range()].iter().map(|t| t.surface.as_str()).collect())
    }

    pub fn tgt_surfaces<'a>(&self, tgt: &'a Sentence) -> Vec<&'a str> {
        self.tgt.map_or_else(Vec::new, |s| tgt.tokens[s.range()].iter().map(|t| t.surface.as_str()).collect())
    }

    /// Checks bounds and the kind/span consistency rules.
    pub fn validate(&self, src: &Sentence, tgt: &Sentence) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(format!("edit {self:?}: {msg}")));
        for (span, len, side) in [(self.src, src.len(), "src"), (self.tgt, tgt.len(), "tgt")] {
            if let Some(s) = span {
                if s.is_empty() {
                    return bad(format!("{side} span is empty"));
                }
                if s.end > len {
                    return Err(Error::OutOfBounds(format!("{side} span {s} exceeds {len} tokens")));
                }
            }
        }
        match (self.kind, self.src, self.tgt) {
            (EditKind::Insert, None, Some(_)) | (EditKind::Delete, Some(_), None) => Ok(()),
            (EditKind::Substitute, Some(_), Some(_)) => {
                if self.src_surfaces(src) == self.tgt_surfaces(tgt) {
                    bad("substitute spans have identical surfaces".into())
                } else {
                    Ok(())
                }
            }
            (EditKind::Reorder, Some(_), Some(_)) => {
                if self.src_surfaces(src) == self.tgt_surfaces(tgt) {
                    Ok(())
                } else {
                    bad("reorder spans differ in surface".into())
                }
            }
            _ => bad("span presence does not match kind".into()),
        }
    }
}

/// Checks every edit and that source spans, and target spans, are pairwise disjoint.
pub fn validate_edit_set(edits: &[Edit], src: &Sentence, tgt: &Sentence) -> Result<()> {
    for e in edits {
        e.validate(src, tgt)?;
    }
    for side in [0, 1] {
        let mut spans: Vec<Span> =
            edits.iter().filter_map(|e| if side == 0 { e.src } else { e.tgt }).collect();
        spans.sort();
        if let Some(w) = spans.windows(2).find(|w| w[0].overlaps(&w[1])) {
            let name = if side == 0 { "src" } else { "tgt" };
            return Err(Error::Validation(format!("overlapping {name} spans {} and {}", w[0], w[1])));
        }
    }
    Ok(())
}

/// Sorts edits into the canonical order used in output files.
pub fn canonical(mut edits: Vec<Edit>) -> Vec<Edit> {
    edits.sort();
    edits.dedup();
    edits
}

/// A source/target sentence pair with its extracted edits and, optionally, gold answers.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRevision {
    pub id: String,
    pub src: Sentence,
    pub tgt: Sentence,
    pub edits: Vec<Edit>,
    pub gold_alternatives: Option<Vec<Vec<Edit>>>,
}

impl SentenceRevision {
    pub fn new(id: impl Into<String>, src: Sentence, tgt: Sentence) -> Self {
        SentenceRevision { id: id.into(), src, tgt, edits: Vec::new(), gold_alternatives: None }
    }

    pub fn validate(&self) -> Result<()> {
        validate_edit_set(&self.edits, &self.src, &self.tgt)?;
        if let Some(alts) = &self.gold_alternatives {
            if alts.is_empty() {
                return Err(Error::Validation(format!("revision {}: gold alternatives are empty", self.id)));
            }
            for alt in alts {
                validate_edit_set(alt, &self.src, &self.tgt)?;
            }
        }
        Ok(())
    }
}

/// On-disk form of a revision: raw sentence strings plus edits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevisionRecord {
    pub id: String,
    pub src: String,
    pub tgt: String,
    #[serde(default)]
    pub edits: Vec<Edit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_alternatives: Option<Vec<Vec<Edit>>>,
}

impl RevisionRecord {
    pub fn from_revision(r: &SentenceRevision) -> Self {
        RevisionRecord {
            id: r.id.clone(),
            src: r.src.raw.clone(),
            tgt: r.tgt.raw.clone(),
            edits: r.edits.clone(),
            gold_alternatives: r.gold_alternatives.clone(),
        }
    }

    pub fn into_revision(self) -> Result<SentenceRevision> {
        let r = SentenceRevision {
            src: Sentence::from_text(self.src),
            tgt: Sentence::from_text(self.tgt),
            id: self.id,
            edits: self.edits,
            gold_alternatives: self.gold_alternatives,
        };
        r.validate()?;
        Ok(r)
    }
}

/// Token-index links between a source and a target sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WordAlignment {
    pub links: BTreeSet<(usize, usize)>,
}

impl WordAlignment {
    pub fn new(links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        WordAlignment { links: links.into_iter().collect() }
    }

    /// Identity links between positions with equal surfaces along a diff's kept runs.
    pub fn from_diff(src: &Sentence, tgt: &Sentence) -> Self {
        let a: Vec<&str> = src.surfaces().collect();
        let b: Vec<&str> = tgt.surfaces().collect();
        let script = myers_diff(&a, &b);
        let (mut i, mut j) = (0, 0);
        let mut links = BTreeSet::new();
        for run in &script.runs {
            match run.op {
                DiffOp::Keep => {
                    links.extend((0..run.len).map(|k| (i + k, j + k)));
                    i += run.len;
                    j += run.len;
                }
                DiffOp::Delete => i += run.len,
                DiffOp::Insert => j += run.len,
            }
        }
        WordAlignment { links }
    }

    /// Parses one line of `i-j` pairs.
    pub fn parse_pharaoh(line: &str) -> Result<Self> {
        let mut links = BTreeSet::new();
        for item in line.split_whitespace() {
            let parsed = item
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)));
            match parsed {
                Some(link) => {
                    links.insert(link);
                }
                None => return Err(Error::InvalidArgument(format!("malformed alignment link `{item}`"))),
            }
        }
        Ok(WordAlignment { links })
    }

    pub fn to_pharaoh(&self) -> String {
        self.links.iter().map(|(i, j)| format!("{i}-{j}")).collect::<Vec<_>>().join(" ")
    }

    pub fn validate(&self, src_len: usize, tgt_len: usize) -> Result<()> {
        match self.links.iter().find(|&&(i, j)| i >= src_len || j >= tgt_len) {
            Some((i, j)) => Err(Error::OutOfBounds(format!(
                "link {i}-{j} outside a {src_len}-token source / {tgt_len}-token target"
            ))),
            None => Ok(()),
        }
    }
}

/// Reads one alignment per line in Pharaoh notation.
pub fn read_pharaoh_lines(text: &str) -> Result<Vec<WordAlignment>> {
    text.lines()
        .enumerate()
        .map(|(n, l)| {
            WordAlignment::parse_pharaoh(l).map_err(|e| Error::InvalidArgument(format!("line {}: {e}", n + 1)))
        })
        .collect()
}

/// Reads a JSON array with one list of `[i, j]` links per sentence pair.
pub fn read_alignment_json(bytes: &[u8]) -> Result<Vec<WordAlignment>> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence {
        Sentence::from_text(text)
    }

    #[test]
    fn edit_json_shape() {
        let e = Edit::substitute(Span::new(0, 1), Span::new(0, 2));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"src":[0,1],"tgt":[0,2],"kind":"substitute","intention":null}"#);
        let back: Edit = serde_json::from_str(r#"{"src":null,"tgt":[3,4],"kind":"insert"}"#).unwrap();
        assert_eq!(back, Edit::insert(Span::new(3, 4)));
        assert!(serde_json::from_str::<Edit>(r#"{"src":[2,2],"tgt":null,"kind":"delete"}"#).is_err());
    }

    #[test]
    fn invariants_are_checked() {
        let (a, b) = (s("the big cat"), s("the small cat"));
        assert!(Edit::substitute(Span::new(1, 2), Span::new(1, 2)).validate(&a, &b).is_ok());
        assert!(Edit::substitute(Span::new(0, 1), Span::new(0, 1)).validate(&a, &b).is_err());
        assert!(Edit::reorder(Span::new(0, 1), Span::new(0, 1)).validate(&a, &b).is_ok());
        assert!(Edit::delete(Span::new(2, 4)).validate(&a, &b).is_err());
        let bad = Edit { src: None, tgt: Some(Span::new(0, 1)), kind: EditKind::Delete, intention: None };
        assert!(bad.validate(&a, &b).is_err());
        let overlapping = [Edit::delete(Span::new(0, 2)), Edit::substitute(Span::new(1, 2), Span::new(1, 2))];
        assert!(validate_edit_set(&overlapping, &a, &b).is_err());
    }

    #[test]
    fn pharaoh_round_trip() {
        let wa = WordAlignment::parse_pharaoh("0-0 2-1  1-1").unwrap();
        assert_eq!(wa.to_pharaoh(), "0-0 1-1 2-1");
        assert!(WordAlignment::parse_pharaoh("0-0 1x1").is_err());
        assert!(wa.validate(3, 2).is_ok());
        assert!(matches!(wa.validate(2, 2), Err(Error::OutOfBounds(_))));
        let lines = read_pharaoh_lines("0-0\n\n1-2 0-1\n").unwrap();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].links.is_empty());
        let err = read_pharaoh_lines("0-0\nbad").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn alignment_json() {
        let v = read_alignment_json(b"[[[0,0],[1,2]],[]]").unwrap();
        assert_eq!(v[0], WordAlignment::new([(0, 0), (1, 2)]));
        let err = read_alignment_json(b"[[[0,\"x\"]]]").unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "[0][0][1]"), "{err}");
    }

    #[test]
    fn record_round_trip() {
        let mut r = SentenceRevision::new("a:v1-v2:0.0-0.0", s("Not that the investigator"), s("Note that the investigator"));
        r.edits.push(Edit::substitute(Span::new(0, 1), Span::new(0, 1)));
        r.gold_alternatives = Some(vec![r.edits.clone()]);
        let rec = RevisionRecord::from_revision(&r);
        let json = serde_json::to_string(&rec).unwrap();
        let back: RevisionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_revision().unwrap(), r);
        let mut empty_alts = rec.clone();
        empty_alts.gold_alternatives = Some(vec![]);
        assert!(empty_alts.into_revision().is_err());
    }
}
