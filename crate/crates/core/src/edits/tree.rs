//! Bracketed constituency trees and phrase-level edit extraction.

use super::simple::{emit, link_regions, merge_overlapping, SpanPair};
use super::{Edit, Span, WordAlignment};
use crate::corpus::Sentence;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_LEVEL: usize = 2;

/// A constituency tree; leaves carry the token as their label and span one position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub span: Span,
}

impl ParseTree {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        self.span.len()
    }

    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.is_leaf() {
            out.push(&self.label);
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }

    /// For each leaf, the spans of the leaf and its ancestors up to the root.
    pub fn ancestor_spans(&self) -> Vec<Vec<Span>> {
        let mut out = vec![Vec::new(); self.leaf_count()];
        let mut path = Vec::new();
        self.walk(&mut path, &mut out);
        out
    }

    fn walk(&self, path: &mut Vec<Span>, out: &mut [Vec<Span>]) {
        path.push(self.span);
        if self.is_leaf() {
            out[self.span.start] = path.iter().rev().copied().collect();
        }
        for c in &self.children {
            c.walk(path, out);
        }
        path.pop();
    }
}

#[derive(Debug, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
    End,
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
    leaves: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, position: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::TreeParse { position, message: message.into() })
    }

    /// Next lexeme and its starting byte offset.
    fn next(&mut self) -> (Lexeme<'a>, usize) {
        let rest = &self.text[self.pos..];
        let skipped = rest.len() - rest.trim_start().len();
        self.pos += skipped;
        let start = self.pos;
        let rest = &self.text[start..];
        match rest.chars().next() {
            None => (Lexeme::End, start),
            Some('(') => {
                self.pos += 1;
                (Lexeme::Open, start)
            }
            Some(')') => {
                self.pos += 1;
                (Lexeme::Close, start)
            }
            Some(_) => {
                let len = rest.find(|c: char| c.is_whitespace() || c == '(' || c == ')').unwrap_or(rest.len());
                self.pos += len;
                (Lexeme::Atom(&rest[..len]), start)
            }
        }
    }

    /// Parses a node whose opening bracket was just consumed.
    fn node(&mut self, open_at: usize) -> Result<ParseTree> {
        let label = match self.next() {
            (Lexeme::Atom(a), _) => a.to_string(),
            (Lexeme::End, at) => return self.err(at, "unexpected end of input"),
            (_, at) => return self.err(at, "empty label"),
        };
        let start = self.leaves;
        let mut children = Vec::new();
        loop {
            match self.next() {
                (Lexeme::Open, at) => children.push(self.node(at)?),
                (Lexeme::Atom(a), _) => {
                    children.push(ParseTree { label: a.to_string(), children: Vec::new(), span: Span::new(self.leaves, self.leaves + 1) });
                    self.leaves += 1;
                }
                (Lexeme::Close, at) => {
                    if children.is_empty() {
                        return self.err(at, format!("node `{label}` opened at {open_at} has no children"));
                    }
                    return Ok(ParseTree { label, children, span: Span::new(start, self.leaves) });
                }
                (Lexeme::End, at) => return self.err(at, format!("unclosed `({label}` opened at {open_at}")),
            }
        }
    }
}

/// Reads one tree in `(label child ...)` notation.
pub fn parse_tree_read(text: &str) -> Result<ParseTree> {
    let mut r = Reader { text, pos: 0, leaves: 0 };
    let tree = match r.next() {
        (Lexeme::Open, at) => r.node(at)?,
        (Lexeme::End, at) => return r.err(at, "empty input"),
        (_, at) => return r.err(at, "expected `(`"),
    };
    match r.next() {
        (Lexeme::End, _) => Ok(tree),
        (_, at) => r.err(at, "trailing input after tree"),
    }
}

/// Level pairs in search order: lowest maximum level first, then lowest sum, then source level.
fn level_pairs(max_level: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..=max_level).flat_map(|a| (0..=max_level).map(move |b| (a, b))).collect();
    pairs.sort_by_key(|&(a, b)| (a.max(b), a + b, a));
    pairs
}

/// Every link touching either span stays inside both, and no outside link crosses the pair.
fn conflict_free(s: Span, t: Span, wa: &WordAlignment) -> bool {
    wa.links.iter().all(|&(i, j)| match (s.contains(i), t.contains(j)) {
        (true, true) => true,
        (false, false) => (i < s.start && j < t.start) || (i >= s.end && j >= t.end),
        _ => false,
    })
}

/// Extraction with span pairs grown along the two trees.
///
/// Links inside non-identical regions of the simple method ascend at most
/// `max_level` levels in each tree to the lowest conflict-free ancestor
/// pair; resolved pairs are unioned with the simple regions. Links that no
/// pair within reach resolves keep their simple treatment, so `max_level`
/// 0 gives the simple method's output.
pub fn edits_with_parse(
    src: &Sentence,
    tgt: &Sentence,
    wa: &WordAlignment,
    src_tree: &ParseTree,
    tgt_tree: &ParseTree,
    max_level: usize,
) -> Result<Vec<Edit>> {
    for (tree, sent, side) in [(src_tree, src, "source"), (tgt_tree, tgt, "target")] {
        if tree.leaf_count() != sent.len() {
            return Err(Error::LengthMismatch(format!(
                "{side} tree has {} leaves, sentence has {} tokens",
                tree.leaf_count(),
                sent.len()
            )));
        }
    }
    wa.validate(src.len(), tgt.len())?;

    let regions = link_regions(wa);
    let src_up = src_tree.ancestor_spans();
    let tgt_up = tgt_tree.ancestor_spans();
    let order = level_pairs(max_level);
    let surfaces = |sent: &Sentence, span: Span| -> Vec<String> {
        sent.tokens[span.range()].iter().map(|t| t.surface.clone()).collect()
    };

    let mut candidates: Vec<SpanPair> = regions.clone();
    for &(rs, rt) in &regions {
        if surfaces(src, rs) == surfaces(tgt, rt) {
            continue;
        }
        for &(i, j) in wa.links.iter().filter(|(i, _)| rs.contains(*i)) {
            let resolved = order
                .iter()
                .filter_map(|&(a, b)| Some((*src_up[i].get(a)?, *tgt_up[j].get(b)?)))
                .find(|&(s, t)| conflict_free(s, t, wa));
            candidates.extend(resolved);
        }
    }
    Ok(emit(&merge_overlapping(candidates), src, tgt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edits::edits_from_alignment_simple;

    #[test]
    fn reads_simple_tree() {
        let t = parse_tree_read("(S (NP a) (VP b))").unwrap();
        assert_eq!(t.span, Span::new(0, 2));
        assert_eq!(t.leaves(), ["a", "b"]);
        assert_eq!(t.children[1].span, Span::new(1, 2));
        assert_eq!(t.children[1].children[0].label, "b");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_tree_read("(S a").unwrap_err();
        assert!(matches!(err, Error::TreeParse { position: 4, .. }), "{err}");
        assert!(matches!(parse_tree_read("( (S a))"), Err(Error::TreeParse { position: 2, .. })));
        assert!(matches!(parse_tree_read("(S a))"), Err(Error::TreeParse { position: 5, .. })));
        assert!(matches!(parse_tree_read("(S (NP) a)"), Err(Error::TreeParse { position: 6, .. })));
        assert!(parse_tree_read("   ").is_err());
        assert!(parse_tree_read("a").is_err());
    }

    #[test]
    fn ancestor_chains() {
        let t = parse_tree_read("(S (NP (DT the) (NN cat)) (VP sat))").unwrap();
        let up = t.ancestor_spans();
        assert_eq!(up[0], [Span::new(0, 1), Span::new(0, 1), Span::new(0, 2), Span::new(0, 3)]);
        assert_eq!(up[2], [Span::new(2, 3), Span::new(2, 3), Span::new(0, 3)]);
    }

    #[test]
    fn level_order() {
        assert_eq!(level_pairs(1), [(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(&level_pairs(2)[4..], [(0, 2), (2, 0), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn crossing_phrase_becomes_one_substitute() {
        // "quickly ran" -> "sprinted fast": crossing word links inside one verb phrase each
        let src = Sentence::from_text("the dog quickly ran home");
        let tgt = Sentence::from_text("the dog sprinted fast home");
        let wa = WordAlignment::new([(0, 0), (1, 1), (2, 3), (3, 2), (4, 4)]);
        let ts = parse_tree_read("(S (NP (DT the) (NN dog)) (VP (ADVP (RB quickly)) (VBD ran)) (NP home))").unwrap();
        let tt = parse_tree_read("(S (NP (DT the) (NN dog)) (VP (VBD sprinted) (ADVP (RB fast))) (NP home))").unwrap();

        let simple = edits_from_alignment_simple(&src, &tgt, &wa).unwrap();
        assert_eq!(simple.len(), 2);
        assert_eq!(edits_with_parse(&src, &tgt, &wa, &ts, &tt, 0).unwrap(), simple);
        // reaching the VP nodes takes two levels on the source side
        assert_eq!(edits_with_parse(&src, &tgt, &wa, &ts, &tt, 1).unwrap(), simple);
        assert_eq!(edits_with_parse(&src, &tgt, &wa, &ts, &tt, 2).unwrap(), [Edit::substitute(Span::new(2, 4), Span::new(2, 4))]);
    }

    #[test]
    fn tree_length_mismatch() {
        let s = Sentence::from_text("a b c");
        let t = parse_tree_read("(S a b)").unwrap();
        let wa = WordAlignment::default();
        assert!(matches!(edits_with_parse(&s, &s, &wa, &t, &t, 2), Err(Error::LengthMismatch(_))));
    }
}
