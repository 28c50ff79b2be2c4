use super::{Paragraph, Sentence, Token};

const MAX_SENTENCE_CHARS: usize = 1000;
const MIN_SENTENCE_TOKENS: usize = 3;
const MAX_SENTENCE_SPECIAL: f64 = 0.6;
const MIN_ENGLISH_CHARS: f64 = 0.7;
const MIN_PARAGRAPH_TOKENS: usize = 10;
const MAX_PARAGRAPH_SPECIAL: f64 = 0.3;

/// Fraction of tokens that are reference, citation or math markers.
pub fn special_fraction<'a>(tokens: impl IntoIterator<Item = &'a Token>) -> f64 {
    let (special, total) = tokens
        .into_iter()
        .fold((0usize, 0usize), |(s, n), t| (s + usize::from(t.kind.is_special()), n + 1));
    if total == 0 {
        0.0
    } else {
        special as f64 / total as f64
    }
}

/// ASCII letters over non-whitespace characters.
fn english_fraction(raw: &str) -> f64 {
    let (letters, total) = raw
        .chars()
        .filter(|c| !c.is_whitespace())
        .fold((0usize, 0usize), |(l, n), c| (l + usize::from(c.is_ascii_alphabetic()), n + 1));
    if total == 0 {
        0.0
    } else {
        letters as f64 / total as f64
    }
}

/// True when the sentence should be left out of alignment.
///
/// Length is measured on the raw text after marker substitution.
pub fn sentence_skip_filter(s: &Sentence) -> bool {
    let raw = s.raw.trim_end();
    s.raw.chars().count() > MAX_SENTENCE_CHARS
        || s.tokens.len() <= MIN_SENTENCE_TOKENS
        || special_fraction(&s.tokens) > MAX_SENTENCE_SPECIAL
        || english_fraction(&s.raw) < MIN_ENGLISH_CHARS
        || raw.ends_with(',')
        || raw.ends_with(':')
}

pub fn paragraph_skip_filter(p: &Paragraph) -> bool {
    let tokens = p.sentences.iter().flat_map(|s| s.tokens.iter());
    p.token_count() < MIN_PARAGRAPH_TOKENS || special_fraction(tokens) > MAX_PARAGRAPH_SPECIAL
}
