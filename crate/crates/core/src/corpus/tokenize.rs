use super::{Token, TokenKind};

const MARKERS: [(&str, TokenKind); 4] = [
    ("[REF]", TokenKind::Reference),
    ("[CIT]", TokenKind::Citation),
    ("[MATH]", TokenKind::InlineMath),
    ("[EQN]", TokenKind::BlockMath),
];

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c, '“' | '”' | '‘' | '’' | '–' | '—' | '…' | '«' | '»' | '·' | '′' | '″')
}

fn marker_at(s: &str) -> Option<(&'static str, TokenKind)> {
    MARKERS.iter().copied().find(|(m, _)| s.starts_with(m))
}

/// Splits `text` into tokens.
///
/// Whitespace separates chunks. Within a chunk, markers are emitted whole,
/// leading and trailing punctuation characters become one token each, and
/// whatever remains is a word (internal punctuation such as `e.g` or `1.5`
/// stays inside the word).
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        split_chunk(chunk, &mut out);
    }
    out
}

fn split_chunk(mut rest: &str, out: &mut Vec<Token>) {
    while !rest.is_empty() {
        if let Some((m, kind)) = marker_at(rest) {
            out.push(Token::new(m, kind));
            rest = &rest[m.len()..];
            continue;
        }
        let c = rest.chars().next().expect("non-empty");
        if is_punct(c) {
            out.push(Token::new(c.to_string(), TokenKind::Punctuation));
            rest = &rest[c.len_utf8()..];
            continue;
        }
        // word body runs until the next marker or the end of the chunk
        let end = rest
            .char_indices()
            .find(|&(i, _)| i > 0 && marker_at(&rest[i..]).is_some())
            .map_or(rest.len(), |(i, _)| i);
        let body = &rest[..end];
        let trimmed = body.trim_end_matches(is_punct);
        out.push(Token::new(trimmed, TokenKind::Word));
        for c in body[trimmed.len()..].chars() {
            out.push(Token::new(c.to_string(), TokenKind::Punctuation));
        }
        rest = &rest[end..];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn whitespace_split() {
        assert_eq!(surfaces("Note that ."), ["Note", "that", "."]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n\t").is_empty());
    }

    #[test]
    fn markers_pass_through() {
        let kinds: Vec<_> = tokenize("see [REF] .").into_iter().map(|t| t.kind).collect();
        assert_eq!(kinds, [TokenKind::Word, TokenKind::Reference, TokenKind::Punctuation]);
        let kinds: Vec<_> = tokenize("[CIT] [MATH] [EQN]").into_iter().map(|t| t.kind).collect();
        assert_eq!(kinds, [TokenKind::Citation, TokenKind::InlineMath, TokenKind::BlockMath]);
    }

    #[test]
    fn golden_punctuation_split() {
        assert_eq!(surfaces("Fig. [REF] , the"), ["Fig", ".", "[REF]", ",", "the"]);
        assert_eq!(surfaces("(see e.g. [CIT])."), ["(", "see", "e.g", ".", "[CIT]", ")", "."]);
        assert_eq!(surfaces("value 1.5,"), ["value", "1.5", ","]);
        assert_eq!(surfaces("model[REF]"), ["model", "[REF]"]);
        assert_eq!(surfaces("don't"), ["don't"]);
        assert_eq!(surfaces("[REF"), ["[", "REF"]);
    }

    proptest! {
        #[test]
        fn retokenizing_joined_surfaces_is_idempotent(text in "[a-zA-Z0-9 .,;:()\\[\\]'-]{0,40}|([a-z]+ |\\[REF\\]|\\[MATH\\]|[.,(])*") {
            let first = tokenize(&text);
            let joined = first.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
            prop_assert_eq!(tokenize(&joined), first.clone());
            prop_assert!(first.iter().all(|t| !t.surface.is_empty()));
        }

        #[test]
        fn tokenize_is_deterministic(text in "\\PC{0,60}") {
            prop_assert_eq!(tokenize(&text), tokenize(&text));
        }
    }
}
