//! Edit intention taxonomy, prediction ingestion and a rule baseline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{Sentence, TokenKind};
use crate::edits::{Edit, EditKind, SentenceRevision};
use crate::error::{Error, Result};

/// Seven-way fine-grained intention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntentionLabel {
    LangMoreAccurate,
    LangStyle,
    LangSimplify,
    LangOther,
    GrammarTypo,
    UpdateContent,
    AdjustFormat,
}

/// Four-way scheme with the language sub-types collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoarseIntention {
    ImproveLanguage,
    GrammarTypo,
    UpdateContent,
    AdjustFormat,
}

impl IntentionLabel {
    pub const ALL: [IntentionLabel; 7] = [
        IntentionLabel::LangMoreAccurate,
        IntentionLabel::LangStyle,
        IntentionLabel::LangSimplify,
        IntentionLabel::LangOther,
        IntentionLabel::GrammarTypo,
        IntentionLabel::UpdateContent,
        IntentionLabel::AdjustFormat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IntentionLabel::LangMoreAccurate => "Lang-More-Accurate",
            IntentionLabel::LangStyle => "Lang-Style",
            IntentionLabel::LangSimplify => "Lang-Simplify",
            IntentionLabel::LangOther => "Lang-Other",
            IntentionLabel::GrammarTypo => "Grammar-Typo",
            IntentionLabel::UpdateContent => "Update-Content",
            IntentionLabel::AdjustFormat => "Adjust-Format",
        }
    }

    fn snake(self) -> &'static str {
        match self {
            IntentionLabel::LangMoreAccurate => "lang_more_accurate",
            IntentionLabel::LangStyle => "lang_style",
            IntentionLabel::LangSimplify => "lang_simplify",
            IntentionLabel::LangOther => "lang_other",
            IntentionLabel::GrammarTypo => "grammar_typo",
            IntentionLabel::UpdateContent => "update_content",
            IntentionLabel::AdjustFormat => "adjust_format",
        }
    }

    pub fn parse(s: &str) -> Option<IntentionLabel> {
        IntentionLabel::ALL.into_iter().find(|l| l.as_str() == s || l.snake() == s)
    }
}

impl CoarseIntention {
    pub const ALL: [CoarseIntention; 4] = [
        CoarseIntention::ImproveLanguage,
        CoarseIntention::GrammarTypo,
        CoarseIntention::UpdateContent,
        CoarseIntention::AdjustFormat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CoarseIntention::ImproveLanguage => "Improve-Language",
            CoarseIntention::GrammarTypo => "Grammar-Typo",
            CoarseIntention::UpdateContent => "Update-Content",
            CoarseIntention::AdjustFormat => "Adjust-Format",
        }
    }

    fn snake(self) -> &'static str {
        match self {
            CoarseIntention::ImproveLanguage => "improve_language",
            CoarseIntention::GrammarTypo => "grammar_typo",
            CoarseIntention::UpdateContent => "update_content",
            CoarseIntention::AdjustFormat => "adjust_format",
        }
    }

    pub fn parse(s: &str) -> Option<CoarseIntention> {
        CoarseIntention::ALL.into_iter().find(|l| l.as_str() == s || l.snake() == s)
    }

    /// A fine label projecting back onto this class.
    pub fn representative(self) -> IntentionLabel {
        match self {
            CoarseIntention::ImproveLanguage => IntentionLabel::LangOther,
            CoarseIntention::GrammarTypo => IntentionLabel::GrammarTypo,
            CoarseIntention::UpdateContent => IntentionLabel::UpdateContent,
            CoarseIntention::AdjustFormat => IntentionLabel::AdjustFormat,
        }
    }
}

pub fn coarse_of(l: IntentionLabel) -> CoarseIntention {
    match l {
        IntentionLabel::LangMoreAccurate
        | IntentionLabel::LangStyle
        | IntentionLabel::LangSimplify
        | IntentionLabel::LangOther => CoarseIntention::ImproveLanguage,
        IntentionLabel::GrammarTypo => CoarseIntention::GrammarTypo,
        IntentionLabel::UpdateContent => CoarseIntention::UpdateContent,
        IntentionLabel::AdjustFormat => CoarseIntention::AdjustFormat,
    }
}

/// An intention attached to an edit, in either scheme.
///
/// Serialized as its label string; strings shared by both schemes read as fine labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Intention {
    Fine(IntentionLabel),
    Coarse(CoarseIntention),
}

impl Intention {
    pub fn as_str(self) -> &'static str {
        match self {
            Intention::Fine(l) => l.as_str(),
            Intention::Coarse(c) => c.as_str(),
        }
    }

    pub fn coarse(self) -> CoarseIntention {
        match self {
            Intention::Fine(l) => coarse_of(l),
            Intention::Coarse(c) => c,
        }
    }
}

impl fmt::Display for Intention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Intention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntentionLabel::parse(s)
            .map(Intention::Fine)
            .or_else(|| CoarseIntention::parse(s).map(Intention::Coarse))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl Serialize for Intention {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Intention {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelScheme {
    /// Seven fine classes.
    #[default]
    Fine,
    /// Four coarse classes; fine strings are accepted and projected.
    Coarse,
}

impl LabelScheme {
    pub fn parse_label(self, s: &str) -> Result<Intention> {
        match self {
            LabelScheme::Fine => IntentionLabel::parse(s).map(Intention::Fine),
            LabelScheme::Coarse => CoarseIntention::parse(s)
                .or_else(|| IntentionLabel::parse(s).map(coarse_of))
                .map(Intention::Coarse),
        }
        .ok_or_else(|| Error::UnknownLabel(format!("`{s}` is not a {self:?} label")))
    }

    pub fn labels(self) -> Vec<&'static str> {
        match self {
            LabelScheme::Fine => IntentionLabel::ALL.iter().map(|l| l.as_str()).collect(),
            LabelScheme::Coarse => CoarseIntention::ALL.iter().map(|l| l.as_str()).collect(),
        }
    }
}

impl FromStr for LabelScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fine" | "7" => Ok(LabelScheme::Fine),
            "coarse" | "4" => Ok(LabelScheme::Coarse),
            _ => Err(Error::InvalidArgument(format!("unknown label scheme `{s}`"))),
        }
    }
}

const FORMAT_WORDS: [&str; 4] = ["figure", "fig", "table", "tab"];
const CONTENT_SPAN: usize = 7;
const TYPO_DISTANCE: usize = 2;

/// Deterministic fallback classifier.
///
/// Format-only changes first, then long insertions and deletions as content
/// updates, then near-identical single-token substitutions as typos.
pub fn rule_baseline_classify(e: &Edit, src: &Sentence, tgt: &Sentence) -> IntentionLabel {
    let tokens: Vec<_> = e
        .src
        .iter()
        .flat_map(|s| &src.tokens[s.range()])
        .chain(e.tgt.iter().flat_map(|t| &tgt.tokens[t.range()]))
        .collect();
    let formatting = |t: &&crate::corpus::Token| {
        t.kind.is_special() || t.kind == TokenKind::Punctuation || FORMAT_WORDS.contains(&t.lowercase().as_str())
    };
    if !tokens.is_empty() && tokens.iter().all(formatting) {
        return IntentionLabel::AdjustFormat;
    }
    let width = e.src.or(e.tgt).map_or(0, |s| s.len());
    if matches!(e.kind, EditKind::Insert | EditKind::Delete) && width >= CONTENT_SPAN {
        return IntentionLabel::UpdateContent;
    }
    if let (EditKind::Substitute, Some(s), Some(t)) = (e.kind, e.src, e.tgt) {
        if s.len() == 1
            && t.len() == 1
            && strsim::levenshtein(&src.tokens[s.start].surface, &tgt.tokens[t.start].surface) <= TYPO_DISTANCE
        {
            return IntentionLabel::GrammarTypo;
        }
    }
    IntentionLabel::LangOther
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionLine {
    revision_id: String,
    edit_index: usize,
    label: String,
}

/// Attaches labels from a JSON-lines prediction file.
///
/// Every edit must receive exactly one known label; otherwise nothing is
/// attached and the error lists each offending key.
pub fn ingest_predictions(jsonl: &str, revisions: &mut [SentenceRevision], scheme: LabelScheme) -> Result<()> {
    let mut labels: BTreeMap<(String, usize), Intention> = BTreeMap::new();
    let mut problems = Vec::new();
    let known: BTreeMap<&str, usize> = revisions.iter().map(|r| (r.id.as_str(), r.edits.len())).collect();

    for (n, line) in jsonl.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let de = &mut serde_json::Deserializer::from_str(line);
        let p: PredictionLine = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: format!("line {}: {}", n + 1, e.path()),
            message: e.inner().to_string(),
        })?;
        let key = format!("{}#{}", p.revision_id, p.edit_index);
        match known.get(p.revision_id.as_str()) {
            None => {
                problems.push(format!("{key}: unknown revision"));
                continue;
            }
            Some(&count) if p.edit_index >= count => {
                problems.push(format!("{key}: revision has {count} edits"));
                continue;
            }
            _ => {}
        }
        match scheme.parse_label(&p.label) {
            Ok(l) => {
                if labels.insert((p.revision_id, p.edit_index), l).is_some() {
                    problems.push(format!("{key}: duplicate label"));
                }
            }
            Err(e) => problems.push(format!("{key}: {e}")),
        }
    }
    let seen: BTreeSet<(&str, usize)> = labels.keys().map(|(r, i)| (r.as_str(), *i)).collect();
    for r in revisions.iter() {
        for i in 0..r.edits.len() {
            if !seen.contains(&(r.id.as_str(), i)) && !problems.iter().any(|p| p.starts_with(&format!("{}#{i}:", r.id))) {
                problems.push(format!("{}#{i}: missing label", r.id));
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Predictions(problems));
    }
    for r in revisions.iter_mut() {
        for (i, e) in r.edits.iter_mut().enumerate() {
            e.intention = labels.get(&(r.id.clone(), i)).copied();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edits::Span;

    fn s(text: &str) -> Sentence {
        Sentence::from_text(text)
    }

    #[test]
    fn coarse_projection() {
        assert_eq!(coarse_of(IntentionLabel::LangSimplify), CoarseIntention::ImproveLanguage);
        assert_eq!(coarse_of(IntentionLabel::AdjustFormat), CoarseIntention::AdjustFormat);
        let image: BTreeSet<_> = IntentionLabel::ALL.into_iter().map(coarse_of).collect();
        assert_eq!(image.len(), 4);
        for l in IntentionLabel::ALL {
            assert_eq!(coarse_of(coarse_of(l).representative()), coarse_of(l));
        }
    }

    #[test]
    fn label_strings() {
        for l in IntentionLabel::ALL {
            assert_eq!(l.as_str().parse::<Intention>().unwrap(), Intention::Fine(l));
            assert_eq!(IntentionLabel::parse(l.snake()), Some(l));
        }
        assert_eq!("Improve-Language".parse::<Intention>().unwrap(), Intention::Coarse(CoarseIntention::ImproveLanguage));
        assert!(LabelScheme::Fine.parse_label("Improve-Language").is_err());
        assert_eq!(
            LabelScheme::Coarse.parse_label("Improve-Language").unwrap(),
            Intention::Coarse(CoarseIntention::ImproveLanguage)
        );
        assert_eq!(
            LabelScheme::Coarse.parse_label("Lang-Style").unwrap(),
            Intention::Coarse(CoarseIntention::ImproveLanguage)
        );
        assert!("Typo".parse::<Intention>().is_err());
        let json = serde_json::to_string(&Intention::Fine(IntentionLabel::LangStyle)).unwrap();
        assert_eq!(json, "\"Lang-Style\"");
    }

    #[test]
    fn rule_baseline() {
        let (a2, b2) = (s("as shown in Figure 2"), s("as shown in Fig. 2"));
        let fig = Edit::substitute(Span::new(3, 4), Span::new(3, 5));
        assert_eq!(b2.tokens[3].surface, "Fig");
        assert_eq!(rule_baseline_classify(&fig, &a2, &b2), IntentionLabel::AdjustFormat);

        let long = s("We also report results on nine further benchmark datasets here");
        let ins = Edit::insert(Span::new(2, 10));
        assert_eq!(rule_baseline_classify(&ins, &s("We also"), &long), IntentionLabel::UpdateContent);

        let typo = Edit::substitute(Span::new(0, 1), Span::new(0, 1));
        let (n1, n2) = (s("Not that the investigator"), s("Note that the investigator"));
        assert_eq!(rule_baseline_classify(&typo, &n1, &n2), IntentionLabel::GrammarTypo);

        let (l1, l2) = (s("we use a method"), s("we employ a method"));
        let word = Edit::substitute(Span::new(1, 2), Span::new(1, 2));
        assert_eq!(rule_baseline_classify(&word, &l1, &l2), IntentionLabel::LangOther);
    }

    fn revisions() -> Vec<SentenceRevision> {
        let mut r = SentenceRevision::new("x:v1-v2:0.0-0.0", s("Not that the investigator"), s("Note that an investigator"));
        r.edits = vec![Edit::substitute(Span::new(0, 1), Span::new(0, 1)), Edit::substitute(Span::new(2, 3), Span::new(2, 3))];
        vec![r]
    }

    #[test]
    fn ingest_exact() {
        let mut revs = revisions();
        let file = "{\"revision_id\":\"x:v1-v2:0.0-0.0\",\"edit_index\":0,\"label\":\"Grammar-Typo\"}\n\
                    {\"revision_id\":\"x:v1-v2:0.0-0.0\",\"edit_index\":1,\"label\":\"Lang-Style\"}\n";
        ingest_predictions(file, &mut revs, LabelScheme::Fine).unwrap();
        assert_eq!(revs[0].edits[0].intention, Some(Intention::Fine(IntentionLabel::GrammarTypo)));
        assert_eq!(revs[0].edits[1].intention, Some(Intention::Fine(IntentionLabel::LangStyle)));
    }

    #[test]
    fn ingest_errors_name_keys() {
        let mut revs = revisions();
        let missing = "{\"revision_id\":\"x:v1-v2:0.0-0.0\",\"edit_index\":0,\"label\":\"Grammar-Typo\"}";
        match ingest_predictions(missing, &mut revs, LabelScheme::Fine) {
            Err(Error::Predictions(p)) => assert_eq!(p, ["x:v1-v2:0.0-0.0#1: missing label"]),
            other => panic!("{other:?}"),
        }
        assert!(revs[0].edits.iter().all(|e| e.intention.is_none()));

        let coarse = "{\"revision_id\":\"x:v1-v2:0.0-0.0\",\"edit_index\":0,\"label\":\"Improve-Language\"}\n\
                      {\"revision_id\":\"x:v1-v2:0.0-0.0\",\"edit_index\":1,\"label\":\"Grammar-Typo\"}";
        match ingest_predictions(coarse, &mut revs, LabelScheme::Fine) {
            Err(Error::Predictions(p)) => {
                assert_eq!(p.len(), 1);
                assert!(p[0].starts_with("x:v1-v2:0.0-0.0#0:"), "{p:?}");
            }
            other => panic!("{other:?}"),
        }
        ingest_predictions(coarse, &mut revs, LabelScheme::Coarse).unwrap();

        let extra = "{\"revision_id\":\"y\",\"edit_index\":0,\"label\":\"Grammar-Typo\"}";
        let Err(Error::Predictions(p)) = ingest_predictions(extra, &mut revisions(), LabelScheme::Fine) else {
            panic!("expected error");
        };
        assert!(p.contains(&"y#0: unknown revision".to_string()));
        assert!(ingest_predictions("{\"revision_id\":1}", &mut revisions(), LabelScheme::Fine).is_err());
    }
}
