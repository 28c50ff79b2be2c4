use chrono::DateTime;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ArticleGroup, DocVersion, Paragraph, Subject};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    arxiv_id: String,
    subject: String,
    versions: Vec<RawVersion>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVersion {
    version: u32,
    timestamp: i64,
    paragraphs: Vec<RawParagraph>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParagraph {
    sentences: Vec<String>,
}

/// Parses and validates a corpus file.
pub fn parse_corpus(bytes: &[u8]) -> Result<Vec<ArticleGroup>> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let raw: Vec<RawGroup> = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    raw.into_iter().enumerate().map(|(gi, g)| build_group(gi, g)).collect()
}

fn build_group(gi: usize, mut g: RawGroup) -> Result<ArticleGroup> {
    if g.arxiv_id.trim().is_empty() {
        return Err(Error::Schema { path: format!("[{gi}].arxiv_id"), message: "empty identifier".into() });
    }
    if g.versions.is_empty() {
        return Err(Error::Validation(format!("group {} has no versions", g.arxiv_id)));
    }
    if let Some(vi) = g.versions.iter().position(|v| v.version == 0) {
        return Err(Error::Schema {
            path: format!("[{gi}].versions[{vi}].version"),
            message: "version index must be positive".into(),
        });
    }
    g.versions.sort_by_key(|v| v.version);
    for w in g.versions.windows(2) {
        if w[0].version == w[1].version {
            return Err(Error::Validation(format!(
                "group {}: duplicate version {}",
                g.arxiv_id, w[0].version
            )));
        }
        if w[1].timestamp <= w[0].timestamp {
            return Err(Error::Validation(format!(
                "group {}: timestamp of v{} ({}) does not exceed v{} ({})",
                g.arxiv_id, w[1].version, w[1].timestamp, w[0].version, w[0].timestamp
            )));
        }
    }
    let versions = g
        .versions
        .into_iter()
        .map(|v| DocVersion::new(v.version, v.timestamp, v.paragraphs.into_iter().map(|p| p.sentences)))
        .collect();
    Ok(ArticleGroup { arxiv_id: g.arxiv_id, subject: Subject::from_archive(&g.subject), versions })
}

/// Writes groups back in the corpus schema.
pub fn serialize_corpus(groups: &[ArticleGroup]) -> Result<String> {
    let raw: Vec<RawGroup> = groups
        .iter()
        .map(|g| RawGroup {
            arxiv_id: g.arxiv_id.clone(),
            subject: g.subject.as_str().to_string(),
            versions: g
                .versions
                .iter()
                .map(|v| RawVersion {
                    version: v.version_index,
                    timestamp: v.timestamp,
                    paragraphs: v.paragraphs.iter().map(raw_paragraph).collect(),
                })
                .collect(),
        })
        .collect();
    Ok(serde_json::to_string_pretty(&raw)?)
}

fn raw_paragraph(p: &Paragraph) -> RawParagraph {
    RawParagraph { sentences: p.sentences.iter().map(|s| s.raw.clone()).collect() }
}

/// Lenient reader for corpus dumps that use different field names.
///
/// Accepts a top-level array or an object keyed by paper id; `id`/`paper_id`
/// for the identifier; `category`/`categories` for the subject; versions as
/// an array or an object keyed `v1`, `v2`, ...; timestamps as epoch seconds,
/// RFC 3339 or RFC 2822 strings; paragraphs as `{"sentences": [...]}` or bare
/// string arrays. The result goes through the same validation as
/// [`parse_corpus`].
pub fn parse_released_corpus(bytes: &[u8]) -> Result<Vec<ArticleGroup>> {
    let root: Value = serde_json::from_slice(bytes)?;
    let entries: Vec<(String, Option<String>, &Value)> = match &root {
        Value::Array(items) => items.iter().enumerate().map(|(i, v)| (format!("[{i}]"), None, v)).collect(),
        Value::Object(map) => map.iter().map(|(k, v)| (format!(".{k}"), Some(k.clone()), v)).collect(),
        _ => return Err(schema("", "expected an array or object of groups")),
    };
    let mut raws = Vec::with_capacity(entries.len());
    for (path, key, value) in entries {
        raws.push(released_group(&path, key, value)?);
    }
    raws.into_iter().enumerate().map(|(gi, g)| build_group(gi, g)).collect()
}

fn schema(path: &str, message: &str) -> Error {
    Error::Schema { path: path.to_string(), message: message.to_string() }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, names: &[&str]) -> Option<&'a Value> {
    names.iter().find_map(|n| obj.get(*n))
}

fn released_group(path: &str, key: Option<String>, value: &Value) -> Result<RawGroup> {
    let obj = value.as_object().ok_or_else(|| schema(path, "group must be an object"))?;
    let arxiv_id = match field(obj, &["arxiv_id", "id", "paper_id"]) {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema(&format!("{path}.arxiv_id"), "expected a string")),
        None => key.ok_or_else(|| schema(path, "missing arxiv_id"))?,
    };
    let subject = match field(obj, &["subject", "category", "categories"]) {
        Some(Value::String(s)) => s.split_whitespace().next().unwrap_or("other").to_string(),
        Some(Value::Array(a)) => a.first().and_then(Value::as_str).unwrap_or("other").to_string(),
        _ => "other".to_string(),
    };
    let versions_value = field(obj, &["versions"]).ok_or_else(|| schema(path, "missing versions"))?;
    let mut versions = Vec::new();
    match versions_value {
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                versions.push(released_version(&format!("{path}.versions[{i}]"), None, i, v)?);
            }
        }
        Value::Object(map) => {
            for (i, (k, v)) in map.iter().enumerate() {
                versions.push(released_version(&format!("{path}.versions.{k}"), Some(k), i, v)?);
            }
        }
        _ => return Err(schema(&format!("{path}.versions"), "expected an array or object")),
    }
    Ok(RawGroup { arxiv_id, subject, versions })
}

fn released_version(path: &str, key: Option<&str>, position: usize, value: &Value) -> Result<RawVersion> {
    let obj = value.as_object().ok_or_else(|| schema(path, "version must be an object"))?;
    let version = match field(obj, &["version", "version_index"]) {
        Some(Value::Number(n)) => n.as_u64().ok_or_else(|| schema(&format!("{path}.version"), "expected an integer"))? as u32,
        Some(Value::String(s)) => parse_version_label(s).ok_or_else(|| schema(&format!("{path}.version"), "unreadable version"))?,
        Some(_) => return Err(schema(&format!("{path}.version"), "expected an integer")),
        None => key.and_then(parse_version_label).unwrap_or(position as u32 + 1),
    };
    let ts_path = format!("{path}.timestamp");
    let timestamp = match field(obj, &["timestamp", "created", "date"]) {
        Some(Value::Number(n)) => n.as_i64().ok_or_else(|| schema(&ts_path, "expected integer seconds"))?,
        Some(Value::String(s)) => parse_date(s).ok_or_else(|| schema(&ts_path, "unreadable date"))?,
        _ => return Err(schema(&ts_path, "missing timestamp")),
    };
    let paras = field(obj, &["paragraphs"]).and_then(Value::as_array).ok_or_else(|| schema(path, "missing paragraphs array"))?;
    let mut paragraphs = Vec::with_capacity(paras.len());
    for (pi, p) in paras.iter().enumerate() {
        let ppath = format!("{path}.paragraphs[{pi}]");
        let sents = match p {
            Value::Array(a) => a,
            Value::Object(o) => o.get("sentences").and_then(Value::as_array).ok_or_else(|| schema(&ppath, "missing sentences"))?,
            _ => return Err(schema(&ppath, "expected an array or object")),
        };
        let sentences = sents
            .iter()
            .enumerate()
            .map(|(si, s)| {
                s.as_str().map(str::to_string).ok_or_else(|| schema(&format!("{ppath}.sentences[{si}]"), "expected a string"))
            })
            .collect::<Result<Vec<_>>>()?;
        paragraphs.push(RawParagraph { sentences });
    }
    Ok(RawVersion { version, timestamp, paragraphs })
}

fn parse_version_label(s: &str) -> Option<u32> {
    s.trim().trim_start_matches(['v', 'V']).parse().ok()
}

fn parse_date(s: &str) -> Option<i64> {
    DateTime::parse_from_rfc3339(s)
        .or_else(|_| DateTime::parse_from_rfc2822(s))
        .ok()
        .map(|d| d.timestamp())
        .or_else(|| s.trim().parse().ok())
}
