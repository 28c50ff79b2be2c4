//! C interface to revkit.
//!
//! Every fallible call returns a [`RevkitStatus`]; on failure the message is
//! available from [`revkit_last_error`] on the same thread. Strings handed out
//! by the library must be released with [`revkit_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use revkit::corpus::{parse_corpus, ArticleGroup, Sentence};
use revkit::edits::{diff_edits, edits_from_alignment_simple, Edit, WordAlignment};
use revkit::error::Error;
use revkit::pipeline::{align_versions, AlignConfig};
use revkit::sentence::AlignmentFile;
use revkit::similarity::{jaccard, Metric};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    NotFound = 4,
    Internal = 5,
}

/// Parsed corpus. Opaque to C.
pub struct RevkitCorpus {
    groups: Vec<ArticleGroup>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RevkitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_) => RevkitStatus::Internal,
            _ => RevkitStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn run(f: impl FnOnce() -> Result<(), Failure>) -> RevkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            RevkitStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RevkitStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RevkitStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(RevkitStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(RevkitStatus::Internal, e.to_string()))?;
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(c.into_raw());
    Ok(())
}

fn edits_json(edits: &[Edit]) -> Result<String, Failure> {
    serde_json::to_string(edits).map_err(|e| Failure(RevkitStatus::Internal, e.to_string()))
}

unsafe fn corpus<'a>(c: *const RevkitCorpus) -> Result<&'a RevkitCorpus, Failure> {
    c.as_ref().ok_or_else(|| null("corpus"))
}

fn group(c: &RevkitCorpus, index: usize) -> Result<&ArticleGroup, Failure> {
    c.groups.get(index).ok_or_else(|| {
        Failure(RevkitStatus::NotFound, format!("group {index} out of range ({} groups)", c.groups.len()))
    })
}

/// Message for the last failed call on this thread, or NULL after a success.
///
/// The pointer stays valid until the next revkit call on the same thread.
#[no_mangle]
pub extern "C" fn revkit_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses `len` bytes of corpus JSON into a new handle.
///
/// # Safety
/// `json` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn revkit_corpus_parse(json: *const u8, len: usize, out: *mut *mut RevkitCorpus) -> RevkitStatus {
    run(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let groups = parse_corpus(std::slice::from_raw_parts(json, len))?;
        put(out, Box::into_raw(Box::new(RevkitCorpus { groups })), "out")
    })
}

/// # Safety
/// `corpus` must be NULL or a handle from [`revkit_corpus_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn revkit_corpus_free(corpus: *mut RevkitCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// # Safety
/// `corpus` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn revkit_corpus_group_count(corpus: *const RevkitCorpus, out: *mut usize) -> RevkitStatus {
    run(|| put(out, self::corpus(corpus)?.groups.len(), "out"))
}

/// # Safety
/// `corpus` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn revkit_corpus_version_count(
    corpus: *const RevkitCorpus,
    group_index: usize,
    out: *mut usize,
) -> RevkitStatus {
    run(|| put(out, group(self::corpus(corpus)?, group_index)?.versions.len(), "out"))
}

/// Aligns two versions of one group and writes the alignment as JSON.
///
/// `metric` may be NULL for jaccard; a NaN `threshold` selects the metric default.
///
/// # Safety
/// `corpus` must be a live handle, `metric` NULL or a C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn revkit_align_versions(
    corpus: *const RevkitCorpus,
    group_index: usize,
    src_version: u32,
    tgt_version: u32,
    metric: *const c_char,
    threshold: f64,
    out: *mut *mut c_char,
) -> RevkitStatus {
    run(|| {
        let g = group(self::corpus(corpus)?, group_index)?;
        let metric: Metric = if metric.is_null() { Metric::Jaccard } else { text(metric, "metric")?.parse()? };
        let threshold = if threshold.is_nan() { metric.default_threshold() } else { threshold };
        let version = |v: u32| {
            g.version(v)
                .ok_or_else(|| Failure(RevkitStatus::NotFound, format!("{} has no version {v}", g.arxiv_id)))
        };
        let cfg = AlignConfig { metric, threshold, ..AlignConfig::default() };
        let alignment = align_versions(version(src_version)?, version(tgt_version)?, &cfg)?;
        let file = AlignmentFile { arxiv_id: Some(g.arxiv_id.clone()), alignment };
        put_string(out, file.to_json()?)
    })
}

/// Token-set Jaccard similarity of two raw sentences.
///
/// # Safety
/// `a` and `b` must be C strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn revkit_jaccard(a: *const c_char, b: *const c_char, out: *mut f64) -> RevkitStatus {
    run(|| {
        let (a, b) = (Sentence::from_text(text(a, "a")?), Sentence::from_text(text(b, "b")?));
        put(out, jaccard(&a, &b), "out")
    })
}

/// Word-level diff of two raw sentences, as a JSON array of edits.
///
/// # Safety
/// `src` and `tgt` must be C strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn revkit_diff_edits(src: *const c_char, tgt: *const c_char, out: *mut *mut c_char) -> RevkitStatus {
    run(|| {
        let (s, t) = (Sentence::from_text(text(src, "src")?), Sentence::from_text(text(tgt, "tgt")?));
        put_string(out, edits_json(&diff_edits(&s, &t))?)
    })
}

/// Edits from a word alignment given as Pharaoh links (`"0-0 1-2"`).
///
/// A NULL `links` falls back to the links of a token diff.
///
/// # Safety
/// `src` and `tgt` must be C strings, `links` NULL or a C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn revkit_extract_edits(
    src: *const c_char,
    tgt: *const c_char,
    links: *const c_char,
    out: *mut *mut c_char,
) -> RevkitStatus {
    run(|| {
        let (s, t) = (Sentence::from_text(text(src, "src")?), Sentence::from_text(text(tgt, "tgt")?));
        let wa = if links.is_null() {
            WordAlignment::from_diff(&s, &t)
        } else {
            WordAlignment::parse_pharaoh(text(links, "links")?)?
        };
        put_string(out, edits_json(&edits_from_alignment_simple(&s, &t, &wa)?)?)
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn revkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
