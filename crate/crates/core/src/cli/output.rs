//! Input reading and atomic output writing shared by the commands.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::{CliError, CliResult};
use crate::corpus::{parse_corpus, parse_released_corpus, ArticleGroup};
use crate::sentence::AlignmentFile;

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read_bytes(path)?).map_err(|_| CliError::input(format!("{} is not valid UTF-8", path.display())))
}

pub fn load_corpus(path: &Path, released: bool) -> CliResult<Vec<ArticleGroup>> {
    let bytes = read_bytes(path)?;
    let parsed = if released { parse_released_corpus(&bytes) } else { parse_corpus(&bytes) };
    parsed.map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Expands directories to the `.json` files they contain, sorted by name.
pub fn expand_json_paths(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).map_err(|e| CliError::input(format!("cannot list {}: {e}", p.display())))?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            out.extend(files);
        } else if p.exists() {
            out.push(p.clone());
        } else {
            return Err(CliError::input(format!("{} does not exist", p.display())));
        }
    }
    Ok(out)
}

pub fn load_alignments(paths: &[PathBuf]) -> CliResult<Vec<(PathBuf, AlignmentFile)>> {
    expand_json_paths(paths)?
        .into_iter()
        .map(|p| {
            let file = AlignmentFile::from_json(&read_bytes(&p)?)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            Ok((p, file))
        })
        .collect()
}

/// File-name-safe form of a group id.
pub fn sanitize(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' }).collect()
}

/// Files written during one command; removed again unless committed.
#[derive(Default)]
pub struct Outputs {
    written: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    /// Writes through a temporary file in the target directory, then renames.
    pub fn write(&mut self, path: &Path, contents: &[u8]) -> CliResult<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::internal(format!("cannot create {}: {e}", dir.display())))?;
        let fail = |e: std::io::Error| CliError::internal(format!("cannot write {}: {e}", path.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
        tmp.write_all(contents).map_err(fail)?;
        tmp.as_file().sync_all().map_err(fail)?;
        tmp.persist(path).map_err(|e| fail(e.error))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

/// Writes to `path` when given, otherwise to stdout.
pub fn emit(outputs: &mut Outputs, path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => outputs.write(p, contents.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(|e| CliError::internal(format!("stdout: {e}")))
        }
    }
}
