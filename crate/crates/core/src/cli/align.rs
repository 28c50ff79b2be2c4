use std::collections::HashMap;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use super::output::{emit, load_alignments, load_corpus, sanitize, Outputs};
use super::{required, CliError, CliResult};
use crate::config::RunConfig;
use crate::corpus::{ArticleGroup, DocVersion};
use crate::pipeline::{align_versions, tune_threshold};
use crate::sentence::{AlignmentFile, SentenceAlignment};

pub(super) struct Corpus {
    groups: Vec<ArticleGroup>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    pub(super) fn load(cfg: &RunConfig, released: bool) -> CliResult<Corpus> {
        let groups = load_corpus(required(&cfg.corpus, "--corpus")?, released)?;
        let by_id = groups.iter().enumerate().map(|(i, g)| (g.arxiv_id.clone(), i)).collect();
        Ok(Corpus { groups, by_id })
    }

    pub(super) fn groups(&self) -> &[ArticleGroup] {
        &self.groups
    }

    /// The group and version pair an alignment file refers to.
    pub(super) fn resolve<'a>(
        &'a self,
        path: &Path,
        file: &AlignmentFile,
    ) -> CliResult<(&'a ArticleGroup, &'a DocVersion, &'a DocVersion)> {
        let group = match &file.arxiv_id {
            Some(id) => self
                .by_id
                .get(id)
                .map(|&i| &self.groups[i])
                .ok_or_else(|| CliError::input(format!("{}: group `{id}` is not in the corpus", path.display())))?,
            None if self.groups.len() == 1 => &self.groups[0],
            None => return Err(CliError::input(format!("{}: alignment has no arxiv_id", path.display()))),
        };
        let a = &file.alignment;
        let version = |v: u32| {
            group.version(v).ok_or_else(|| {
                CliError::input(format!("{}: `{}` has no version {v}", path.display(), group.arxiv_id))
            })
        };
        let (src, tgt) = (version(a.src_version)?, version(a.tgt_version)?);
        a.validate_against(src, tgt).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok((group, src, tgt))
    }
}

pub(super) fn alignment_file_name(arxiv_id: &str, a: &SentenceAlignment) -> String {
    format!("{}__v{}-v{}.json", sanitize(arxiv_id), a.src_version, a.tgt_version)
}

pub(super) fn cmd_align(cfg: &RunConfig, released: bool) -> CliResult<()> {
    let corpus = Corpus::load(cfg, released)?;
    let out_dir = required(&cfg.out, "--out")?;
    let align_cfg = cfg.align_config();
    let files: Vec<(String, String)> = corpus
        .groups()
        .par_iter()
        .map(|g| {
            g.revisions()
                .map(|(src, tgt)| {
                    let alignment = align_versions(src, tgt, &align_cfg)
                        .map_err(|e| CliError::input(format!("{} v{}-v{}: {e}", g.arxiv_id, src.version_index, tgt.version_index)))?;
                    let name = alignment_file_name(&g.arxiv_id, &alignment);
                    let text = AlignmentFile { arxiv_id: Some(g.arxiv_id.clone()), alignment }.to_json()?;
                    Ok((name, text))
                })
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut outputs = Outputs::default();
    for (name, text) in &files {
        outputs.write(&out_dir.join(name), text.as_bytes())?;
    }
    outputs.commit();
    info!("wrote {} alignment files to {}", files.len(), out_dir.display());
    Ok(())
}

pub(super) fn cmd_tune(cfg: &RunConfig, released: bool, gold: &[PathBuf]) -> CliResult<()> {
    let corpus = Corpus::load(cfg, released)?;
    let golds = load_alignments(gold)?;
    let mut dev = Vec::with_capacity(golds.len());
    for (path, file) in &golds {
        let (_, src, tgt) = corpus.resolve(path, file)?;
        dev.push((src, tgt, &file.alignment));
    }
    let result = tune_threshold(&dev, &cfg.align_config())?;
    let mut text = serde_json::to_string_pretty(&serde_json::json!({
        "metric": cfg.metric.as_str(),
        "threshold": result.threshold,
        "precision": result.prf.precision,
        "recall": result.prf.recall,
        "f1": result.prf.f1,
    }))
    .map_err(|e| CliError::internal(e.to_string()))?;
    text.push('\n');
    let mut outputs = Outputs::default();
    emit(&mut outputs, cfg.out.as_deref(), &text)?;
    outputs.commit();
    Ok(())
}
