use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use super::align::Corpus;
use super::output::{load_alignments, Outputs};
use super::{CliError, CliResult};
use crate::config::RunConfig;
use crate::docops::{
    action_composition_by_ratio, classify_operations, pearson, position_histograms, update_ratio_with, DocOpsReport,
    PositionHistogram, PositionOp,
};
use crate::Error;

#[derive(Serialize)]
struct OpsSummary<'a> {
    total: &'a DocOpsReport,
    per_group: &'a BTreeMap<String, DocOpsReport>,
}

#[derive(Serialize)]
struct RatioSummary {
    revisions: usize,
    /// Revisions left out of the ratio because the source had no active sentences.
    empty_sources: usize,
    mean_update_ratio: Option<f64>,
    /// Correlation between update ratio and days between versions.
    pearson_ratio_days: Option<f64>,
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub(super) fn cmd_stats(cfg: &RunConfig, released: bool, alignments: &[PathBuf], bins: usize) -> CliResult<()> {
    if bins == 0 {
        return Err(CliError::input("--bins must be at least 1"));
    }
    let corpus = Corpus::load(cfg, released)?;
    let mut total = DocOpsReport::default();
    let mut per_group: BTreeMap<String, DocOpsReport> = BTreeMap::new();
    let mut hists: Option<Vec<PositionHistogram>> = None;
    let mut by_ratio = Vec::new();
    let mut ratio_csv = String::from("arxiv_id,src_version,tgt_version,update_ratio,delta_days\n");
    let (mut ratios, mut days) = (Vec::new(), Vec::new());
    let mut empty_sources = 0;
    let mut revisions = 0;

    for (path, file) in load_alignments(alignments)? {
        let (group, src, tgt) = corpus.resolve(&path, &file)?;
        let a = &file.alignment;
        let at = |e: Error| CliError::input(format!("{}: {e}", path.display()));
        revisions += 1;
        let report = classify_operations(a, src, tgt).map_err(at)?;
        total.absorb(&report);
        per_group.entry(group.arxiv_id.clone()).or_default().absorb(&report);

        let h = position_histograms(a, src, tgt).map_err(at)?;
        match &mut hists {
            Some(acc) => acc.iter_mut().zip(&h).for_each(|(x, y)| x.extend(y)),
            None => hists = Some(h),
        }

        match update_ratio_with(a, src, tgt, cfg.kept_definition) {
            Ok(r) => {
                let delta = (tgt.timestamp - src.timestamp) as f64 / 86_400.0;
                let _ = writeln!(ratio_csv, "{},{},{},{r:.6},{delta:.3}", group.arxiv_id, src.version_index, tgt.version_index);
                ratios.push(r);
                days.push(delta);
                by_ratio.push((report, r));
            }
            Err(Error::Empty(m)) => {
                log::warn!("{}: no update ratio: {m}", path.display());
                empty_sources += 1;
            }
            Err(e) => return Err(at(e)),
        }
    }

    print!("{}", total.to_table());

    let Some(out_dir) = cfg.out.as_ref() else {
        return Ok(());
    };
    let mut outputs = Outputs::default();
    outputs.write(&out_dir.join("ops.json"), to_json(&OpsSummary { total: &total, per_group: &per_group })?.as_bytes())?;
    outputs.write(&out_dir.join("update_ratio.csv"), ratio_csv.as_bytes())?;
    let hists = hists.unwrap_or_else(|| {
        [PositionOp::Inserted, PositionOp::Deleted, PositionOp::Revised].map(PositionHistogram::new).to_vec()
    });
    for h in hists {
        outputs.write(&out_dir.join(format!("positions_{}.csv", h.op.as_str())), h.to_csv(bins).as_bytes())?;
    }
    let mut comp = String::from("ratio_start,ratio_end,revisions,insertion,deletion,rephrasing,other\n");
    for b in action_composition_by_ratio(&by_ratio, bins) {
        let _ = writeln!(
            comp,
            "{:.4},{:.4},{},{:.6},{:.6},{:.6},{:.6}",
            b.ratio_start, b.ratio_end, b.revisions, b.insertion, b.deletion, b.rephrasing, b.other
        );
    }
    outputs.write(&out_dir.join("composition.csv"), comp.as_bytes())?;
    let summary = RatioSummary {
        revisions,
        empty_sources,
        mean_update_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        pearson_ratio_days: pearson(&ratios, &days).ok(),
    };
    outputs.write(&out_dir.join("summary.json"), to_json(&summary)?.as_bytes())?;
    outputs.commit();
    Ok(())
}
