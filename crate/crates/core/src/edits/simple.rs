//! Edits from a word alignment: unaligned runs and non-identical span pairs.

use super::{canonical, Edit, EditKind, Span, WordAlignment};
use crate::corpus::Sentence;
use crate::error::Result;

pub(super) type SpanPair = (Span, Span);

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Unions pairs overlapping on either side until none do; output is sorted.
pub(super) fn merge_overlapping(mut pairs: Vec<SpanPair>) -> Vec<SpanPair> {
    loop {
        let mut merged = false;
        'scan: for a in 0..pairs.len() {
            for b in a + 1..pairs.len() {
                let (p, q) = (pairs[a], pairs[b]);
                if p.0.overlaps(&q.0) || p.1.overlaps(&q.1) {
                    pairs[a] = (p.0.hull(&q.0), p.1.hull(&q.1));
                    pairs.swap_remove(b);
                    merged = true;
                    break 'scan;
                }
            }
        }
        if !merged {
            break;
        }
    }
    pairs.sort();
    pairs
}

/// Connected link components, each widened to its hulls and closed under hull overlap.
pub(super) fn link_regions(wa: &WordAlignment) -> Vec<SpanPair> {
    let links: Vec<(usize, usize)> = wa.links.iter().copied().collect();
    let mut parent: Vec<usize> = (0..links.len()).collect();
    let mut by_src = std::collections::HashMap::new();
    let mut by_tgt = std::collections::HashMap::new();
    for (k, &(i, j)) in links.iter().enumerate() {
        for owner in [by_src.entry(i).or_insert(k), by_tgt.entry(j).or_insert(k)] {
            let (ra, rb) = (find(&mut parent, *owner), find(&mut parent, k));
            parent[ra] = rb;
        }
    }
    let mut hulls: std::collections::BTreeMap<usize, SpanPair> = std::collections::BTreeMap::new();
    for (k, &(i, j)) in links.iter().enumerate() {
        let root = find(&mut parent, k);
        let pair = (Span::new(i, i + 1), Span::new(j, j + 1));
        hulls.entry(root).and_modify(|h| *h = (h.0.hull(&pair.0), h.1.hull(&pair.1))).or_insert(pair);
    }
    merge_overlapping(hulls.into_values().collect())
}

fn uncovered_runs(len: usize, covered: impl Iterator<Item = Span>) -> Vec<Span> {
    let mut mask = vec![false; len];
    for s in covered {
        mask[s.range()].iter_mut().for_each(|m| *m = true);
    }
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &m) in mask.iter().chain(std::iter::once(&true)).enumerate() {
        match (m, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                runs.push(Span::new(s, i));
                start = None;
            }
            _ => {}
        }
    }
    runs
}

/// Substitutes for non-identical regions, plus inserts and deletes for uncovered runs.
pub(super) fn emit(regions: &[SpanPair], src: &Sentence, tgt: &Sentence) -> Vec<Edit> {
    let mut edits: Vec<Edit> = regions
        .iter()
        .filter_map(|&(s, t)| strip_identical_boundaries(&Edit::substitute(s, t), src, tgt))
        .collect();
    edits.extend(uncovered_runs(src.len(), regions.iter().map(|r| r.0)).into_iter().map(Edit::delete));
    edits.extend(uncovered_runs(tgt.len(), regions.iter().map(|r| r.1)).into_iter().map(Edit::insert));
    canonical(edits)
}

pub fn edits_from_alignment_simple(src: &Sentence, tgt: &Sentence, wa: &WordAlignment) -> Result<Vec<Edit>> {
    wa.validate(src.len(), tgt.len())?;
    Ok(emit(&link_regions(wa), src, tgt))
}

/// Trims tokens shared at both ends of a substitute; re-types or drops it when a side empties.
///
/// Other kinds are returned unchanged.
pub fn strip_identical_boundaries(e: &Edit, src: &Sentence, tgt: &Sentence) -> Option<Edit> {
    let (Some(s), Some(t), EditKind::Substitute) = (e.src, e.tgt, e.kind) else {
        return Some(e.clone());
    };
    let a = &src.tokens[s.range()];
    let b = &tgt.tokens[t.range()];
    let prefix = a.iter().zip(b).take_while(|(x, y)| x.surface == y.surface).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x.surface == y.surface)
        .count();
    let (s0, s1) = (s.start + prefix, s.end - suffix);
    let (t0, t1) = (t.start + prefix, t.end - suffix);
    let out = match (s0 < s1, t0 < t1) {
        (false, false) => return None,
        (false, true) => Edit::insert(Span::new(t0, t1)),
        (true, false) => Edit::delete(Span::new(s0, s1)),
        (true, true) => Edit::substitute(Span::new(s0, s1), Span::new(t0, t1)),
    };
    Some(Edit { intention: e.intention, ..out })
}
