//! Reordering of identical blocks, read off crossing word links.

use std::collections::HashMap;

use super::{canonical, Edit, Span, WordAlignment};
use crate::corpus::Sentence;
use crate::error::Result;

/// Maximal runs of one-to-one links `(i, j), (i+1, j+1), ...` between equal tokens.
fn identical_blocks(wa: &WordAlignment, src: &Sentence, tgt: &Sentence) -> Vec<Vec<(usize, usize)>> {
    let mut src_deg: HashMap<usize, usize> = HashMap::new();
    let mut tgt_deg: HashMap<usize, usize> = HashMap::new();
    for &(i, j) in &wa.links {
        *src_deg.entry(i).or_default() += 1;
        *tgt_deg.entry(j).or_default() += 1;
    }
    let mut blocks: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(i, j) in &wa.links {
        if src_deg[&i] != 1 || tgt_deg[&j] != 1 || src.tokens[i].surface != tgt.tokens[j].surface {
            continue;
        }
        match blocks.last_mut() {
            Some(b) if i > 0 && j > 0 && b.last() == Some(&(i - 1, j - 1)) => b.push((i, j)),
            _ => blocks.push(vec![(i, j)]),
        }
    }
    blocks
}

fn crosses(block: &[(usize, usize)], wa: &WordAlignment) -> bool {
    block.iter().any(|&(i, j)| {
        wa.links
            .iter()
            .filter(|l| !block.contains(l))
            .any(|&(i2, j2)| (i < i2 && j > j2) || (i > i2 && j < j2))
    })
}

/// Adds a reorder edit for every identical block whose links cross a link outside it.
///
/// Blocks overlapping an existing edit on either side are left alone.
pub fn derive_reorder(edits: &[Edit], wa: &WordAlignment, src: &Sentence, tgt: &Sentence) -> Result<Vec<Edit>> {
    wa.validate(src.len(), tgt.len())?;
    let mut out = edits.to_vec();
    for block in identical_blocks(wa, src, tgt) {
        if !crosses(&block, wa) {
            continue;
        }
        let (first, last) = (block[0], block[block.len() - 1]);
        let s = Span::new(first.0, last.0 + 1);
        let t = Span::new(first.1, last.1 + 1);
        let clash = out.iter().any(|e| e.src.is_some_and(|x| x.overlaps(&s)) || e.tgt.is_some_and(|x| x.overlaps(&t)));
        if !clash {
            out.push(Edit::reorder(s, t));
        }
    }
    Ok(canonical(out))
}
