//! Myers shortest edit script and the diff baseline built on it.

use serde::Serialize;

use super::{Edit, Span};
use crate::corpus::Sentence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffOp {
    Keep,
    Insert,
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiffRun {
    pub op: DiffOp,
    pub len: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EditScript {
    pub runs: Vec<DiffRun>,
}

impl EditScript {
    /// Number of inserted plus deleted elements.
    pub fn cost(&self) -> usize {
        self.runs.iter().filter(|r| r.op != DiffOp::Keep).map(|r| r.len).sum()
    }

    pub fn kept(&self) -> usize {
        self.runs.iter().filter(|r| r.op == DiffOp::Keep).map(|r| r.len).sum()
    }

    fn push(&mut self, op: DiffOp, len: usize) {
        if len == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some(last) if last.op == op => last.len += len,
            _ => self.runs.push(DiffRun { op, len }),
        }
    }
}

/// Element-level script from the greedy O(ND) forward search.
fn myers_ops<T: PartialEq>(a: &[T], b: &[T]) -> Vec<DiffOp> {
    let (n, m) = (a.len() as isize, b.len() as isize);
    let max = (n + m) as usize;
    let off = max as isize + 1;
    let mut v = vec![0isize; 2 * max + 3];
    // trace[d] holds v[-d..=d] as it was before step d
    let mut trace: Vec<Vec<isize>> = Vec::new();
    let at = |k: isize| (k + off) as usize;

    'search: for d in 0..=max as isize {
        trace.push(v[at(-d)..=at(d)].to_vec());
        for k in (-d..=d).step_by(2) {
            let mut x = if k == -d || (k != d && v[at(k - 1)] < v[at(k + 1)]) { v[at(k + 1)] } else { v[at(k - 1)] + 1 };
            let mut y = x - k;
            while x < n && y < m && a[x as usize] == b[y as usize] {
                x += 1;
                y += 1;
            }
            v[at(k)] = x;
            if x >= n && y >= m {
                break 'search;
            }
        }
    }

    let mut ops = Vec::with_capacity(max);
    let (mut x, mut y) = (n, m);
    for d in (0..trace.len() as isize).rev() {
        let row = &trace[d as usize];
        let get = |k: isize| row[(k + d) as usize];
        let k = x - y;
        let prev_k = if d == 0 {
            0
        } else if k == -d || (k != d && get(k - 1) < get(k + 1)) {
            k + 1
        } else {
            k - 1
        };
        let prev_x = if d == 0 { 0 } else { get(prev_k) };
        let prev_y = prev_x - prev_k;
        while x > prev_x && y > prev_y {
            ops.push(DiffOp::Keep);
            x -= 1;
            y -= 1;
        }
        if d > 0 {
            ops.push(if x == prev_x { DiffOp::Insert } else { DiffOp::Delete });
        }
        x = prev_x;
        y = prev_y;
    }
    ops.reverse();
    ops
}

/// Minimal insert/delete script between `a` and `b`.
///
/// Within each change hunk deletions are emitted before insertions, which
/// makes the output independent of tie-breaking inside the search.
pub fn myers_diff<T: PartialEq>(a: &[T], b: &[T]) -> EditScript {
    let mut script = EditScript::default();
    let (mut dels, mut ins) = (0, 0);
    for op in myers_ops(a, b) {
        match op {
            DiffOp::Keep => {
                script.push(DiffOp::Delete, std::mem::take(&mut dels));
                script.push(DiffOp::Insert, std::mem::take(&mut ins));
                script.push(DiffOp::Keep, 1);
            }
            DiffOp::Delete => dels += 1,
            DiffOp::Insert => ins += 1,
        }
    }
    script.push(DiffOp::Delete, dels);
    script.push(DiffOp::Insert, ins);
    script
}

/// Turns a script into edits; an adjacent delete/insert run pair becomes one substitute.
pub fn diff_to_edits(script: &EditScript) -> Vec<Edit> {
    let mut edits = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut k = 0;
    let runs = &script.runs;
    while k < runs.len() {
        let run = runs[k];
        let next = runs.get(k + 1).filter(|r| r.op != DiffOp::Keep && r.op != run.op);
        match (run.op, next) {
            (DiffOp::Keep, _) => {
                i += run.len;
                j += run.len;
            }
            (DiffOp::Delete, Some(ins)) => {
                edits.push(Edit::substitute(Span::new(i, i + run.len), Span::new(j, j + ins.len)));
                i += run.len;
                j += ins.len;
                k += 1;
            }
            (DiffOp::Insert, Some(del)) => {
                edits.push(Edit::substitute(Span::new(i, i + del.len), Span::new(j, j + run.len)));
                i += del.len;
                j += run.len;
                k += 1;
            }
            (DiffOp::Delete, None) => {
                edits.push(Edit::delete(Span::new(i, i + run.len)));
                i += run.len;
            }
            (DiffOp::Insert, None) => {
                edits.push(Edit::insert(Span::new(j, j + run.len)));
                j += run.len;
            }
        }
        k += 1;
    }
    edits
}

/// The diff baseline: token-level Myers diff over surfaces.
pub fn diff_edits(src: &Sentence, tgt: &Sentence) -> Vec<Edit> {
    let a: Vec<&str> = src.tokens.iter().map(|t| t.surface.as_str()).collect();
    let b: Vec<&str> = tgt.tokens.iter().map(|t| t.surface.as_str()).collect();
    diff_to_edits(&myers_diff(&a, &b))
}
