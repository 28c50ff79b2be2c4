//! Generators and independent reference implementations shared by the integration tests.
// Oracles transcribe the reference loops literally, index for index.
#![allow(dead_code, clippy::needless_range_loop, clippy::if_same_then_else)]

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revkit::corpus::{DocVersion, Sentence};
use revkit::edits::{Edit, EditKind, ParseTree, Span, WordAlignment};
use revkit::paragraph::Thresholds;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Textbook O(nm) longest common subsequence length.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            dp[i][j] = if a[i - 1] == b[j - 1] { dp[i - 1][j - 1] + 1 } else { dp[i - 1][j].max(dp[i][j - 1]) };
        }
    }
    dp[a.len()][b.len()]
}

const WORDS: &[&str] = &[
    "model", "data", "results", "we", "show", "that", "the", "method", "improves", "accuracy", "on", "benchmark",
    "our", "analysis", "suggests", "a", "new", "approach", "for", "learning",
];

pub fn random_sentence(r: &mut impl Rng, min: usize, max: usize) -> String {
    let n = r.gen_range(min..=max);
    let mut words: Vec<&str> = (0..n).map(|_| *WORDS.choose(r).unwrap()).collect();
    words.push(".");
    words.join(" ")
}

/// Paragraphs of random sentences; some paragraphs are short enough to be skipped.
pub fn random_paragraphs(r: &mut impl Rng, max_paras: usize, max_sents: usize) -> Vec<Vec<String>> {
    let k = r.gen_range(1..=max_paras);
    (0..k)
        .map(|_| {
            let n = r.gen_range(1..=max_sents);
            let short = r.gen_bool(0.1);
            (0..n).map(|_| if short { random_sentence(r, 1, 2) } else { random_sentence(r, 4, 9) }).collect()
        })
        .collect()
}

/// A revised copy: paragraphs dropped, duplicated, shuffled locally and sentences rewritten.
pub fn revise_paragraphs(r: &mut impl Rng, src: &[Vec<String>], max_paras: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for p in src {
        if r.gen_bool(0.15) {
            continue;
        }
        let para = p
            .iter()
            .map(|s| match r.gen_range(0..10) {
                0..=4 => s.clone(),
                5..=7 => {
                    let mut w: Vec<&str> = s.split(' ').collect();
                    let i = r.gen_range(0..w.len());
                    w[i] = WORDS.choose(r).unwrap();
                    w.join(" ")
                }
                _ => random_sentence(r, 4, 9),
            })
            .collect();
        out.push(para);
        if r.gen_bool(0.1) {
            out.push(random_paragraphs(r, 1, 4).remove(0));
        }
    }
    if out.is_empty() || r.gen_bool(0.2) {
        out.push(random_paragraphs(r, 1, 4).remove(0));
    }
    if out.len() > 2 && r.gen_bool(0.3) {
        let i = r.gen_range(0..out.len() - 1);
        out.swap(i, i + 1);
    }
    out.truncate(max_paras);
    out
}

pub fn doc(version: u32, paras: &[Vec<String>]) -> DocVersion {
    DocVersion::new(version, 1_000 * version as i64, paras.iter().map(|p| p.iter().cloned()))
}

/// The paragraph alignment algorithm written out loop by loop with 1-based indices.
pub fn paragraph_oracle(src: &DocVersion, tgt: &DocVersion, t: &Thresholds) -> BTreeSet<(usize, usize)> {
    let words = |s: &Sentence| -> HashSet<String> { s.tokens.iter().map(|t| t.surface.to_lowercase()).collect() };
    let sim_sent = |a: &HashSet<String>, b: &HashSet<String>| -> f64 {
        if a.is_empty() && b.is_empty() {
            return 1.0;
        }
        let inter = a.iter().filter(|w| b.contains(*w)).count() as f64;
        let union = a.union(b).count() as f64;
        inter / union
    };
    let paras = |d: &DocVersion| -> Vec<(usize, Vec<HashSet<String>>)> {
        d.paragraphs
            .iter()
            .filter(|p| !p.skipped)
            .map(|p| (p.index, p.sentences.iter().filter(|s| !s.skipped).map(words).collect()))
            .collect()
    };
    let s_paras = paras(src);
    let c_paras = paras(tgt);
    let k = s_paras.len();
    let l = c_paras.len();

    let mut sim_p = vec![vec![vec![0.0f64; l + 1]; k + 1]; 3];
    for i in 1..=k {
        for j in 1..=l {
            let s_i = &s_paras[i - 1].1;
            let c_j = &c_paras[j - 1].1;
            if s_i.is_empty() || c_j.is_empty() {
                continue;
            }
            let mut total = 0.0;
            for sp in s_i {
                let mut best = 0.0f64;
                for cq in c_j {
                    best = best.max(sim_sent(sp, cq));
                }
                total += best;
            }
            sim_p[1][i][j] = total / s_i.len() as f64;
            let mut total = 0.0;
            for cp in c_j {
                let mut best = 0.0f64;
                for sq in s_i {
                    best = best.max(sim_sent(sq, cp));
                }
                total += best;
            }
            sim_p[2][i][j] = total / c_j.len() as f64;
        }
    }
    let d = |i: usize, j: usize| (i as f64 / k as f64 - j as f64 / l as f64).abs();

    let mut align_p = BTreeSet::new();
    for j in 1..=l {
        let mut i_max = 1;
        for i in 2..=k {
            if sim_p[2][i][j] > sim_p[2][i_max][j] {
                i_max = i;
            }
        }
        if k == 0 {
            break;
        }
        if sim_p[1][i_max][j] > t.tau1 && d(i_max, j) < t.tau2 {
            align_p.insert((i_max, j));
        } else if sim_p[1][i_max][j] > t.tau3 {
            align_p.insert((i_max, j));
        }
    }
    for i in 1..=k {
        let mut j_max = 1;
        for j in 2..=l {
            if sim_p[1][i][j] > sim_p[1][i][j_max] {
                j_max = j;
            }
        }
        if l == 0 {
            break;
        }
        if sim_p[2][i][j_max] > t.tau1 && d(i, j_max) < t.tau4 {
            align_p.insert((i, j_max));
        } else if sim_p[2][i][j_max] > t.tau3 {
            align_p.insert((i, j_max));
        }
    }
    align_p.into_iter().map(|(i, j)| (s_paras[i - 1].0, c_paras[j - 1].0)).collect()
}

/// A revision built from gold edits, with the word alignment those edits induce.
pub struct SyntheticRevision {
    pub src: Sentence,
    pub tgt: Sentence,
    pub wa: WordAlignment,
    pub gold: Vec<Edit>,
}

/// Kept tokens are linked one to one; each substitute's links form one connected component.
/// Edits are separated by at least one kept token, and substitutes share no vocabulary.
pub fn synthetic_revision(r: &mut impl Rng) -> SyntheticRevision {
    let (mut src, mut tgt) = (Vec::new(), Vec::new());
    let mut links = Vec::new();
    let mut gold = Vec::new();
    let mut word = 0usize;
    let mut fresh = |prefix: &str| {
        word += 1;
        format!("{prefix}{word}")
    };
    let keep = |src: &mut Vec<String>, tgt: &mut Vec<String>, links: &mut Vec<(usize, usize)>, w: String| {
        links.push((src.len(), tgt.len()));
        src.push(w.clone());
        tgt.push(w);
    };
    let segments = r.gen_range(1..=5);
    for _ in 0..r.gen_range(1..=3) {
        keep(&mut src, &mut tgt, &mut links, fresh("k"));
    }
    for _ in 0..segments {
        let (a, b) = (r.gen_range(1..=3), r.gen_range(1..=3));
        match r.gen_range(0..3) {
            0 => {
                let start = tgt.len();
                (0..b).for_each(|_| tgt.push(fresh("i")));
                gold.push(Edit::insert(Span::new(start, tgt.len())));
            }
            1 => {
                let start = src.len();
                (0..a).for_each(|_| src.push(fresh("d")));
                gold.push(Edit::delete(Span::new(start, src.len())));
            }
            _ => {
                let (s0, t0) = (src.len(), tgt.len());
                (0..a).for_each(|_| src.push(fresh("s")));
                (0..b).for_each(|_| tgt.push(fresh("t")));
                // a star through the first tokens keeps the links one component
                for i in s0..src.len() {
                    for j in t0..tgt.len() {
                        if i == s0 || j == t0 || r.gen_bool(0.4) {
                            links.push((i, j));
                        }
                    }
                }
                gold.push(Edit::substitute(Span::new(s0, src.len()), Span::new(t0, tgt.len())));
            }
        }
        for _ in 0..r.gen_range(1..=2) {
            keep(&mut src, &mut tgt, &mut links, fresh("k"));
        }
    }
    SyntheticRevision {
        src: Sentence::from_text(src.join(" ")),
        tgt: Sentence::from_text(tgt.join(" ")),
        wa: WordAlignment::new(links),
        gold,
    }
}

/// Random bracketed tree text over `leaves`, with occasional unary nodes.
pub fn random_tree_text(r: &mut impl Rng, leaves: &[String]) -> String {
    fn build(r: &mut impl Rng, leaves: &[String], out: &mut String) {
        let label = ["NP", "VP", "PP", "S", "X"].choose(r).unwrap();
        if leaves.len() == 1 {
            if r.gen_bool(0.3) {
                out.push_str(&format!("(U ({label} {}))", leaves[0]));
            } else {
                out.push_str(&format!("({label} {})", leaves[0]));
            }
            return;
        }
        out.push_str(&format!("({label}"));
        let mut rest = leaves;
        while !rest.is_empty() {
            let take = r.gen_range(1..=rest.len().min(if rest.len() == leaves.len() { rest.len() - 1 } else { rest.len() }));
            out.push(' ');
            build(r, &rest[..take], out);
            rest = &rest[take..];
        }
        out.push(')');
    }
    let mut out = String::new();
    build(r, leaves, &mut out);
    out
}

pub fn random_tokens(r: &mut impl Rng, alphabet: &[&str], min: usize, max: usize) -> Vec<String> {
    let n = r.gen_range(min..=max);
    (0..n).map(|_| alphabet.choose(r).unwrap().to_string()).collect()
}

pub fn random_links(r: &mut impl Rng, n: usize, m: usize, density: f64) -> WordAlignment {
    let mut links = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if r.gen_bool(density) {
                links.push((i, j));
            }
        }
    }
    WordAlignment::new(links)
}

type Pair = (Span, Span);

fn merge_fixpoint(mut pairs: Vec<Pair>) -> Vec<Pair> {
    let mut changed = true;
    while changed {
        changed = false;
        let mut out: Vec<Pair> = Vec::new();
        for p in pairs {
            if let Some(q) = out.iter_mut().find(|q| p.0.overlaps(&q.0) || p.1.overlaps(&q.1)) {
                *q = (q.0.hull(&p.0), q.1.hull(&p.1));
                changed = true;
            } else {
                out.push(p);
            }
        }
        pairs = out;
    }
    pairs
}

/// Spans from each node down to the leaf at `i`: entry 0 is the leaf, the last is the root.
fn chain(tree: &ParseTree, i: usize) -> Vec<Span> {
    let mut path = vec![tree.span];
    let mut node = tree;
    while !node.children.is_empty() {
        node = node.children.iter().find(|c| c.span.start <= i && i < c.span.end).unwrap();
        path.push(node.span);
    }
    path.reverse();
    path
}

fn clean(s: Span, t: Span, wa: &WordAlignment) -> bool {
    wa.links.iter().all(|&(x, y)| {
        let (xi, yi) = (s.contains(x), t.contains(y));
        if xi != yi {
            return false;
        }
        xi || ((x < s.start) == (y < t.start))
    })
}

fn trimmed(s: Span, t: Span, src: &[String], tgt: &[String]) -> Option<Edit> {
    let (mut s0, mut s1, mut t0, mut t1) = (s.start, s.end, t.start, t.end);
    while s0 < s1 && t0 < t1 && src[s0] == tgt[t0] {
        s0 += 1;
        t0 += 1;
    }
    while s0 < s1 && t0 < t1 && src[s1 - 1] == tgt[t1 - 1] {
        s1 -= 1;
        t1 -= 1;
    }
    match (s0 < s1, t0 < t1) {
        (false, false) => None,
        (false, true) => Some(Edit::insert(Span::new(t0, t1))),
        (true, false) => Some(Edit::delete(Span::new(s0, s1))),
        (true, true) => Some(Edit::substitute(Span::new(s0, s1), Span::new(t0, t1))),
    }
}

fn runs(len: usize, covered: &[Span]) -> Vec<Span> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < len {
        if covered.iter().any(|c| c.contains(i)) {
            i += 1;
            continue;
        }
        let start = i;
        while i < len && !covered.iter().any(|c| c.contains(i)) {
            i += 1;
        }
        out.push(Span::new(start, i));
    }
    out
}

fn emit_keys(regions: &[Pair], src: &[String], tgt: &[String]) -> BTreeSet<(Option<Span>, Option<Span>, EditKind)> {
    let mut edits: Vec<Edit> = regions.iter().filter_map(|&(s, t)| trimmed(s, t, src, tgt)).collect();
    let s_cov: Vec<Span> = regions.iter().map(|r| r.0).collect();
    let t_cov: Vec<Span> = regions.iter().map(|r| r.1).collect();
    edits.extend(runs(src.len(), &s_cov).into_iter().map(Edit::delete));
    edits.extend(runs(tgt.len(), &t_cov).into_iter().map(Edit::insert));
    edits.iter().map(Edit::key).collect()
}

/// Simple-method regions from scratch: unit link pairs merged until no two overlap.
pub fn simple_oracle(src: &[String], tgt: &[String], wa: &WordAlignment) -> BTreeSet<(Option<Span>, Option<Span>, EditKind)> {
    let units = wa.links.iter().map(|&(i, j)| (Span::new(i, i + 1), Span::new(j, j + 1))).collect();
    emit_keys(&merge_fixpoint(units), src, tgt)
}

/// Tree method by exhaustive search over every ancestor pair within `max_level`.
pub fn tree_oracle(
    src: &[String],
    tgt: &[String],
    wa: &WordAlignment,
    ts: &ParseTree,
    tt: &ParseTree,
    max_level: usize,
) -> BTreeSet<(Option<Span>, Option<Span>, EditKind)> {
    let units = wa.links.iter().map(|&(i, j)| (Span::new(i, i + 1), Span::new(j, j + 1))).collect();
    let regions = merge_fixpoint(units);
    let mut all = regions.clone();
    for &(rs, rt) in &regions {
        if src[rs.range()] == tgt[rt.range()] {
            continue;
        }
        for &(i, j) in wa.links.iter().filter(|(i, _)| rs.contains(*i)) {
            let (ci, cj) = (chain(ts, i), chain(tt, j));
            let mut options = Vec::new();
            for a in 0..=max_level.min(ci.len() - 1) {
                for b in 0..=max_level.min(cj.len() - 1) {
                    if clean(ci[a], cj[b], wa) {
                        options.push(((a.max(b), a + b, a), (ci[a], cj[b])));
                    }
                }
            }
            if let Some((_, pair)) = options.into_iter().min_by_key(|(key, _)| *key) {
                all.push(pair);
            }
        }
    }
    emit_keys(&merge_fixpoint(all), src, tgt)
}
