//! Exhaustive enumeration of tree-like arc graphs with bounded arc count
//! and bounded decoration defect.
//!
//! A tree-like skeleton is determined by the window-0 target word (which
//! input window each output slot connects to) together with a linear order
//! of each input window's arcs. Decorations are assignments of face orbits
//! to regions plus a genus per region; the enumeration bounds the total
//! defect (merged orbits plus genus) so the search space stays finite.

use crate::error::{ArcError, Result};
use crate::graph::ArcGraph;

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    /// Number of input windows. Zero enumerates the closed-surface
    /// elements by genus up to `max_defect`.
    pub arity: usize,
    pub max_arcs: usize,
    pub min_arcs: usize,
    /// Bound on the negated Euler defect: (orbits - regions) plus twice
    /// the total region genus.
    pub max_defect: usize,
    /// Keep only graphs with this ambient genus.
    pub ambient_genus: Option<i64>,
    /// Keep only graphs untwisted at every window.
    pub untwisted: bool,
    /// Keep only linearly anti-compatible graphs.
    pub lgtree: bool,
    /// Keep only quasi-filling decorations.
    pub quasi_filling: bool,
    /// Abort if the raw search would visit more than this many decorated
    /// candidates.
    pub limit: u64,
}

impl EnumerateOptions {
    pub fn new(arity: usize, max_arcs: usize) -> Self {
        EnumerateOptions {
            arity,
            max_arcs,
            min_arcs: arity.max(1),
            max_defect: 2,
            ambient_genus: None,
            untwisted: false,
            lgtree: false,
            quasi_filling: false,
            limit: 20_000_000,
        }
    }

    pub fn quasi_filling_only(mut self) -> Self {
        self.quasi_filling = true;
        self.max_defect = 0;
        self
    }
}

/// All window-0 target words of length `m` over `1..=n` using every letter.
fn target_words(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut word = vec![0usize; m];
    fn rec(word: &mut Vec<usize>, pos: usize, n: usize, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let m = word.len();
        if pos == m {
            if used.iter().all(|&u| u) {
                out.push(word.clone());
            }
            return;
        }
        let missing = used.iter().filter(|&&u| !u).count();
        if missing > m - pos {
            return;
        }
        for t in 1..=n {
            word[pos] = t;
            let fresh = !used[t - 1];
            if fresh {
                used[t - 1] = true;
            }
            rec(word, pos + 1, n, used, out);
            if fresh {
                used[t - 1] = false;
            }
        }
    }
    let mut used = vec![false; n];
    rec(&mut word, 0, n, &mut used, &mut out);
    out
}

pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    fn heap(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(cur, k - 1, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(&mut cur, k, &mut out);
    out
}

/// Set partitions of `0..n` as restricted-growth strings, keeping only
/// those merging at most `max_merge` elements (n - #blocks <= max_merge).
fn set_partitions(n: usize, max_merge: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(rgs: &mut Vec<usize>, pos: usize, max_so_far: usize, max_merge: usize, out: &mut Vec<Vec<usize>>) {
        let n = rgs.len();
        if pos == n {
            if n - max_so_far <= max_merge {
                out.push(rgs.clone());
            }
            return;
        }
        // Merges committed so far among the first `pos` entries.
        let blocks = max_so_far;
        let merged = pos - blocks;
        if merged > max_merge {
            return;
        }
        for v in 0..=max_so_far.min(pos) {
            rgs[pos] = v;
            let nm = max_so_far.max(v + 1);
            rec(rgs, pos + 1, nm, max_merge, out);
        }
    }
    rec(&mut rgs, 0, 0, max_merge, &mut out);
    out
}

/// Genus vectors of length `k` with entries summing to at most `budget`,
/// in lexicographic order.
fn genus_vectors(k: usize, budget: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(cur: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for g in 0..=left {
            cur[pos] = g;
            rec(cur, pos + 1, left - g, out);
        }
        cur[pos] = 0;
    }
    rec(&mut cur, 0, budget, &mut out);
    out
}

/// Exhaustively enumerate decorated tree-like graphs matching the options,
/// in a deterministic order.
pub fn enumerate_graphs(opts: &EnumerateOptions) -> Result<Vec<ArcGraph>> {
    let mut out = Vec::new();
    if opts.arity == 0 {
        for g in 0..=opts.max_defect / 2 {
            let graph = ArcGraph::zero_ary(g);
            if let Some(target) = opts.ambient_genus {
                if graph.ambient_genus() != target {
                    continue;
                }
            }
            if opts.quasi_filling && !graph.is_quasi_filling() {
                continue;
            }
            out.push(graph);
        }
        return Ok(out);
    }

    let mut visited: u64 = 0;
    for m in opts.min_arcs.max(opts.arity)..=opts.max_arcs {
        for word in target_words(opts.arity, m) {
            // Positions in window-0 order going to each input window.
            let mut positions: Vec<Vec<usize>> = vec![Vec::new(); opts.arity];
            for (s, &t) in word.iter().enumerate() {
                positions[t - 1].push(s);
            }
            let sizes: Vec<usize> = positions.iter().map(|p| p.len()).collect();
            let mut window_sizes = vec![m];
            window_sizes.extend(sizes.iter().copied());

            // Choose a linear order per input window.
            let perms_per: Vec<Vec<Vec<usize>>> =
                sizes.iter().map(|&k| permutations(k)).collect();
            let mut idx = vec![0usize; opts.arity];
            loop {
                visited += 1;
                if visited > opts.limit {
                    return Err(ArcError::EnumerationTooLarge {
                        estimate: visited as u128,
                        limit: opts.limit as u128,
                    });
                }
                let mut arcs: Vec<((usize, usize), (usize, usize))> = Vec::with_capacity(m);
                for (l, pos) in positions.iter().enumerate() {
                    let perm = &perms_per[l][idx[l]];
                    for (slot, &which) in perm.iter().enumerate() {
                        arcs.push(((0, pos[which]), (l + 1, slot)));
                    }
                }
                if let Ok(skeleton) = ArcGraph::quasi_filling(window_sizes.clone(), &arcs) {
                    push_decorations(&skeleton, &arcs, &window_sizes, opts, &mut visited, &mut out)?;
                }

                // Advance the mixed-radix ordering index.
                let mut l = 0;
                loop {
                    if l == opts.arity {
                        break;
                    }
                    idx[l] += 1;
                    if idx[l] < perms_per[l].len() {
                        break;
                    }
                    idx[l] = 0;
                    l += 1;
                }
                if l == opts.arity {
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn push_decorations(
    skeleton: &ArcGraph,
    arcs: &[((usize, usize), (usize, usize))],
    window_sizes: &[usize],
    opts: &EnumerateOptions,
    visited: &mut u64,
    out: &mut Vec<ArcGraph>,
) -> Result<()> {
    let n_orbits = skeleton.face_trace().orbits.len();
    let partitions = if opts.quasi_filling {
        vec![(0..n_orbits).collect::<Vec<usize>>()]
    } else {
        set_partitions(n_orbits, opts.max_defect)
    };
    for part in partitions {
        let n_parts = part.iter().copied().max().map_or(0, |x| x + 1);
        let merge_defect = n_orbits - n_parts;
        let genus_budget = if opts.quasi_filling {
            0
        } else {
            (opts.max_defect - merge_defect) / 2
        };
        for genera in genus_vectors(n_parts, genus_budget) {
            *visited += 1;
            if *visited > opts.limit {
                return Err(ArcError::EnumerationTooLarge {
                    estimate: *visited as u128,
                    limit: opts.limit as u128,
                });
            }
            let g = match ArcGraph::from_parts_with(
                window_sizes.to_vec(),
                arcs,
                Some((part.clone(), genera)),
            ) {
                Ok(g) => g,
                Err(_) => continue,
            };
            if !g.parallel_pairs().is_empty() {
                continue;
            }
            if let Some(target) = opts.ambient_genus {
                if g.ambient_genus() != target {
                    continue;
                }
            }
            if opts.quasi_filling && !g.is_quasi_filling() {
                continue;
            }
            if opts.untwisted && !g.is_untwisted() {
                continue;
            }
            if opts.lgtree && !g.is_lgtree() {
                continue;
            }
            out.push(g);
        }
    }
    Ok(())
}
