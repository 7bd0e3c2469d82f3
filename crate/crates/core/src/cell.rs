//! The cellular chain complex of tree-like arc graphs.
//!
//! A cell is a weight-free tree-like graph; its parameter space is the
//! product, over input windows, of the simplex of normalized arc weights at
//! that window, so `dim = |E| - n`. The boundary operator deletes one arc at
//! a time, and the chain-level composition sums over the transversal
//! interleavings of the two glued windows' cut points with orientation signs
//! read off an exact Jacobian of the gluing chart map.
//!
//! Orientation convention: the chart of a cell lists, window by window in
//! label order, the first `k-1` of the window's `k` normalized weights. Face
//! signs are the classical simplicial ones, `(-1)^(s + sum of earlier
//! windows' dimensions)` for deleting slot `s`; composition signs compare
//! the product orientation of the two factor charts against the composite's
//! chart through the (piecewise linear) gluing map.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::enumerate::permutations;
use crate::error::{ArcError, Result};
use crate::glue::compose;
use crate::graph::ArcGraph;
use crate::rational::{q, Q};
use crate::stabilize::st;
use crate::weighted::WeightedArcGraph;

/// A weight-free tree-like cell. Ordering is the canonical graph order, so
/// cells key chains deterministically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    graph: ArcGraph,
}

impl Cell {
    pub fn new(graph: ArcGraph) -> Result<Cell> {
        if !graph.is_gtree() || graph.arity() == 0 {
            return Err(ArcError::NotGTree);
        }
        if let Some(&(arc_a, arc_b)) = graph.parallel_pairs().first() {
            return Err(ArcError::ParallelArcs { arc_a, arc_b });
        }
        Ok(Cell { graph })
    }

    pub fn graph(&self) -> &ArcGraph {
        &self.graph
    }

    pub fn arity(&self) -> usize {
        self.graph.arity()
    }

    pub fn dim(&self) -> usize {
        self.graph.n_arcs() - self.graph.arity()
    }

    /// Dimension of the simplex factor at input window `l`.
    fn window_dim(&self, l: usize) -> usize {
        self.graph.window_sizes()[l] - 1
    }

    /// Relabel the input windows (old label `i` becomes `sigma[i-1]`).
    /// Returns the relabeled cell and the orientation sign: the Koszul sign
    /// of permuting the chart's window blocks into the new order.
    pub fn relabel(&self, sigma: &[usize]) -> Result<(Cell, i64)> {
        let (graph, _) = self.graph.relabel_boundaries(sigma)?;
        let n = self.arity();
        let mut sign = 1i64;
        for l in 1..=n {
            for m in (l + 1)..=n {
                if sigma[l - 1] > sigma[m - 1] && self.window_dim(l) % 2 == 1 && self.window_dim(m) % 2 == 1 {
                    sign = -sign;
                }
            }
        }
        Ok((Cell::new(graph)?, sign))
    }
}

/// An integer chain: a finite formal sum of cells. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Chain {
    terms: BTreeMap<Cell, BigInt>,
}

impl Chain {
    pub fn new() -> Chain {
        Chain::default()
    }

    pub fn unit(cell: Cell) -> Chain {
        let mut c = Chain::new();
        c.add(cell, BigInt::one());
        c
    }

    pub fn add(&mut self, cell: Cell, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(cell) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_chain(&mut self, other: &Chain) {
        for (cell, coeff) in &other.terms {
            self.add(cell.clone(), coeff.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Chain, scale: &BigInt) {
        for (cell, coeff) in &other.terms {
            self.add(cell.clone(), coeff * scale);
        }
    }

    pub fn negate(&mut self) {
        for coeff in self.terms.values_mut() {
            *coeff = -coeff.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, cell: &Cell) -> BigInt {
        self.terms.get(cell).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cell, &BigInt)> {
        self.terms.iter()
    }

    /// Reduce every coefficient into `0..p`, dropping zeros.
    pub fn reduce_mod(&self, p: usize) -> Chain {
        let m = BigInt::from(p);
        let mut out = Chain::new();
        for (cell, coeff) in &self.terms {
            let mut r = coeff % &m;
            if r.is_negative() {
                r += &m;
            }
            out.add(cell.clone(), r);
        }
        out
    }
}

/// Arc index of the arc whose foot fills slot `s` of window `l`.
fn slot_arc(g: &ArcGraph, l: usize, s: usize) -> usize {
    g.arc_index()[g.flat(l, s)]
}

/// The arc weights of window `l` in slot order.
fn window_weights(w: &WeightedArcGraph, l: usize) -> Vec<Q> {
    let g = w.graph();
    (0..g.window_sizes()[l])
        .map(|s| w.weight(slot_arc(g, l, s)).clone())
        .collect()
}

/// Weighted realization of a cell from per-window weight vectors.
fn assemble(g: &ArcGraph, per_window: &[Vec<Q>]) -> Result<WeightedArcGraph> {
    let arcs = g.arcs();
    let mut weights = vec![Q::zero(); arcs.len()];
    for (l, ws) in per_window.iter().enumerate() {
        for (s, wv) in ws.iter().enumerate() {
            weights[slot_arc(g, l + 1, s)] = wv.clone();
        }
    }
    WeightedArcGraph::with_parallel(g.clone(), weights)
}

/// The chart coordinates of a weighted tree-like graph: window by window,
/// the first `k-1` normalized weights.
fn chart_coords(w: &WeightedArcGraph) -> Vec<Q> {
    let g = w.graph();
    let mut out = Vec::new();
    for l in 1..=g.arity() {
        let ws = window_weights(w, l);
        let total: Q = ws.iter().fold(Q::zero(), |acc, x| acc + x);
        for wv in ws.iter().take(ws.len() - 1) {
            out.push(wv / &total);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Boundary
// ---------------------------------------------------------------------------

/// The signed sum of codimension-one faces of `c`: one face per arc whose
/// input window keeps at least one other arc. In the stabilized complex each
/// face is stabilized; faces whose dimension drops by more than one (a
/// consolidation happened) contribute zero.
pub fn boundary(c: &Cell, stabilized: bool) -> Result<Chain> {
    let g = c.graph();
    let weighted = WeightedArcGraph::with_parallel(g.clone(), vec![q(1, 1); g.n_arcs()])?;
    let mut out = Chain::new();
    let mut prefix = 0usize;
    for l in 1..=g.arity() {
        let k = g.window_sizes()[l];
        if k >= 2 {
            for s in 0..k {
                let (face, _) = weighted.delete_arc(slot_arc(g, l, s))?;
                let face_graph = if stabilized {
                    st(&face)?.into_representative().graph().clone()
                } else {
                    face.graph().clone()
                };
                if face_graph.n_arcs() != g.n_arcs() - 1 {
                    continue; // consolidation: degenerate face
                }
                if !stabilized && !face_graph.parallel_pairs().is_empty() {
                    continue; // degenerate in the unreduced complex as well
                }
                let sign = if (prefix + s) % 2 == 0 { 1 } else { -1 };
                out.add(Cell::new(face_graph)?, BigInt::from(sign));
            }
        }
        prefix += k - 1;
    }
    Ok(out)
}

/// Linear extension of `boundary` to chains.
pub fn boundary_chain(c: &Chain, stabilized: bool) -> Result<Chain> {
    let mut out = Chain::new();
    for (cell, coeff) in c.iter() {
        out.add_scaled(&boundary(cell, stabilized)?, coeff);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Chain-level composition
// ---------------------------------------------------------------------------

/// Vectors of `parts` naturals summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn rec(cur: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(cur, pos + 1, left - v, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut cur, 0, total, &mut out);
    out
}

/// Sign of the determinant of an exact rational matrix: +1, -1, or 0.
fn det_sign(mut m: Vec<Vec<Q>>) -> i64 {
    let n = m.len();
    let mut sign = 1i64;
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => return 0,
        };
        if pivot != col {
            m.swap(pivot, col);
            sign = -sign;
        }
        if m[col][col].is_negative() {
            sign = -sign;
        }
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for cc in col..n {
                let sub = &factor * &m[col][cc];
                m[r][cc] -= sub;
            }
        }
    }
    sign
}

/// A perturbation direction: one chart coordinate of the `a` or `b` factor.
#[derive(Clone, Copy)]
struct Dir {
    on_a: bool,
    window: usize,
    slot: usize,
}

fn chart_dirs(g: &ArcGraph, on_a: bool) -> Vec<Dir> {
    let mut dirs = Vec::new();
    for l in 1..=g.arity() {
        for t in 0..g.window_sizes()[l] - 1 {
            dirs.push(Dir {
                on_a,
                window: l,
                slot: t,
            });
        }
    }
    dirs
}

fn perturb(base: &[Vec<Q>], window: usize, slot: usize, h: &Q) -> Vec<Vec<Q>> {
    let mut out = base.to_vec();
    let last = out[window - 1].len() - 1;
    out[window - 1][slot] += h;
    out[window - 1][last] -= h;
    out
}

/// Chain-level operadic composition: glue `b` into window `i` of `a` and
/// expand over the top-dimensional combinatorial types of the glued family,
/// one per interleaving of the two windows' interior cut points. Signs
/// compare product and composite chart orientations through the gluing map,
/// which is linear on each interleaving chamber, so exact finite differences
/// recover the Jacobian exactly.
pub fn chain_compose(a: &Cell, i: usize, b: &Cell, stabilized: bool) -> Result<Chain> {
    let ga = a.graph();
    let gb = b.graph();
    if i == 0 || i > ga.arity() {
        return Err(ArcError::BoundaryOutOfRange {
            index: i,
            arity: ga.arity(),
        });
    }
    let p = ga.window_sizes()[i];
    let q_sz = gb.window_sizes()[0];
    let n_b = gb.arity();

    // Base weights: uniform at every window of b and at the passive windows
    // of a; window i of a is set per interleaving pattern.
    let wb: Vec<Vec<Q>> = (1..=n_b)
        .map(|l| {
            let k = gb.window_sizes()[l];
            vec![q(1, k as i64); k]
        })
        .collect();
    let b_base = assemble(gb, &wb)?;

    // Cut positions of b's output window in the overlay frame: the gluing
    // lays b's window 0 out in reversed slot order and rescales its total
    // width to the width of a's window i (which the chart fixes at 1).
    let u: Vec<Q> = window_weights(&b_base, 0);
    let total_b: Q = u.iter().fold(Q::zero(), |acc, x| acc + x);
    let mut b_cuts = vec![Q::zero()];
    let mut acc = Q::zero();
    for s in (0..q_sz).rev() {
        acc += &u[s] / &total_b;
        b_cuts.push(acc.clone());
    }
    // b_cuts has q_sz + 1 entries, 0 = first < ... < last = 1.

    let dirs: Vec<Dir> = chart_dirs(ga, true)
        .into_iter()
        .chain(chart_dirs(gb, false))
        .collect();
    let want_dim = a.dim() + b.dim();

    let mut out = Chain::new();
    for pattern in compositions(p - 1, q_sz) {
        // Place the pattern's a-cuts at equal subdivisions of their b-gaps.
        let mut a_cuts = vec![Q::zero()];
        for (r, &count) in pattern.iter().enumerate() {
            let lo = &b_cuts[r];
            let hi = &b_cuts[r + 1];
            for j in 1..=count {
                a_cuts.push(lo + (hi - lo) * q(j as i64, (count + 1) as i64));
            }
        }
        a_cuts.push(Q::one());
        let wi: Vec<Q> = a_cuts.windows(2).map(|w| &w[1] - &w[0]).collect();
        let wa: Vec<Vec<Q>> = (1..=ga.arity())
            .map(|l| {
                if l == i {
                    wi.clone()
                } else {
                    let k = ga.window_sizes()[l];
                    vec![q(1, k as i64); k]
                }
            })
            .collect();

        // Safe perturbation size: stay inside the chamber.
        let mut all_cuts: Vec<Q> = a_cuts
            .iter()
            .chain(b_cuts.iter())
            .cloned()
            .collect();
        all_cuts.sort();
        all_cuts.dedup();
        let min_gap = all_cuts
            .windows(2)
            .map(|w| &w[1] - &w[0])
            .min()
            .unwrap_or_else(|| q(1, 1));
        let min_weight = wa
            .iter()
            .chain(wb.iter())
            .flat_map(|v| v.iter())
            .min()
            .cloned()
            .unwrap_or_else(|| q(1, 1));
        let mut h = std::cmp::min(min_gap * q(1, 8), min_weight * q(1, 4));

        let compose_at = |wa: &[Vec<Q>], wb: &[Vec<Q>]| -> Result<WeightedArcGraph> {
            let aw = assemble(ga, wa)?;
            let bw = assemble(gb, wb)?;
            let c = compose(&aw, i, &bw)?;
            if stabilized {
                Ok(st(&c)?.into_representative())
            } else {
                Ok(c)
            }
        };

        let base = compose_at(&wa, &wb)?;
        let c_graph = base.graph().clone();
        if c_graph.n_arcs() < c_graph.arity() || c_graph.n_arcs() - c_graph.arity() != want_dim {
            continue; // degenerate pattern
        }
        let base_chart = chart_coords(&base);
        debug_assert_eq!(base_chart.len(), want_dim);

        // Build the Jacobian columns by exact finite differences; retry with
        // a smaller step if a perturbation ever leaves the chamber.
        let mut cols: Option<Vec<Vec<Q>>> = None;
        'attempt: for _ in 0..48 {
            let mut built = Vec::with_capacity(dirs.len());
            for d in &dirs {
                let (pa, pb) = if d.on_a {
                    (perturb(&wa, d.window, d.slot, &h), wb.clone())
                } else {
                    (wa.clone(), perturb(&wb, d.window, d.slot, &h))
                };
                let moved = compose_at(&pa, &pb)?;
                if moved.graph() != &c_graph {
                    h = &h * q(1, 2);
                    continue 'attempt;
                }
                let chart = chart_coords(&moved);
                built.push(
                    chart
                        .iter()
                        .zip(base_chart.iter())
                        .map(|(x, y)| (x - y) / &h)
                        .collect::<Vec<Q>>(),
                );
            }
            cols = Some(built);
            break;
        }
        let cols = cols.ok_or_else(|| ArcError::SurgeryIntegrity {
            reason: "no stable perturbation step for the composition chart".into(),
        })?;

        // Rows = composite chart coordinates, columns = directions.
        let dim = want_dim;
        let mut matrix = vec![vec![Q::zero(); dim]; dim];
        for (j, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                matrix[r][j] = v.clone();
            }
        }
        let sign = det_sign(matrix);
        if sign != 0 {
            out.add(Cell::new(c_graph)?, BigInt::from(sign));
        }
    }
    Ok(out)
}

/// Bilinear extension of `chain_compose`.
pub fn chain_compose_chains(a: &Chain, i: usize, b: &Chain, stabilized: bool) -> Result<Chain> {
    let mut out = Chain::new();
    for (ca, qa) in a.iter() {
        for (cb, qb) in b.iter() {
            let piece = chain_compose(ca, i, cb, stabilized)?;
            out.add_scaled(&piece, &(qa * qb));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Named cells and classes
// ---------------------------------------------------------------------------

/// The alternating-sequence cell with `i + 2` arcs: window 0 alternates
/// between the two input windows (even slots to window 1), and each input
/// window lists its arcs in reverse window-0 order. Dimension `i`.
pub fn cup(i: usize) -> Result<Cell> {
    let m = i + 2;
    let evens: Vec<usize> = (0..m).step_by(2).collect();
    let odds: Vec<usize> = (1..m).step_by(2).collect();
    let mut arcs = Vec::with_capacity(m);
    for (t, &s) in evens.iter().rev().enumerate() {
        arcs.push(((0, s), (1, t)));
    }
    for (t, &s) in odds.iter().rev().enumerate() {
        arcs.push(((0, s), (2, t)));
    }
    let g = ArcGraph::quasi_filling(vec![m, evens.len(), odds.len()], &arcs)?;
    Cell::new(g)
}

/// `cup(i)` with the two inputs swapped.
pub fn tau_cup(i: usize) -> Result<Cell> {
    Ok(cup(i)?.relabel(&[2, 1])?.0)
}

/// Left-iterated insertion of the one-dimensional alternating cell into its
/// own first slot: `((cup(1) o_1 cup(1)) o_1 cup(1)) ...`, a degree `p - 1`
/// chain on `p` inputs. Its summands are the top-dimensional planar trees
/// whose vertex partial order is compatible with the linear order of the
/// labels.
fn left_iterate(p: usize) -> Result<Chain> {
    let cup1 = Chain::unit(cup(1)?);
    let mut cur = cup1.clone();
    for _ in 2..p {
        cur = chain_compose_chains(&cur, 1, &cup1, true)?;
    }
    Ok(cur)
}

/// Order of first appearance of each label in a window sequence.
fn first_visit_order(seq: &[usize]) -> Vec<usize> {
    let mut seen = Vec::new();
    for &w in seq {
        if !seen.contains(&w) {
            seen.push(w);
        }
    }
    seen
}

/// Apply the signed relabeling `sigma` to every cell of a chain.
fn relabel_chain(c: &Chain, sigma: &[usize]) -> Result<Chain> {
    let mut out = Chain::new();
    for (cell, coeff) in c.iter() {
        let (rc, orient) = cell.relabel(sigma)?;
        out.add(rc, coeff * BigInt::from(orient));
    }
    Ok(out)
}

/// The degree `p - 1` stabilized cycle class on `p` inputs. For `p = 2` it
/// is the one-dimensional alternating cell itself. For `p >= 3` it is the
/// cyclic sign-symmetrization of the planar part of the left iterate: keep
/// the summands whose lobes are first visited in ascending label order,
/// then sum the signed translates under the cyclic rotation of the labels.
/// Cyclic equivariance collects the faces of the boundary into coherent
/// orbits of length `p`, so the boundary vanishes in the sign-twisted
/// coinvariants mod `p`.
pub fn dl_class(p: usize) -> Result<Chain> {
    if p < 2 {
        return Err(ArcError::Malformed {
            reason: "the iterated class needs at least two inputs".into(),
        });
    }
    let iterate = left_iterate(p)?;
    if p == 2 {
        return Ok(iterate);
    }
    let ascending: Vec<usize> = (1..=p).collect();
    let mut seed = Chain::new();
    for (cell, coeff) in iterate.iter() {
        let seq = cell.graph().seq()?;
        if first_visit_order(&seq) == ascending {
            seed.add(cell.clone(), coeff.clone());
        }
    }
    let rho: Vec<usize> = (1..=p).map(|l| l % p + 1).collect();
    let rho_negates = p % 2 == 0;
    let mut out = Chain::new();
    let mut cur = seed;
    for k in 0..p {
        out.add_chain(&cur);
        if k + 1 < p {
            cur = relabel_chain(&cur, &rho)?;
            if rho_negates {
                cur.negate();
            }
        }
    }
    Ok(out)
}

/// Parity of a permutation given in 0-indexed image form.
fn perm_sign(perm: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Reduce a chain of `p`-ary cells into the sign-twisted coinvariants mod
/// `p`: each cell is transported to the minimal graph in its relabeling
/// orbit with the sign-character coefficient. A cell fixed by a relabeling
/// of total sign -1 represents a 2-torsion class, which vanishes mod odd
/// `p`.
pub fn coinvariant_reduce(c: &Chain, p: usize) -> Result<Chain> {
    let mut out = Chain::new();
    for (cell, coeff) in c.iter() {
        if cell.arity() != p {
            return Err(ArcError::ArityMismatch {
                expected: p,
                got: cell.arity(),
            });
        }
        let mut transported: BTreeMap<ArcGraph, Vec<i64>> = BTreeMap::new();
        for perm in permutations(p) {
            let sigma: Vec<usize> = perm.iter().map(|&x| x + 1).collect();
            let (rc, orient) = cell.relabel(&sigma)?;
            let total = orient * perm_sign(&perm);
            transported.entry(rc.graph).or_default().push(total);
        }
        let (rep, signs) = transported.iter().next().expect("orbit is nonempty");
        let two_torsion = signs.iter().any(|&s| s != signs[0]);
        if two_torsion && p % 2 == 1 {
            continue;
        }
        out.add(Cell::new(rep.clone())?, coeff * BigInt::from(signs[0]));
    }
    Ok(out.reduce_mod(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_graphs, EnumerateOptions};
    use crate::graph::ArcGraph;

    fn corolla() -> Cell {
        cup(0).unwrap()
    }

    fn cells(arity: usize, max_arcs: usize, quasi: bool, max_defect: usize) -> Vec<Cell> {
        let mut opts = EnumerateOptions::new(arity, max_arcs);
        opts.quasi_filling = quasi;
        opts.max_defect = if quasi { 0 } else { max_defect };
        enumerate_graphs(&opts)
            .unwrap()
            .into_iter()
            .filter_map(|g| Cell::new(g).ok())
            .collect()
    }

    #[test]
    fn cup_cells_have_the_stated_shape() {
        for i in 0..6 {
            let c = cup(i).unwrap();
            assert_eq!(c.dim(), i);
            assert_eq!(c.arity(), 2);
            let g = c.graph();
            assert!(g.is_lgtree());
            assert!(g.is_quasi_filling());
            let seq = g.seq().unwrap();
            assert_eq!(seq.len(), i + 2);
            for (s, &w) in seq.iter().enumerate() {
                assert_eq!(w, 1 + s % 2);
            }
            assert_eq!(g.ambient_genus(), (i / 2) as i64);
        }
    }

    #[test]
    fn boundary_of_the_one_dimensional_cell_is_the_commutator() {
        let c = cup(1).unwrap();
        let b = boundary(&c, true).unwrap();
        let mu = corolla();
        let tau_mu = tau_cup(0).unwrap();
        assert_eq!(b.len(), 2);
        let x = b.coeff(&mu);
        let y = b.coeff(&tau_mu);
        assert_eq!(x, -y);
        assert_eq!(x.abs(), BigInt::one());
        // Unstabilized: same two faces (the deletions create no parallels).
        assert_eq!(boundary(&c, false).unwrap().len(), 2);
    }

    #[test]
    fn boundary_of_the_two_dimensional_cell_kills_interior_deletions() {
        let c = cup(2).unwrap();
        let b = boundary(&c, true).unwrap();
        assert_eq!(b.len(), 2);
        let c1 = cup(1).unwrap();
        let t1 = tau_cup(1).unwrap();
        assert_eq!(b.coeff(&c1).abs(), BigInt::one());
        assert_eq!(b.coeff(&t1).abs(), BigInt::one());
    }

    #[test]
    fn boundary_of_dimension_zero_cells_vanishes() {
        assert!(boundary(&corolla(), true).unwrap().is_zero());
        assert!(boundary(&corolla(), false).unwrap().is_zero());
    }

    #[test]
    fn boundary_squares_to_zero() {
        // Stabilized complex on quasi-filling cells.
        for arity in 1..=2 {
            for cell in cells(arity, 4, true, 0) {
                let b = boundary(&cell, true).unwrap();
                let bb = boundary_chain(&b, true).unwrap();
                assert!(bb.is_zero(), "stabilized d^2 != 0 on {cell:?}");
            }
        }
        // Unstabilized complex, allowing decorated (defect <= 2) cells.
        for arity in 1..=2 {
            for cell in cells(arity, 4, false, 2) {
                let b = boundary(&cell, false).unwrap();
                let bb = boundary_chain(&b, false).unwrap();
                assert!(bb.is_zero(), "unstabilized d^2 != 0 on {cell:?}");
            }
        }
    }

    #[test]
    fn corolla_compositions_agree_on_the_zero_skeleton() {
        // Gluing a corolla into either slot of a corolla traverses the same
        // three lobes in the same order, so both bracketings land on the one
        // zero-cell with sequence (1,2,3): the dimension-zero subcomplex is
        // strictly associative.
        let mu = corolla();
        let left = chain_compose(&mu, 1, &mu, false).unwrap();
        let right = chain_compose(&mu, 2, &mu, false).unwrap();
        assert_eq!(left.len(), 1);
        assert_eq!(right.len(), 1);
        let lc = left.iter().next().unwrap().0.clone();
        let rc = right.iter().next().unwrap().0.clone();
        assert_eq!(lc.dim(), 0);
        assert_eq!(lc, rc);
        assert_eq!(lc.graph().seq().unwrap(), vec![1, 2, 3]);
        assert_eq!(left.coeff(&lc), BigInt::from(1));
        assert_eq!(right.coeff(&rc), BigInt::from(1));
    }

    #[test]
    fn composition_dimensions_add() {
        let c1 = cup(1).unwrap();
        for i in [1, 2] {
            let ch = chain_compose(&c1, i, &c1, true).unwrap();
            assert!(!ch.is_zero());
            for (cell, _) in ch.iter() {
                assert_eq!(cell.dim(), 2);
                assert_eq!(cell.arity(), 3);
            }
            // p = q = 3 gives C(4, 2) = 6 interleavings; the generic count
            // of surviving top cells is at most that.
            assert!(ch.len() <= 6);
        }
    }

    #[test]
    fn leibniz_rule_for_chain_composition() {
        let mut samples: Vec<Cell> = Vec::new();
        samples.push(cup(1).unwrap());
        samples.push(cup(2).unwrap());
        samples.extend(cells(1, 3, true, 0));
        samples.extend(cells(2, 3, true, 0));
        for a in &samples {
            for b in &samples {
                for i in 1..=a.arity() {
                    let ab = chain_compose(a, i, b, true).unwrap();
                    let mut lhs = boundary_chain(&ab, true).unwrap();
                    let da = boundary(a, true).unwrap();
                    let db = boundary(b, true).unwrap();
                    let mut rhs = chain_compose_chains(&da, i, &Chain::unit(b.clone()), true).unwrap();
                    let mut second =
                        chain_compose_chains(&Chain::unit(a.clone()), i, &db, true).unwrap();
                    if a.dim() % 2 == 1 {
                        second.negate();
                    }
                    rhs.add_chain(&second);
                    lhs.negate();
                    rhs.add_chain(&lhs);
                    assert!(
                        rhs.is_zero(),
                        "Leibniz fails for dims {}/{} at slot {i}",
                        a.dim(),
                        b.dim()
                    );
                }
            }
        }
    }

    #[test]
    fn nested_associativity_of_chain_composition() {
        let mu = corolla();
        let c1 = cup(1).unwrap();
        for (a, b, c) in [
            (&mu, &mu, &mu),
            (&c1, &mu, &mu),
            (&mu, &c1, &mu),
            (&c1, &c1, &mu),
            (&c1, &mu, &c1),
        ] {
            // (a o_1 b) with c inserted inside b equals a o_1 (b o_1 c).
            let ab = chain_compose(a, 1, b, true).unwrap();
            let lhs = chain_compose_chains(&ab, 1, &Chain::unit(c.clone()), true).unwrap();
            let bc = chain_compose(b, 1, c, true).unwrap();
            let rhs = chain_compose_chains(&Chain::unit(a.clone()), 1, &bc, true).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn horizontal_exchange_has_the_koszul_sign() {
        // For a 2-ary a: (a o_1 b) o_(1+|b|) c = (-1)^(dim b dim c) (a o_2 c) o_1 b.
        let a = corolla();
        let b = cup(1).unwrap();
        let c = cup(1).unwrap();
        let ab = chain_compose(&a, 1, &b, true).unwrap();
        let lhs = chain_compose_chains(&ab, 1 + b.arity(), &Chain::unit(c.clone()), true).unwrap();
        let ac = chain_compose(&a, 2, &c, true).unwrap();
        let mut rhs = chain_compose_chains(&ac, 1, &Chain::unit(b.clone()), true).unwrap();
        if (b.dim() * c.dim()) % 2 == 1 {
            rhs.negate();
        }
        assert_eq!(lhs, rhs);
    }

    /// Distinct relabeling orbits among the cells supporting a chain.
    fn support_orbit_count(c: &Chain) -> usize {
        let mut reps = std::collections::BTreeSet::new();
        for (cell, _) in c.iter() {
            let p = cell.arity();
            let mut min_graph: Option<ArcGraph> = None;
            for perm in crate::enumerate::permutations(p) {
                let sigma: Vec<usize> = perm.iter().map(|&x| x + 1).collect();
                let (rc, _) = cell.relabel(&sigma).unwrap();
                let g = rc.graph().clone();
                if min_graph.as_ref().is_none_or(|m| g < *m) {
                    min_graph = Some(g);
                }
            }
            reps.insert(min_graph.unwrap());
        }
        reps.len()
    }

    #[test]
    fn iterated_class_has_the_hexagon_shape() {
        let d3 = dl_class(3).unwrap();
        assert_eq!(d3.len(), 6);
        for (cell, coeff) in d3.iter() {
            assert_eq!(cell.dim(), 2);
            assert_eq!(cell.arity(), 3);
            assert_eq!(coeff.abs(), BigInt::one());
        }
        // Its boundary is a cycle in the sign-twisted coinvariants mod 3.
        let b = boundary_chain(&d3, true).unwrap();
        let reduced = coinvariant_reduce(&b, 3).unwrap();
        assert!(reduced.is_zero(), "reduced boundary: {reduced:?}");
        // The six cells pair into two relabeling-orbit classes: three
        // one-lobe-over-two triangles and three chain-of-lobes squares.
        assert_eq!(support_orbit_count(&d3), 2);
    }

    #[test]
    fn left_iterate_reduces_to_a_nonzero_coinvariant_cycle() {
        // The plain left iterate is smaller (one cell per compatible planar
        // tree) and still a cycle mod 3; unlike the symmetrized class it
        // stays nonzero in the coinvariants, exhibiting the top homology.
        let l = left_iterate(3).unwrap();
        assert_eq!(l.len(), 3);
        let b = boundary_chain(&l, true).unwrap();
        assert!(coinvariant_reduce(&b, 3).unwrap().is_zero());
        assert!(!coinvariant_reduce(&l, 3).unwrap().is_zero());
    }

    #[test]
    fn coinvariant_reduction_kills_the_commutator_mod_two() {
        let b = boundary(&cup(1).unwrap(), true).unwrap();
        let reduced = coinvariant_reduce(&b, 2).unwrap();
        assert!(reduced.is_zero());
    }

    #[test]
    fn coinvariant_reduction_fixes_symmetric_free_chains() {
        // A chain supported on one asymmetric orbit representative keeps one
        // term with a unit coefficient.
        let mu = corolla();
        let reduced = coinvariant_reduce(&Chain::unit(mu), 2).unwrap();
        assert_eq!(reduced.len(), 1);
    }

    #[test]
    fn relabeling_signs_are_involutive() {
        for i in 0..4 {
            let c = cup(i).unwrap();
            let (t, s1) = c.relabel(&[2, 1]).unwrap();
            let (back, s2) = t.relabel(&[2, 1]).unwrap();
            assert_eq!(back, c);
            assert_eq!(s1 * s2, 1);
        }
    }

    #[test]
    fn cells_reject_non_tree_graphs() {
        let pants = ArcGraph::quasi_filling(
            vec![2, 2, 2],
            &[((0, 0), (1, 0)), ((0, 1), (2, 0)), ((1, 1), (2, 1))],
        )
        .unwrap();
        assert!(Cell::new(pants).is_err());
        let twisted = crate::weighted::WeightedArcGraph::twist(&q(1, 3));
        assert!(Cell::new(twisted.graph().clone()).is_ok());
    }
}
