//! Complete-graph labels for cells, pairwise projections, the induced
//! filtration of the cell complex, and the surjection-sequence complexity.
//!
//! A complete-graph element assigns a natural number to every unordered
//! pair of letters and carries a permutation; composition follows the block
//! rule. Cells project to two-input cells by capping off all windows except
//! a chosen pair, and the filtration level of a cell is one more than the
//! largest projected dimension. On sequences the matching invariant is the
//! maximal number of alternations between any two letters.

use crate::cell::{cup, Cell};
use crate::error::{ArcError, Result};
use crate::glue::compose;
use crate::graph::ArcGraph;
use crate::rational::{q, Q};
use crate::stabilize::st;
use crate::weighted::WeightedArcGraph;

/// An element of the complete-graphs operad: one natural number per pair
/// `1 <= i < j <= p` plus a permutation of the `p` letters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KElement {
    p: usize,
    /// Pair labels in lexicographic pair order (1,2), (1,3), ..., (p-1,p).
    mu: Vec<usize>,
    /// `sigma[k]` is the image of letter `k + 1`, a value in `1..=p`.
    sigma: Vec<usize>,
}

fn pair_index(p: usize, i: usize, j: usize) -> Result<usize> {
    if !(1 <= i && i < j && j <= p) {
        return Err(ArcError::BoundaryOutOfRange { index: j, arity: p });
    }
    // Pairs (1,2)..(1,p) come first, then (2,3)..(2,p), and so on.
    Ok((i - 1) * p - (i - 1) * i / 2 + (j - i - 1))
}

fn is_permutation(sigma: &[usize]) -> bool {
    let p = sigma.len();
    let mut seen = vec![false; p];
    for &v in sigma {
        if v < 1 || v > p || seen[v - 1] {
            return false;
        }
        seen[v - 1] = true;
    }
    true
}

impl KElement {
    /// Build from the pair labels in lexicographic pair order and the
    /// one-line permutation.
    pub fn new(p: usize, mu: Vec<usize>, sigma: Vec<usize>) -> Result<KElement> {
        if mu.len() != p * (p.max(1) - 1) / 2 {
            return Err(ArcError::Malformed {
                reason: format!(
                    "expected {} pair labels for {p} letters, got {}",
                    p * (p.max(1) - 1) / 2,
                    mu.len()
                ),
            });
        }
        if sigma.len() != p || !is_permutation(&sigma) {
            return Err(ArcError::Malformed {
                reason: "sigma is not a permutation of the letters".into(),
            });
        }
        Ok(KElement { p, mu, sigma })
    }

    pub fn identity() -> KElement {
        KElement {
            p: 1,
            mu: Vec::new(),
            sigma: vec![1],
        }
    }

    pub fn arity(&self) -> usize {
        self.p
    }

    pub fn mu(&self, i: usize, j: usize) -> Result<usize> {
        Ok(self.mu[pair_index(self.p, i, j)?])
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// Right action of a permutation on the letters: relabel pairs through
    /// `tau` and precompose the permutation part.
    pub fn act(&self, tau: &[usize]) -> Result<KElement> {
        if tau.len() != self.p || !is_permutation(tau) {
            return Err(ArcError::Malformed {
                reason: "tau is not a permutation of the letters".into(),
            });
        }
        let mut mu = vec![0usize; self.mu.len()];
        for i in 1..=self.p {
            for j in (i + 1)..=self.p {
                let (a, b) = (tau[i - 1].min(tau[j - 1]), tau[i - 1].max(tau[j - 1]));
                mu[pair_index(self.p, i, j)?] = self.mu(a, b)?;
            }
        }
        let sigma = tau.iter().map(|&t| self.sigma[t - 1]).collect();
        KElement::new(self.p, mu, sigma)
    }

    /// Projection onto the two-letter element carried by the pair `(i, j)`.
    pub fn phi_star(&self, i: usize, j: usize) -> Result<KElement> {
        if i == j {
            return Err(ArcError::Malformed {
                reason: "projection needs two distinct letters".into(),
            });
        }
        let (i, j) = (i.min(j), i.max(j));
        let sigma = if self.sigma[i - 1] < self.sigma[j - 1] {
            vec![1, 2]
        } else {
            vec![2, 1]
        };
        KElement::new(2, vec![self.mu(i, j)?], sigma)
    }
}

/// The block permutation of `sigma` with block sizes `q`: blocks move as
/// `sigma` prescribes, order within each block is preserved.
fn block_permutation(sigma: &[usize], q: &[usize]) -> Vec<usize> {
    let p = sigma.len();
    let mut out_offsets = vec![0usize; p];
    // Output position offset of block r: total size of blocks placed
    // before image position sigma[r].
    for r in 0..p {
        let mut off = 0;
        for s in 0..p {
            if sigma[s] < sigma[r] {
                off += q[s];
            }
        }
        out_offsets[r] = off;
    }
    let mut out = Vec::with_capacity(q.iter().sum());
    for r in 0..p {
        for a in 0..q[r] {
            out.push(out_offsets[r] + a + 1);
        }
    }
    out
}

/// Operadic composition by the block rule: pairs inside block `r` keep the
/// inner labels, pairs across blocks `r != s` take the outer label of
/// `(r, s)`; the permutation is the block permutation of the outer one
/// refined by the inner ones.
pub fn k_compose(outer: &KElement, inners: &[KElement]) -> Result<KElement> {
    if inners.len() != outer.p {
        return Err(ArcError::ArityMismatch {
            expected: outer.p,
            got: inners.len(),
        });
    }
    let q: Vec<usize> = inners.iter().map(|x| x.p).collect();
    let total: usize = q.iter().sum();
    let mut offsets = vec![0usize; outer.p];
    for r in 1..outer.p {
        offsets[r] = offsets[r - 1] + q[r - 1];
    }
    let block_of = |letter: usize| -> usize {
        (0..outer.p)
            .rfind(|&r| letter > offsets[r])
            .expect("letters start at 1")
    };

    let mut mu = vec![0usize; total * (total.max(1) - 1) / 2];
    for u in 1..=total {
        for v in (u + 1)..=total {
            let (r, s) = (block_of(u), block_of(v));
            mu[pair_index(total, u, v)?] = if r == s {
                inners[r].mu(u - offsets[r], v - offsets[r])?
            } else {
                outer.mu(r + 1, s + 1)?
            };
        }
    }

    // Refine the block permutation: block r lands where the outer sigma
    // sends it, and the inner sigma shuffles the block internally.
    let coarse = block_permutation(&outer.sigma, &q);
    let mut sigma = vec![0usize; total];
    for r in 0..outer.p {
        let base = coarse[offsets[r]] - 1;
        for a in 0..q[r] {
            sigma[offsets[r] + a] = base + inners[r].sigma[a];
        }
    }
    KElement::new(total, mu, sigma)
}

/// Berger's partial order: `a <= b` when every pair either projects equally
/// or has a strictly smaller label in `a`.
pub fn k_leq(a: &KElement, b: &KElement) -> Result<bool> {
    if a.p != b.p {
        return Err(ArcError::ArityMismatch {
            expected: a.p,
            got: b.p,
        });
    }
    if a.p < 2 {
        return Ok(a == b);
    }
    for i in 1..=a.p {
        for j in (i + 1)..=a.p {
            if a.phi_star(i, j)? != b.phi_star(i, j)? && a.mu(i, j)? >= b.mu(i, j)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Project a cell onto an input pair: cap every other window of a weighted
/// interior representative (in descending index order), stabilize, and read
/// off the two-input cell. Whether arcs consolidate is independent of the
/// interior weights, so the result is well defined on the cell.
pub fn phi_star(c: &Cell, i: usize, j: usize) -> Result<Cell> {
    let p = c.arity();
    if i == j {
        return Err(ArcError::Malformed {
            reason: "projection needs two distinct windows".into(),
        });
    }
    let (i, j) = (i.min(j), i.max(j));
    if i < 1 || j > p {
        return Err(ArcError::BoundaryOutOfRange { index: j, arity: p });
    }
    let graph = c.graph().clone();
    let n_arcs = graph.n_arcs();
    let mut w = WeightedArcGraph::new(graph, vec![q(1, 1); n_arcs])?;
    for k in (1..=p).rev() {
        if k == i || k == j {
            continue;
        }
        w = compose(&w, k, &WeightedArcGraph::zero_ary(0))?;
    }
    Cell::new(st(&w)?.representative().graph().clone())
}

/// Filtration level of a cell: one more than the largest dimension of a
/// pairwise projection (one for single-input cells).
pub fn filtration_level(c: &Cell) -> Result<usize> {
    let p = c.arity();
    let mut level = 1;
    for i in 1..=p {
        for j in (i + 1)..=p {
            level = level.max(1 + phi_star(c, i, j)?.dim());
        }
    }
    Ok(level)
}

/// Maximal number of alternations between two letters in a sequence; the
/// empty maximum is floored at one so single-letter sequences (unary
/// brackets) sit in the first stage, matching the filtration.
pub fn ms_complexity(s: &[usize]) -> usize {
    let mut letters: Vec<usize> = s.to_vec();
    letters.sort_unstable();
    letters.dedup();
    let mut best = usize::from(!s.is_empty());
    for (a, &x) in letters.iter().enumerate() {
        for &y in letters.iter().skip(a + 1) {
            let restricted: Vec<usize> = s.iter().copied().filter(|&l| l == x || l == y).collect();
            let changes = restricted.windows(2).filter(|w| w[0] != w[1]).count();
            best = best.max(changes);
        }
    }
    best
}

/// The weighted interior point of the `n`-th alternating cell, with uniform
/// weights normalizing each input window to one.
fn alternating_interior_point(n: usize) -> Result<WeightedArcGraph> {
    let base: ArcGraph = cup(n)?.graph().clone();
    let sizes = base.window_sizes().to_vec();
    let arcs = base.arcs();
    let weights: Vec<Q> = (0..base.n_arcs())
        .map(|k| {
            let (x, y) = arcs[k];
            let w_in = base.addr(x).0.max(base.addr(y).0);
            q(1, sizes[w_in] as i64)
        })
        .collect();
    WeightedArcGraph::new(base, weights)
}

/// The ordered point witnessing level `n + 1` on `p` inputs: the interior
/// alternating point glued into itself at windows `2, 3, ..., p - 1`.
pub fn ordered_point(p: usize, n: usize) -> Result<WeightedArcGraph> {
    if p < 2 {
        return Err(ArcError::Malformed {
            reason: "ordered points need at least two inputs".into(),
        });
    }
    let unit = alternating_interior_point(n)?;
    let mut x = unit.clone();
    for slot in 2..p {
        x = compose(&x, slot, &unit)?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::dl_class;
    use crate::enumerate::{enumerate_graphs, permutations, EnumerateOptions};

    fn k2(mu: usize, swap: bool) -> KElement {
        let sigma = if swap { vec![2, 1] } else { vec![1, 2] };
        KElement::new(2, vec![mu], sigma).unwrap()
    }

    fn all_k(p: usize, max_mu: usize) -> Vec<KElement> {
        let n_pairs = p * (p - 1) / 2;
        let mut mus = vec![vec![]];
        for _ in 0..n_pairs {
            let mut next = Vec::new();
            for m in mus {
                for v in 0..=max_mu {
                    let mut m2: Vec<usize> = m.clone();
                    m2.push(v);
                    next.push(m2);
                }
            }
            mus = next;
        }
        let mut out = Vec::new();
        for m in &mus {
            for perm in permutations(p) {
                let sigma: Vec<usize> = perm.iter().map(|&x| x + 1).collect();
                out.push(KElement::new(p, m.clone(), sigma).unwrap());
            }
        }
        out
    }

    #[test]
    fn composition_with_identities_is_the_identity_action() {
        for outer in all_k(3, 2) {
            let inners = vec![KElement::identity(); 3];
            assert_eq!(k_compose(&outer, &inners).unwrap(), outer);
        }
        for inner in all_k(3, 2) {
            let outer = KElement::identity();
            assert_eq!(k_compose(&outer, &[inner.clone()]).unwrap(), inner);
        }
    }

    #[test]
    fn block_composition_hand_expansion() {
        // outer = (mu12 = 2, swap), inners both 2-ary: letters (1,2 | 3,4).
        // Cross-block pairs all read the outer label; the swap sends block 1
        // after block 2 and the second inner's swap flips 3,4.
        let outer = k2(2, true);
        let inner1 = k2(0, false);
        let inner2 = k2(1, true);
        let c = k_compose(&outer, &[inner1, inner2]).unwrap();
        assert_eq!(c.arity(), 4);
        assert_eq!(c.mu(1, 2).unwrap(), 0);
        assert_eq!(c.mu(3, 4).unwrap(), 1);
        for (i, j) in [(1, 3), (1, 4), (2, 3), (2, 4)] {
            assert_eq!(c.mu(i, j).unwrap(), 2);
        }
        assert_eq!(c.sigma(), &[3, 4, 2, 1]);
    }

    #[test]
    fn composition_is_associative_on_small_elements() {
        let ones: Vec<KElement> = vec![KElement::identity()];
        let twos = all_k(2, 1);
        let pool: Vec<KElement> = ones.iter().chain(twos.iter()).cloned().collect();
        for a in all_k(2, 2) {
            for b1 in &pool {
                for b2 in &pool {
                    let ab = k_compose(&a, &[b1.clone(), b2.clone()]).unwrap();
                    for c_choice in &pool {
                        // Insert c_choice at every leaf of b1, identities in b2.
                        let c1 = vec![c_choice.clone(); b1.arity()];
                        let c2 = vec![KElement::identity(); b2.arity()];
                        let all_c: Vec<KElement> =
                            c1.iter().chain(c2.iter()).cloned().collect();
                        let lhs = k_compose(&ab, &all_c).unwrap();
                        let b1c = k_compose(b1, &c1).unwrap();
                        let b2c = k_compose(b2, &c2).unwrap();
                        let rhs = k_compose(&a, &[b1c, b2c]).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn composition_is_equivariant() {
        let tau = vec![2usize, 1];
        for a in all_k(2, 1) {
            for b1 in all_k(2, 1) {
                for b2 in [KElement::identity(), k2(1, true)] {
                    // gamma(a tau; b2, b1) = gamma(a; b1, b2) (tau blocks).
                    let lhs = k_compose(&a.act(&tau).unwrap(), &[b2.clone(), b1.clone()]).unwrap();
                    let rhs = k_compose(&a, &[b1.clone(), b2.clone()]).unwrap();
                    let block_tau = block_permutation(&tau, &[b2.arity(), b1.arity()]);
                    assert_eq!(lhs, rhs.act(&block_tau).unwrap());
                }
            }
        }
    }

    #[test]
    fn partial_order_axioms_on_small_sets() {
        let set2 = all_k(2, 2);
        let set3 = all_k(3, 1);
        for set in [&set2, &set3] {
            for a in set.iter() {
                assert!(k_leq(a, a).unwrap());
            }
            for a in set.iter() {
                for b in set.iter() {
                    if k_leq(a, b).unwrap() && k_leq(b, a).unwrap() {
                        assert_eq!(a, b);
                    }
                    for c in set.iter() {
                        if k_leq(a, b).unwrap() && k_leq(b, c).unwrap() {
                            assert!(k_leq(a, c).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pinned_order_examples() {
        // Second branch: strictly smaller label.
        assert!(k_leq(&k2(0, false), &k2(1, true)).unwrap());
        // Equal labels, different permutations: incomparable.
        assert!(!k_leq(&k2(0, false), &k2(0, true)).unwrap());
        assert!(!k_leq(&k2(0, true), &k2(0, false)).unwrap());
    }

    #[test]
    fn complexity_of_pinned_sequences() {
        assert_eq!(ms_complexity(&[1, 2]), 1);
        assert_eq!(ms_complexity(&[1, 2, 1]), 2);
        assert_eq!(ms_complexity(&[1, 2, 1, 3, 1]), 2);
        assert_eq!(ms_complexity(&[1, 2, 3]), 1);
        assert_eq!(ms_complexity(&[1]), 1);
        assert_eq!(ms_complexity(&[1, 2, 1, 2]), 3);
        assert_eq!(ms_complexity(&[]), 0);
    }

    #[test]
    fn filtration_of_named_cells() {
        assert_eq!(filtration_level(&cup(0).unwrap()).unwrap(), 1);
        for i in 1..=3 {
            assert_eq!(filtration_level(&cup(i).unwrap()).unwrap(), i + 1);
        }
        for (cell, _) in dl_class(3).unwrap().iter() {
            assert!(filtration_level(cell).unwrap() <= 2);
        }
    }

    #[test]
    fn sequence_complexity_matches_filtration_on_small_cells() {
        for arity in 1..=3usize {
            let mut opts = EnumerateOptions::new(arity, 4).quasi_filling_only();
            opts.lgtree = true;
            for g in enumerate_graphs(&opts).unwrap() {
                let Ok(cell) = Cell::new(g) else { continue };
                let seq = cell.graph().seq().unwrap();
                assert_eq!(
                    ms_complexity(&seq),
                    filtration_level(&cell).unwrap(),
                    "mismatch on {seq:?}"
                );
            }
        }
    }

    #[test]
    fn ordered_points_project_to_ascending_interiors() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1)] {
            let x = ordered_point(p, n).unwrap();
            let cell = Cell::new(x.graph().clone()).unwrap();
            assert_eq!(cell.arity(), p);
            assert_eq!(filtration_level(&cell).unwrap(), n + 1);
            for i in 1..=p {
                for j in (i + 1)..=p {
                    let proj = phi_star(&cell, i, j).unwrap();
                    let seq = proj.graph().seq().unwrap();
                    // sigma = id: the first window visited is the smaller one.
                    assert_eq!(seq[0], 1, "projection ({i},{j}) of ({p},{n})");
                    assert!(proj.dim() <= n);
                }
            }
        }
    }

    #[test]
    fn two_input_ordered_point_is_the_alternating_interior() {
        let x = ordered_point(2, 3).unwrap();
        assert_eq!(x.graph(), cup(3).unwrap().graph());
        for w in x.weights() {
            assert!(crate::rational::is_positive(w));
        }
    }
}
