//! Weighted arc graphs and their thickened (gap) variants.
//!
//! A weighted graph carries a positive transverse width on every arc; a gap
//! graph additionally records nonnegative slack intervals along the output
//! window (one before the first slot and one after each slot). Gaps are the
//! device that keeps gluing associative: parallel arcs are allowed in a gap
//! graph exactly when a positive gap holds them apart at the output window.

use crate::error::{ArcError, Result};
use crate::graph::ArcGraph;
use crate::rational::{is_positive, mod_one, qi, Q};
use num::traits::Zero;

/// An arc graph with a positive weight on every arc (canonical arc order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedArcGraph {
    graph: ArcGraph,
    weights: Vec<Q>,
}

/// Graph-level deletion of one arc, merging its two flanking regions.
/// Returns the new graph, the slot map (old flat id -> new flat id, with
/// `usize::MAX` for the removed slots) and the arc map.
pub(crate) fn delete_arc_graph(
    graph: &ArcGraph,
    k: usize,
) -> Result<(ArcGraph, Vec<usize>, Vec<Option<usize>>)> {
    let arcs = graph.arcs();
    if k >= arcs.len() {
        return Err(ArcError::Malformed {
            reason: format!("no arc {k}"),
        });
    }
    let (h1, h2) = arcs[k];
    let (b1, _) = graph.addr(h1);
    let (b2, _) = graph.addr(h2);
    if graph.window_sizes()[b1] == 1 || graph.window_sizes()[b2] == 1 {
        return Err(ArcError::SurgeryIntegrity {
            reason: format!("deleting arc {k} would empty a window"),
        });
    }
    let total = graph.n_slots();
    let mut slot_map = vec![usize::MAX; total];
    let mut next = 0;
    for h in 0..total {
        if h != h1 && h != h2 {
            slot_map[h] = next;
            next += 1;
        }
    }
    let mut new_sizes = graph.window_sizes().to_vec();
    new_sizes[b1] -= 1;
    new_sizes[b2] -= 1;
    // Rebuild the pairing through the slot map.
    let pair_list: Vec<_> = arcs
        .iter()
        .filter(|&&(a, _)| a != h1)
        .map(|&(a, b)| (slot_map[a], slot_map[b]))
        .collect();
    let new_graph = rebuild_with_regions(graph, new_sizes, &pair_list, &slot_map, &[k])?;
    let mut arc_map = vec![None; arcs.len()];
    let mut idx = 0;
    for (j, _) in arcs.iter().enumerate() {
        if j != k {
            arc_map[j] = Some(idx);
            idx += 1;
        }
    }
    Ok((new_graph, slot_map, arc_map))
}

/// Rebuild a graph after slot deletion, transporting regions. The two
/// regions flanking each deleted arc are merged (one pinch event per
/// deletion, costing Euler characteristic 1).
fn rebuild_with_regions(
    old: &ArcGraph,
    new_sizes: Vec<usize>,
    pair_list: &[(usize, usize)],
    slot_map: &[usize],
    deleted_arcs: &[usize],
) -> Result<ArcGraph> {
    let to_addr = |h: usize| {
        let mut b = 0;
        let mut rest = h;
        while rest >= new_sizes[b] {
            rest -= new_sizes[b];
            b += 1;
        }
        (b, rest)
    };
    let addr_pairs: Vec<_> = pair_list
        .iter()
        .map(|&(a, b)| (to_addr(a), to_addr(b)))
        .collect();

    let old_trace = old.face_trace();
    let old_arcs = old.arcs();
    let mut uf = crate::graph::UnionFind::new(old.n_regions());
    for &k in deleted_arcs {
        let (h1, h2) = old_arcs[k];
        let r1 = old.region_of_orbit()[old_trace.orbit_of_tail[h1]];
        let r2 = old.region_of_orbit()[old_trace.orbit_of_tail[h2]];
        uf.union(r1, r2);
    }
    // chi per class: sum of member chi minus one per pinch landing in the
    // class (whether or not the pinch united distinct regions).
    let mut class_chi = std::collections::BTreeMap::new();
    for r in 0..old.n_regions() {
        let c = uf.find(r);
        *class_chi.entry(c).or_insert(0i64) += old.region_euler_char(r);
    }
    for &k in deleted_arcs {
        let (h1, _) = old_arcs[k];
        let r1 = old.region_of_orbit()[old_trace.orbit_of_tail[h1]];
        let c = uf.find(r1);
        *class_chi.entry(c).or_insert(0) -= 1;
    }

    // Assemble the new graph and transport regions via surviving tails.
    let mut inv_slot = vec![usize::MAX; slot_map.iter().filter(|&&s| s != usize::MAX).count()];
    for (oldh, &newh) in slot_map.iter().enumerate() {
        if newh != usize::MAX {
            inv_slot[newh] = oldh;
        }
    }
    let mut skeleton = ArcGraph::skeleton(new_sizes.clone(), &addr_pairs)?;
    let new_trace = skeleton.face_trace();
    let mut class_orbits = std::collections::BTreeMap::new();
    let mut orbit_class = vec![usize::MAX; new_trace.orbits.len()];
    for (id, orbit) in new_trace.orbits.iter().enumerate() {
        let mut class = usize::MAX;
        for step in orbit {
            let old_tail = inv_slot[step.tail];
            let old_region = old.region_of_orbit()[old_trace.orbit_of_tail[old_tail]];
            let c = uf.find(old_region);
            if class == usize::MAX {
                class = c;
            } else if class != c {
                return Err(ArcError::SurgeryIntegrity {
                    reason: "orbit attribution straddles region classes".into(),
                });
            }
        }
        orbit_class[id] = class;
        class_orbits.entry(class).or_insert_with(Vec::new).push(id);
    }
    // Genus of each class from chi = 2 - 2g - b.
    let mut class_ids: Vec<usize> = class_orbits.keys().copied().collect();
    class_ids.sort_unstable();
    let mut genus = Vec::new();
    let mut region_of_orbit = vec![usize::MAX; new_trace.orbits.len()];
    for (new_id, &c) in class_ids.iter().enumerate() {
        let b = class_orbits[&c].len() as i64;
        let chi = class_chi[&c];
        let two_g = 2 - chi - b;
        if two_g % 2 != 0 || two_g < 0 {
            return Err(ArcError::SurgeryIntegrity {
                reason: format!("non-integral genus: chi {chi}, {b} orbits"),
            });
        }
        genus.push((two_g / 2) as usize);
        for &o in &class_orbits[&c] {
            region_of_orbit[o] = new_id;
        }
    }
    if class_chi.keys().any(|c| !class_orbits.contains_key(c)) {
        return Err(ArcError::SurgeryIntegrity {
            reason: "a region lost all of its orbits".into(),
        });
    }
    skeleton.set_regions(region_of_orbit, genus)?;
    Ok(skeleton)
}

impl WeightedArcGraph {
    pub fn new(graph: ArcGraph, weights: Vec<Q>) -> Result<WeightedArcGraph> {
        let g = Self::with_parallel(graph, weights)?;
        g.graph.validate(false)?;
        Ok(g)
    }

    /// Construct without rejecting parallel arcs (surgery intermediates).
    pub fn with_parallel(graph: ArcGraph, weights: Vec<Q>) -> Result<WeightedArcGraph> {
        graph.validate(true)?;
        if weights.len() != graph.n_arcs() {
            return Err(ArcError::ArityMismatch {
                expected: graph.n_arcs(),
                got: weights.len(),
            });
        }
        for (i, w) in weights.iter().enumerate() {
            if !is_positive(w) {
                return Err(ArcError::NonPositiveWeight {
                    value: w.to_string(),
                    index: i,
                });
            }
        }
        Ok(WeightedArcGraph { graph, weights })
    }

    /// The 0-ary element of the given genus.
    pub fn zero_ary(genus: usize) -> WeightedArcGraph {
        WeightedArcGraph {
            graph: ArcGraph::zero_ary(genus),
            weights: Vec::new(),
        }
    }

    /// The operad identity: one arc of weight 1 on the cylinder.
    pub fn identity() -> WeightedArcGraph {
        let graph = ArcGraph::quasi_filling(vec![1, 1], &[((0, 0), (1, 0))]).unwrap();
        WeightedArcGraph {
            graph,
            weights: vec![qi(1)],
        }
    }

    /// The twist family: the fractional part of `a` wraps a band of that
    /// weight around the cylinder. `twist(0)` is the identity and
    /// `twist(a) . twist(b) = twist(a + b)`.
    pub fn twist(a: &Q) -> WeightedArcGraph {
        let a = mod_one(a);
        if a.is_zero() {
            return Self::identity();
        }
        let graph =
            ArcGraph::quasi_filling(vec![2, 2], &[((0, 0), (1, 0)), ((0, 1), (1, 1))]).unwrap();
        WeightedArcGraph {
            graph,
            weights: vec![qi(1) - a.clone(), a],
        }
    }

    pub fn graph(&self) -> &ArcGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn weight(&self, arc: usize) -> &Q {
        &self.weights[arc]
    }

    /// Total weight of the arcs meeting boundary `b`.
    pub fn window_weight(&self, b: usize) -> Q {
        let arc_idx = self.graph.arc_index();
        let mut total = Q::zero();
        for s in 0..self.graph.window_sizes()[b] {
            total += self.weights[arc_idx[self.graph.flat(b, s)]].clone();
        }
        total
    }

    /// Scale all weights so the output window has total weight 1.
    pub fn normalize_projective(&self) -> WeightedArcGraph {
        if self.graph.is_zero_ary() {
            return self.clone();
        }
        let total = self.window_weight(0);
        let weights = self.weights.iter().map(|w| w / total.clone()).collect();
        WeightedArcGraph {
            graph: self.graph.clone(),
            weights,
        }
    }

    /// Same graph and proportional weights.
    pub fn projectively_equal(&self, other: &WeightedArcGraph) -> bool {
        self.normalize_projective() == other.normalize_projective()
    }

    /// Delete one arc, merging its flanking regions. Also returns the arc
    /// map (old arc id -> new arc id).
    pub fn delete_arc(&self, k: usize) -> Result<(WeightedArcGraph, Vec<Option<usize>>)> {
        let (graph, _, arc_map) = delete_arc_graph(&self.graph, k)?;
        let mut weights = self.weights.clone();
        weights.remove(k);
        Ok((WeightedArcGraph { graph, weights }, arc_map))
    }

    /// Merge parallel arcs (summing weights) until none remain. Returns the
    /// reduced graph and the number of merges.
    pub fn consolidate_all(&self) -> Result<(WeightedArcGraph, usize)> {
        let mut cur = self.clone();
        let mut merges = 0;
        loop {
            let pairs = cur.graph.parallel_pairs();
            let Some(&(e, f)) = pairs.first() else {
                return Ok((cur, merges));
            };
            let mut weights = cur.weights.clone();
            let extra = weights[f].clone();
            weights[e] += extra;
            let (graph, _, arc_map) = delete_arc_graph(&cur.graph, f)?;
            weights.remove(f);
            let _ = arc_map;
            cur = WeightedArcGraph { graph, weights };
            merges += 1;
        }
    }

    /// Relabel input boundaries by `sigma` (old label `i` -> `sigma[i-1]`).
    pub fn relabel(&self, sigma: &[usize]) -> Result<WeightedArcGraph> {
        let (graph, arc_map) = self.graph.relabel_boundaries(sigma)?;
        let mut weights = vec![Q::zero(); self.weights.len()];
        for (old, &new) in arc_map.iter().enumerate() {
            weights[new] = self.weights[old].clone();
        }
        Ok(WeightedArcGraph { graph, weights })
    }

    pub(crate) fn from_raw(graph: ArcGraph, weights: Vec<Q>) -> WeightedArcGraph {
        WeightedArcGraph { graph, weights }
    }
}

/// A weighted graph thickened by gaps along the output window: the layout is
/// `[gap_star][slot 0][gaps[0]][slot 1][gaps[1]] ...` back to the marked
/// point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapGraph {
    graph: ArcGraph,
    weights: Vec<Q>,
    gap_star: Q,
    gaps: Vec<Q>,
}

impl GapGraph {
    pub fn new(graph: ArcGraph, weights: Vec<Q>, gap_star: Q, gaps: Vec<Q>) -> Result<GapGraph> {
        let inner = WeightedArcGraph::with_parallel(graph, weights)?;
        let (graph, weights) = (inner.graph, inner.weights);
        let k0 = if graph.is_zero_ary() {
            0
        } else {
            graph.window_sizes()[0]
        };
        if gaps.len() != k0 {
            return Err(ArcError::ArityMismatch {
                expected: k0,
                got: gaps.len(),
            });
        }
        if gap_star < Q::zero() || gaps.iter().any(|g| *g < Q::zero()) {
            return Err(ArcError::Malformed {
                reason: "negative gap".into(),
            });
        }
        let out = GapGraph {
            graph,
            weights,
            gap_star,
            gaps,
        };
        out.check_gap_invariant()?;
        Ok(out)
    }

    /// A 0-ary thick element: genus `h`, whole output boundary one gap.
    pub fn zero_ary(genus: usize, boundary_measure: Q) -> Result<GapGraph> {
        if !is_positive(&boundary_measure) {
            return Err(ArcError::NonPositiveWeight {
                value: boundary_measure.to_string(),
                index: 0,
            });
        }
        Ok(GapGraph {
            graph: ArcGraph::zero_ary(genus),
            weights: Vec::new(),
            gap_star: boundary_measure,
            gaps: Vec::new(),
        })
    }

    /// Every parallel pair must be held apart by a positive gap at the
    /// output window; parallel pairs away from the output window cannot be.
    fn check_gap_invariant(&self) -> Result<()> {
        let trace = self.graph.face_trace();
        let arc_idx = self.graph.arc_index();
        for &(a, b) in &self.graph.parallel_pairs() {
            // Find the rectangle orbit between the pair and its output-window
            // corner, if any.
            let mut found = None;
            'outer: for orbit in &trace.orbits {
                if orbit.len() != 2 {
                    continue;
                }
                let arcs: Vec<_> = orbit.iter().map(|s| arc_idx[s.tail]).collect();
                if !(arcs.contains(&a) && arcs.contains(&b)) {
                    continue;
                }
                for step in orbit {
                    if self.graph.corner_is_marked(step.corner) {
                        continue 'outer;
                    }
                }
                for step in orbit {
                    let (w, s) = self.graph.addr(step.corner);
                    if w == 0 {
                        found = Some(s);
                    }
                }
                break;
            }
            match found {
                Some(slot) if is_positive(&self.gaps[slot]) => {}
                Some(_) => {
                    return Err(ArcError::GapInvariant { arc_a: a, arc_b: b });
                }
                None => {
                    return Err(ArcError::GapInvariant { arc_a: a, arc_b: b });
                }
            }
        }
        Ok(())
    }

    /// Thicken with all gaps zero.
    pub fn fatten(w: &WeightedArcGraph) -> GapGraph {
        let k0 = if w.graph().is_zero_ary() {
            0
        } else {
            w.graph().window_sizes()[0]
        };
        GapGraph {
            graph: w.graph().clone(),
            weights: w.weights().to_vec(),
            gap_star: Q::zero(),
            gaps: vec![Q::zero(); k0],
        }
    }

    /// Forget the gaps and merge the parallel arcs they were holding apart.
    pub fn retract(&self) -> Result<WeightedArcGraph> {
        let inner = WeightedArcGraph::from_raw(self.graph.clone(), self.weights.clone());
        let (out, _) = inner.consolidate_all()?;
        out.graph.validate(false)?;
        Ok(out)
    }

    pub fn graph(&self) -> &ArcGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn gap_star(&self) -> &Q {
        &self.gap_star
    }

    pub fn gaps(&self) -> &[Q] {
        &self.gaps
    }

    /// Total measure of the output window, gaps included.
    pub fn thick_window_weight(&self) -> Q {
        if self.graph.is_zero_ary() {
            return self.gap_star.clone();
        }
        let arc_idx = self.graph.arc_index();
        let mut total = self.gap_star.clone();
        for s in 0..self.graph.window_sizes()[0] {
            total += self.weights[arc_idx[self.graph.flat(0, s)]].clone();
            total += self.gaps[s].clone();
        }
        total
    }

    /// Raw construction for gluing outputs; the caller runs
    /// [`consolidate_loose`](Self::consolidate_loose) to restore invariants.
    pub(crate) fn from_raw(graph: ArcGraph, weights: Vec<Q>, gap_star: Q, gaps: Vec<Q>) -> GapGraph {
        GapGraph {
            graph,
            weights,
            gap_star,
            gaps,
        }
    }

    /// Merge parallel pairs that no positive gap separates (the rest stay).
    pub(crate) fn consolidate_loose(mut self) -> Result<GapGraph> {
        'again: loop {
            let trace = self.graph.face_trace();
            let arc_idx = self.graph.arc_index();
            for orbit in &trace.orbits {
                if orbit.len() != 2 {
                    continue;
                }
                if orbit.iter().any(|s| self.graph.corner_is_marked(s.corner)) {
                    continue;
                }
                let id = trace.orbit_of_tail[orbit[0].tail];
                let region = self.graph.region_of_orbit()[id];
                let singleton = self
                    .graph
                    .region_of_orbit()
                    .iter()
                    .filter(|&&r| r == region)
                    .count()
                    == 1;
                if !singleton || self.graph.region_genus()[region] != 0 {
                    continue;
                }
                // A genuine parallel pair; find its output-window corner.
                let mut zero_slot = None;
                let mut separated = false;
                for step in orbit {
                    let (w, s) = self.graph.addr(step.corner);
                    if w == 0 {
                        if is_positive(&self.gaps[s]) {
                            separated = true;
                        } else {
                            zero_slot = Some(s);
                        }
                    }
                }
                if separated {
                    continue;
                }
                // Merge: keep the lower arc id, absorb the other.
                let (a, b) = (arc_idx[orbit[0].tail], arc_idx[orbit[1].tail]);
                let (keep, drop) = (a.min(b), a.max(b));
                let extra = self.weights[drop].clone();
                self.weights[keep] += extra;
                // Remove the dropped arc's output-window gap slot, if any.
                if let Some(s) = zero_slot {
                    // Slots s, s+1 hold the pair; the zero gap between them
                    // vanishes and the outer gap follows the merged slot.
                    let after = self.gaps.remove(s + 1);
                    self.gaps[s] = after;
                } else if self.graph.addr(self.graph.arcs()[drop].0).0 == 0
                    || self.graph.addr(self.graph.arcs()[drop].1).0 == 0
                {
                    return Err(ArcError::SurgeryIntegrity {
                        reason: "parallel pair bookkeeping out of sync".into(),
                    });
                }
                let (graph, _, _) = delete_arc_graph(&self.graph, drop)?;
                self.weights.remove(drop);
                self.graph = graph;
                continue 'again;
            }
            break;
        }
        self.check_gap_invariant()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn twist_shape() {
        let t = WeightedArcGraph::twist(&q(1, 3));
        assert_eq!(t.weights(), &[q(2, 3), q(1, 3)]);
        assert_eq!(t.window_weight(0), qi(1));
        assert_eq!(t.window_weight(1), qi(1));
        assert!(t.graph().is_twisted_at(0));
        // Integer twists collapse to the identity.
        assert_eq!(WeightedArcGraph::twist(&qi(5)), WeightedArcGraph::identity());
        assert_eq!(
            WeightedArcGraph::twist(&q(-1, 3)).weights(),
            &[q(1, 3), q(2, 3)]
        );
    }

    #[test]
    fn consolidate_parallel_pair() {
        // Anti-aligned two-arc cylinder: a parallel pair.
        let g = ArcGraph::from_parts_with(
            vec![2, 2],
            &[((0, 0), (1, 1)), ((0, 1), (1, 0))],
            None,
        )
        .unwrap();
        let w = WeightedArcGraph::with_parallel(g, vec![q(1, 3), q(2, 3)]).unwrap();
        let (out, merges) = w.consolidate_all().unwrap();
        assert_eq!(merges, 1);
        assert_eq!(out, WeightedArcGraph::identity());
    }

    #[test]
    fn delete_arc_merges_regions() {
        // Deleting one arc of the twist shape leaves the identity shape.
        let t = WeightedArcGraph::twist(&q(1, 4));
        let (out, arc_map) = t.delete_arc(1).unwrap();
        assert_eq!(arc_map, vec![Some(0), None]);
        assert_eq!(out.graph(), WeightedArcGraph::identity().graph());
        assert_eq!(out.weights(), &[q(3, 4)]);
        assert!(out.graph().is_quasi_filling());
    }

    #[test]
    fn delete_arc_guards_windows() {
        let id = WeightedArcGraph::identity();
        assert!(id.delete_arc(0).is_err());
    }

    #[test]
    fn gap_invariant_enforced() {
        let g = ArcGraph::from_parts_with(
            vec![2, 2],
            &[((0, 0), (1, 1)), ((0, 1), (1, 0))],
            None,
        )
        .unwrap();
        // Parallel pair with no separating gap: rejected.
        let err = GapGraph::new(
            g.clone(),
            vec![qi(1), qi(1)],
            Q::zero(),
            vec![Q::zero(), Q::zero()],
        )
        .unwrap_err();
        assert!(matches!(err, ArcError::GapInvariant { .. }));
        // A positive gap after slot 0 separates the pair.
        let ok = GapGraph::new(
            g,
            vec![qi(1), qi(1)],
            Q::zero(),
            vec![q(1, 2), Q::zero()],
        )
        .unwrap();
        // Retracting drops the gap and merges the pair.
        let r = ok.retract().unwrap();
        assert_eq!(r.graph(), WeightedArcGraph::identity().graph());
        assert_eq!(r.weights(), &[qi(2)]);
    }

    #[test]
    fn fatten_retract_roundtrip() {
        let t = WeightedArcGraph::twist(&q(2, 5));
        assert_eq!(GapGraph::fatten(&t).retract().unwrap(), t);
    }

    #[test]
    fn projective_normalization() {
        let g = ArcGraph::quasi_filling(vec![2, 1, 1], &[((0, 0), (1, 0)), ((0, 1), (2, 0))])
            .unwrap();
        let w = WeightedArcGraph::new(g, vec![qi(3), qi(1)]).unwrap();
        let n = w.normalize_projective();
        assert_eq!(n.weights(), &[q(3, 4), q(1, 4)]);
        assert!(w.projectively_equal(&n));
    }
}
