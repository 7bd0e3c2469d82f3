//! Stabilization: canonical quasi-filling representatives and the
//! generator maps whose colimit they present.
//!
//! The stabilization class of a tree-like element is computed by a local
//! rewrite of the region decoration — every region genus is set to zero and
//! every region with several face orbits is split into one region per orbit
//! — followed by consolidation of the parallel arcs this exposes and
//! projective normalization. The generator maps `st_g`/`st_h` insert the
//! genus and boundary defect generators (conjugated by twists) above the
//! output window; the rewrite is constant on their orbits.
//!
//! The module also provides the marked-point calculus on tree-like
//! elements: rotating a window's marked point, removing the twist at the
//! output window, and the canonical section writing any cyclically
//! anti-compatible element as an untwisted one composed with twists.

use crate::error::{ArcError, Result};
use crate::glue::compose;
use crate::graph::ArcGraph;
use crate::rational::{mod_one, Q};
use crate::weighted::{GapGraph, WeightedArcGraph};
use num::traits::Zero;

/// A stabilization class, held by its canonical representative: the
/// quasi-filling, parallel-free, projectively normalized element obtained
/// by the region rewrite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StClass {
    representative: WeightedArcGraph,
}

impl StClass {
    pub fn representative(&self) -> &WeightedArcGraph {
        &self.representative
    }

    pub fn into_representative(self) -> WeightedArcGraph {
        self.representative
    }
}

/// The stabilization class of a tree-like element. 0-ary elements all map
/// to the disc class.
pub fn st(a: &WeightedArcGraph) -> Result<StClass> {
    let g = a.graph();
    if !g.is_gtree() {
        return Err(ArcError::NotGTree);
    }
    if g.is_zero_ary() {
        return Ok(StClass {
            representative: WeightedArcGraph::zero_ary(0),
        });
    }
    let mut graph = g.clone();
    let n_orbits = graph.face_trace().orbits.len();
    graph.set_regions((0..n_orbits).collect(), vec![0; n_orbits])?;
    let (out, _) = WeightedArcGraph::with_parallel(graph, a.weights().to_vec())?
        .consolidate_all()?;
    out.graph().validate(false)?;
    Ok(StClass {
        representative: out.normalize_projective(),
    })
}

/// The stabilization class of a thick element: gaps are contracted first.
pub fn st_thick(g: &GapGraph) -> Result<StClass> {
    st(&g.retract()?)
}

/// Structural equality of stabilization classes.
pub fn stable_equal(a: &WeightedArcGraph, b: &WeightedArcGraph) -> Result<bool> {
    Ok(st(a)? == st(b)?)
}

/// Genus defect, boundary defect, and the stabilization class: the genus
/// defect sums the region genera, the boundary defect counts the extra face
/// orbits beyond one per region.
pub fn decompose_unstable(a: &WeightedArcGraph) -> Result<(usize, usize, StClass)> {
    let g = a.graph();
    let genus_defect: usize = g.region_genus().iter().sum();
    let boundary_defect = if g.is_zero_ary() {
        0
    } else {
        g.face_trace().orbits.len() - g.n_regions()
    };
    Ok((genus_defect, boundary_defect, st(a)?))
}

/// The genus-defect generator: one arc on the cylinder whose complementary
/// region carries genus one (Euler defect -2).
pub fn genus_generator() -> WeightedArcGraph {
    let graph =
        ArcGraph::from_parts(vec![1, 1], &[((0, 0), (1, 0))], vec![0], vec![1]).unwrap();
    WeightedArcGraph::new(graph, vec![crate::rational::qi(1)]).unwrap()
}

/// The boundary-defect generator family: two crossing arcs on the cylinder
/// with weights `(1-b, b)` whose two face orbits are merged into a single
/// genus-0 region (Euler defect -1, ambient genus 1). Requires `0 < b < 1`.
///
/// The crossing is essential: splitting the merged region makes the two
/// arcs parallel, so the whole family collapses to the identity class and
/// the stabilization maps built from it are class-constant. The variant
/// with non-crossing arcs is `boundary_generator(b)` composed above a
/// twist, and carries that twist into its class.
pub fn boundary_generator(b: &Q) -> Result<WeightedArcGraph> {
    use crate::rational::{is_positive, qi};
    if !is_positive(b) || *b >= qi(1) {
        return Err(ArcError::Malformed {
            reason: format!(
                "boundary generator parameter must lie strictly between 0 and 1, got {b}"
            ),
        });
    }
    let graph = ArcGraph::from_parts(
        vec![2, 2],
        &[((0, 0), (1, 1)), ((0, 1), (1, 0))],
        vec![0, 0],
        vec![0],
    )?;
    WeightedArcGraph::new(graph, vec![qi(1) - b.clone(), b.clone()])
}

fn check_twist_param(a: &Q) -> Result<()> {
    use crate::rational::qi;
    if *a < Q::zero() || *a >= qi(1) {
        return Err(ArcError::Malformed {
            reason: format!("twist parameter must lie in [0, 1), got {a}"),
        });
    }
    Ok(())
}

/// The genus-raising stabilization map: conjugate the genus generator by a
/// twist and compose above the output window.
pub fn st_g(a: &Q, alpha: &WeightedArcGraph) -> Result<WeightedArcGraph> {
    check_twist_param(a)?;
    let t = WeightedArcGraph::twist(a);
    let t_inv = WeightedArcGraph::twist(&-a.clone());
    compose(&t_inv, 1, &compose(&genus_generator(), 1, &compose(&t, 1, alpha)?)?)
}

/// The boundary-raising stabilization map: conjugate the boundary generator
/// by a twist and compose above the output window.
pub fn st_h(a: &Q, b: &Q, alpha: &WeightedArcGraph) -> Result<WeightedArcGraph> {
    check_twist_param(a)?;
    let t = WeightedArcGraph::twist(a);
    let t_inv = WeightedArcGraph::twist(&-a.clone());
    compose(
        &t_inv,
        1,
        &compose(&boundary_generator(b)?, 1, &compose(&t, 1, alpha)?)?,
    )
}

/// Rotate the marked point of one window forward across `k` bands; the
/// window's linear order is rotated so its old slot `k` becomes slot 0.
/// Regions are unchanged (only corner markings move), but the rotation may
/// expose parallel arcs previously separated by the marked point alone, so
/// the result tolerates them; callers consolidate.
pub fn rotate_marked_point(
    w: &WeightedArcGraph,
    window: usize,
    k: usize,
) -> Result<WeightedArcGraph> {
    let g = w.graph();
    if window >= g.n_boundaries() {
        return Err(ArcError::BoundaryOutOfRange {
            index: window,
            arity: g.arity(),
        });
    }
    let size = g.window_sizes()[window];
    if size == 0 {
        return Err(ArcError::EmptyWindow { boundary: window });
    }
    let k = k % size;
    if k == 0 {
        return Ok(w.clone());
    }
    // Old flat slot -> new flat slot: window `window` rotates, others fixed.
    let rot = |h: usize| -> usize {
        let (b, s) = g.addr(h);
        if b == window {
            g.flat(b, (s + size - k) % size)
        } else {
            h
        }
    };
    let inv = |h: usize| -> usize {
        let (b, s) = g.addr(h);
        if b == window {
            g.flat(b, (s + k) % size)
        } else {
            h
        }
    };
    let arcs_old = g.arcs();
    let addr_pairs: Vec<_> = arcs_old
        .iter()
        .map(|&(x, y)| (g.addr(rot(x)), g.addr(rot(y))))
        .collect();
    let mut graph = ArcGraph::skeleton(g.window_sizes().to_vec(), &addr_pairs)?;

    // Orbits are identical cyclic structures; transport each through any of
    // its tails.
    let old_trace = g.face_trace();
    let new_trace = graph.face_trace();
    let mut region_of_orbit = Vec::with_capacity(new_trace.orbits.len());
    for orbit in &new_trace.orbits {
        let mut region = usize::MAX;
        for step in orbit {
            let r = g.region_of_orbit()[old_trace.orbit_of_tail[inv(step.tail)]];
            if region == usize::MAX {
                region = r;
            } else if region != r {
                return Err(ArcError::SurgeryIntegrity {
                    reason: "orbit attribution straddles region classes".into(),
                });
            }
        }
        region_of_orbit.push(region);
    }
    graph.set_regions(region_of_orbit, g.region_genus().to_vec())?;

    let weights = graph
        .arcs()
        .iter()
        .map(|&(lo, _)| w.weight(g.arc_of(inv(lo))).clone())
        .collect();
    WeightedArcGraph::with_parallel(graph, weights)
}

/// Remove the twist at the output window: returns `(b, a')` with `a'`
/// untwisted at the output window and `a` projectively equal to
/// `twist(b) . a'` (composition above the output window).
pub fn untwist_at_zero(w: &WeightedArcGraph) -> Result<(Q, WeightedArcGraph)> {
    let mut cur = w.clone();
    if cur.graph().is_zero_ary() {
        return Ok((Q::zero(), cur));
    }
    let total = cur.window_weight(0);
    let mut moved = Q::zero();
    // Rotating forward across a band of normalized width c pre-composes a
    // twist by c; the accumulated twist is undone by twist(-moved).
    let limit = 2 * (cur.graph().n_arcs() + 1);
    let mut steps = 0;
    while cur.graph().is_twisted_at(0) {
        steps += 1;
        if steps > limit {
            return Err(ArcError::SurgeryIntegrity {
                reason: "untwisting at the output window did not terminate".into(),
            });
        }
        let first = cur.graph().arc_of(cur.graph().flat(0, 0));
        moved += cur.weight(first).clone() / total.clone();
        let (next, _) = rotate_marked_point(&cur, 0, 1)?.consolidate_all()?;
        cur = next;
    }
    cur.graph().validate(false)?;
    Ok((mod_one(&-moved), cur))
}

/// The canonical section of the torus bundle over the linearly
/// anti-compatible elements: write a cyclically anti-compatible element as
/// an untwisted one with a twist at each input window. Returns `(a', t)`
/// with `a'` linearly anti-compatible and `a` projectively equal to `a'`
/// composed with `twist(t[i-1])` at each input window `i`.
pub fn untwist_canonical(w: &WeightedArcGraph) -> Result<(WeightedArcGraph, Vec<Q>)> {
    let g = w.graph();
    if g.is_zero_ary() {
        return Ok((w.clone(), Vec::new()));
    }
    if !g.is_gtree() {
        return Err(ArcError::NotGTree);
    }
    let mut cur = w.clone();
    let mut twists = Vec::with_capacity(g.arity());
    for i in 1..=g.arity() {
        let gi = cur.graph().clone();
        let size = gi.window_sizes()[i];
        let v: Vec<usize> = (0..size)
            .map(|s| gi.addr(gi.partner(gi.flat(i, s))).1)
            .collect();
        if size > 1 {
            let ascents = (0..size).filter(|&j| v[j] < v[(j + 1) % size]).count();
            if ascents != 1 {
                return Err(ArcError::NotCGTree { boundary: i });
            }
        }
        // The band hitting the output window first must come last at window
        // i; the canonical marked point sits right after its foot.
        let j_star = (0..size).min_by_key(|&j| v[j]).unwrap();
        let wi = cur.window_weight(i);
        let mut dist = Q::zero();
        for s in (j_star + 1)..size {
            dist += cur.weight(cur.graph().arc_of(cur.graph().flat(i, s))).clone();
        }
        twists.push(dist / wi);
        cur = rotate_marked_point(&cur, i, (j_star + 1) % size)?;
    }
    let (out, _) = cur.consolidate_all()?;
    out.graph().validate(false)?;
    Ok((out, twists))
}
