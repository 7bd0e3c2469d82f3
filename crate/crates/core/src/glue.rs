//! Operadic gluing of arc graphs.
//!
//! Gluing overlays input window `i` of `a` against the output window of `b`,
//! orientation-reversingly, after scaling `b` so both windows carry the same
//! measure. Bands subdivide along the common refinement of the two window
//! layouts; a sliver of an `a`-band falling on a gap of `b` is erased, its
//! width reappearing as a gap at the band's far end (which the thick model
//! can only record at the output window). Regions on the two sides of the
//! interface merge wherever a corner of `a`'s window `i` touches a closed gap
//! zone of `b` — the identified marked points always do — and every such
//! pinch costs one in Euler characteristic; the genus of each merged region
//! is then recovered from its Euler characteristic and its orbit count.
//!
//! Plain (unthickened) gluing is thick gluing of the zero-gap thickenings
//! followed by the retraction merging parallel arcs; gluing a 0-ary element
//! instead caps the window off directly, since the erased measure simply
//! vanishes when no gaps are tracked.

use crate::error::{ArcError, Result};
use crate::graph::{ArcGraph, SlotAddr, UnionFind};
use crate::rational::{is_positive, Q};
use crate::weighted::{GapGraph, WeightedArcGraph};
use num::traits::Zero;
use std::collections::BTreeMap;

/// Logical identity of an output arc before canonical renumbering.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Ref {
    /// Common-refinement piece (index into the piece list).
    Piece(usize),
    /// Arc of `a` not meeting window `i`.
    FromA(usize),
    /// Arc of `b` not meeting `b`'s output window.
    FromB(usize),
}

/// Attribution of the corner following an output slot, used for region
/// transport. Region nodes live in the disjoint union of `a`'s regions
/// (first) and `b`'s regions.
#[derive(Clone, Copy, Debug)]
enum CornerSrc {
    /// Corner surviving from `a` (flat corner id there).
    OldA(usize),
    /// Corner surviving from `b` (flat corner id there).
    OldB(usize),
    /// Sliver between pieces of one band; owned by the recorded region node.
    Node(usize),
}

/// One entry of a band's interface decomposition, in ascending interface
/// order. Entries strictly alternate between kept pieces and zones.
#[derive(Clone, Debug)]
enum ExpEntry {
    Keep(usize),
    /// Opposite-side zone met by the band: erased width (possibly zero) and
    /// the region node owning the zone.
    Zone { width: Q, node: usize },
}

/// An interval of the interface covered by one band.
struct Band {
    lo: Q,
    hi: Q,
    arc: usize,
}

/// An interval of the interface covered by a gap of `b` (possibly a point).
struct GapZone {
    lo: Q,
    hi: Q,
    node: usize,
}

/// A positive common-refinement segment where a band of `a` crosses a band
/// of `b`: one arc of the composite.
struct Piece {
    a_arc: usize,
    b_arc: usize,
    lo: Q,
    hi: Q,
}

/// Accumulates one output window: slots with their after-corner attribution,
/// plus the gap measure flowing between them.
struct WindowStream {
    slots: Vec<(Ref, CornerSrc)>,
    lead: Q,
    gaps: Vec<Q>,
    acc: Q,
}

impl WindowStream {
    fn new() -> Self {
        WindowStream {
            slots: Vec::new(),
            lead: Q::zero(),
            gaps: Vec::new(),
            acc: Q::zero(),
        }
    }

    fn add_gap(&mut self, w: Q) {
        self.acc += w;
    }

    fn push(&mut self, r: Ref, c: CornerSrc) {
        let g = std::mem::take(&mut self.acc);
        if self.slots.is_empty() {
            self.lead = g;
        } else {
            self.gaps.push(g);
        }
        self.slots.push((r, c));
    }

    fn finish(&mut self) {
        let g = std::mem::take(&mut self.acc);
        if self.slots.is_empty() {
            self.lead += g;
        } else {
            self.gaps.push(g);
        }
    }

    fn measure(&self) -> Q {
        let mut m = self.lead.clone();
        for g in &self.gaps {
            m += g.clone();
        }
        m
    }

    fn has_gap_measure(&self) -> bool {
        is_positive(&self.lead) || self.gaps.iter().any(is_positive)
    }
}

/// Glue the thick element `b` into input window `i` of `a`.
pub fn thick_compose(a: &GapGraph, i: usize, b: &GapGraph) -> Result<GapGraph> {
    let ga = a.graph();
    let gb = b.graph();
    if ga.is_zero_ary() || i == 0 || i > ga.arity() {
        return Err(ArcError::BoundaryOutOfRange {
            index: i,
            arity: ga.arity(),
        });
    }
    let ta = ga.face_trace();
    let tb = gb.face_trace();
    let arc_idx_a = ga.arc_index();
    let arc_idx_b = gb.arc_index();
    let n_reg_a = ga.n_regions();
    // Region node owning a corner, in the disjoint union of both region sets.
    let node_a = |corner: usize| ga.region_of_orbit()[ta.orbit_of_corner[corner]];
    let node_b = |corner: usize| n_reg_a + gb.region_of_orbit()[tb.orbit_of_corner[corner]];

    // ------------------------------------------------------------------
    // Interface layout. The `a` side has no gaps (window `i` is an input
    // window), so its bands tile [0, w_a]; its corners are zero-width zones,
    // the marked corner listed once at position 0. The `b` side is the
    // output window of `b`, reversed and scaled so both totals agree.
    // ------------------------------------------------------------------
    let k_i = ga.window_sizes()[i];
    let mut bands_a: Vec<Band> = Vec::with_capacity(k_i);
    let mut zones_a: Vec<(Q, usize)> = vec![(Q::zero(), node_a(ga.marked_corner(i)))];
    let mut w_a = Q::zero();
    for s in 0..k_i {
        let arc = arc_idx_a[ga.flat(i, s)];
        let w = a.weights()[arc].clone();
        bands_a.push(Band {
            lo: w_a.clone(),
            hi: w_a.clone() + w.clone(),
            arc,
        });
        w_a += w;
        if s + 1 < k_i {
            zones_a.push((w_a.clone(), node_a(ga.flat(i, s))));
        }
    }
    let lambda = w_a.clone() / b.thick_window_weight();

    enum Fwd {
        Band(usize, Q),
        Gap(Q, usize),
    }
    let q_b = if gb.is_zero_ary() {
        0
    } else {
        gb.window_sizes()[0]
    };
    let marked_node_b = if gb.is_zero_ary() {
        n_reg_a
    } else {
        node_b(gb.marked_corner(0))
    };
    let mut fwd = Vec::with_capacity(2 * q_b + 1);
    fwd.push(Fwd::Gap(b.gap_star().clone(), marked_node_b));
    for s in 0..q_b {
        let arc = arc_idx_b[gb.flat(0, s)];
        fwd.push(Fwd::Band(arc, b.weights()[arc].clone()));
        let node = if s + 1 == q_b {
            marked_node_b
        } else {
            node_b(gb.flat(0, s))
        };
        fwd.push(Fwd::Gap(b.gaps()[s].clone(), node));
    }
    let mut bands_b: Vec<Band> = Vec::new();
    let mut gaps_b: Vec<GapZone> = Vec::new();
    {
        let mut x = Q::zero();
        for item in fwd.into_iter().rev() {
            match item {
                Fwd::Band(arc, w) => {
                    let w = w * lambda.clone();
                    bands_b.push(Band {
                        lo: x.clone(),
                        hi: x.clone() + w.clone(),
                        arc,
                    });
                    x += w;
                }
                Fwd::Gap(g, node) => {
                    let g = g * lambda.clone();
                    gaps_b.push(GapZone {
                        lo: x.clone(),
                        hi: x.clone() + g.clone(),
                        node,
                    });
                    x += g;
                }
            }
        }
        if x != w_a {
            return Err(ArcError::SurgeryIntegrity {
                reason: "interface measures differ after scaling".into(),
            });
        }
    }

    // ------------------------------------------------------------------
    // Common refinement: each positive segment lies in exactly one band of
    // `a` and either a band of `b` (kept piece) or a gap of `b` (erased).
    // ------------------------------------------------------------------
    let mut cuts: Vec<Q> = vec![Q::zero(), w_a.clone()];
    for band in bands_a.iter().chain(bands_b.iter()) {
        cuts.push(band.lo.clone());
        cuts.push(band.hi.clone());
    }
    for z in &gaps_b {
        cuts.push(z.lo.clone());
        cuts.push(z.hi.clone());
    }
    cuts.sort();
    cuts.dedup();

    let mut pieces: Vec<Piece> = Vec::new();
    let mut erased: Vec<(usize, Q, Q, usize)> = Vec::new();
    for seg in cuts.windows(2) {
        let (x1, x2) = (&seg[0], &seg[1]);
        let a_band = bands_a
            .iter()
            .find(|f| f.lo <= *x1 && *x2 <= f.hi)
            .ok_or_else(|| ArcError::SurgeryIntegrity {
                reason: "interface segment not covered on the a side".into(),
            })?;
        if let Some(f) = bands_b.iter().find(|f| f.lo <= *x1 && *x2 <= f.hi) {
            pieces.push(Piece {
                a_arc: a_band.arc,
                b_arc: f.arc,
                lo: x1.clone(),
                hi: x2.clone(),
            });
        } else {
            let z = gaps_b
                .iter()
                .find(|z| z.lo <= *x1 && *x2 <= z.hi)
                .ok_or_else(|| ArcError::SurgeryIntegrity {
                    reason: "interface segment not covered on the b side".into(),
                })?;
            erased.push((a_band.arc, x1.clone(), x2.clone(), z.node));
        }
    }

    // ------------------------------------------------------------------
    // Merge events: each corner of `a`'s window `i` lying on a closed gap
    // zone of `b` pinches the two region complexes together (a corner
    // strictly inside a `b`-band merely pokes the seam). Closed gap zones
    // are pairwise disjoint, so the owning zone is unique.
    // ------------------------------------------------------------------
    let mut uf = UnionFind::new(n_reg_a + gb.n_regions());
    let mut events: Vec<usize> = Vec::new();
    for (x, node) in &zones_a {
        if let Some(z) = gaps_b.iter().find(|z| z.lo <= *x && *x <= z.hi) {
            uf.union(*node, z.node);
            events.push(*node);
        }
    }

    // ------------------------------------------------------------------
    // Band expansions: ascending interface decomposition of every band
    // touching the glued windows. `a`-bands alternate kept pieces with
    // `b`-gap zones (erased widths, or zero-width `b`-corners strictly
    // inside the band); `b`-bands alternate kept pieces with zero-width
    // `a`-corner zones.
    // ------------------------------------------------------------------
    let mut exp_a: BTreeMap<usize, Vec<ExpEntry>> = BTreeMap::new();
    for band in &bands_a {
        // rank 0 sorts a zone before the piece starting at the same point.
        let mut entries: Vec<(Q, u8, ExpEntry)> = Vec::new();
        for (idx, p) in pieces.iter().enumerate() {
            if p.a_arc == band.arc {
                entries.push((p.lo.clone(), 1, ExpEntry::Keep(idx)));
            }
        }
        for (arc, lo, hi, node) in &erased {
            if *arc == band.arc {
                entries.push((
                    lo.clone(),
                    0,
                    ExpEntry::Zone {
                        width: hi - lo,
                        node: *node,
                    },
                ));
            }
        }
        for z in &gaps_b {
            if z.lo == z.hi && band.lo < z.lo && z.lo < band.hi {
                entries.push((
                    z.lo.clone(),
                    0,
                    ExpEntry::Zone {
                        width: Q::zero(),
                        node: z.node,
                    },
                ));
            }
        }
        entries.sort_by(|l, r| (&l.0, l.1).cmp(&(&r.0, r.1)));
        exp_a.insert(band.arc, entries.into_iter().map(|(_, _, e)| e).collect());
    }

    let zone_a_at: BTreeMap<Q, usize> = zones_a.iter().cloned().collect();
    let mut exp_b: BTreeMap<usize, Vec<ExpEntry>> = BTreeMap::new();
    for band in &bands_b {
        let mut ps: Vec<(Q, usize)> = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.b_arc == band.arc)
            .map(|(idx, p)| (p.lo.clone(), idx))
            .collect();
        ps.sort_by(|l, r| l.0.cmp(&r.0));
        let mut entries = Vec::new();
        for (t, (lo, idx)) in ps.iter().enumerate() {
            if t > 0 {
                let node = *zone_a_at
                    .get(lo)
                    .ok_or_else(|| ArcError::SurgeryIntegrity {
                        reason: "piece junction without a matching corner of a".into(),
                    })?;
                entries.push(ExpEntry::Zone {
                    width: Q::zero(),
                    node,
                });
            }
            entries.push(ExpEntry::Keep(*idx));
        }
        exp_b.insert(band.arc, entries);
    }

    // ------------------------------------------------------------------
    // Output windows, assembled directly in output order:
    //   [a's window 0] [a's 1..i-1] [b's 1..n_b] [a's i+1..n_a].
    // An `a`-band expands at its far end in descending interface order (the
    // band reverses orientation); a `b`-band expands ascending (reversed
    // twice). The corner after each emitted piece is the zone separating it
    // from the next piece in output order, or the surviving old corner.
    // ------------------------------------------------------------------
    let n_a = ga.arity();
    let n_b = gb.arity();
    let arcs_a = ga.arcs();
    let arcs_b = gb.arcs();
    let touches = |g: &ArcGraph, arcs: &[(usize, usize)], arc: usize, w: usize| {
        let (x, y) = arcs[arc];
        g.addr(x).0 == w || g.addr(y).0 == w
    };

    let emit_a_window = |w: usize| -> WindowStream {
        let mut ws = WindowStream::new();
        if w == 0 {
            ws.add_gap(a.gap_star().clone());
        }
        for s in 0..ga.window_sizes()[w] {
            let flat = ga.flat(w, s);
            let arc = arc_idx_a[flat];
            if touches(ga, &arcs_a, arc, i) {
                let ent = &exp_a[&arc];
                for j in (0..ent.len()).rev() {
                    match &ent[j] {
                        ExpEntry::Zone { width, .. } => ws.add_gap(width.clone()),
                        ExpEntry::Keep(p) => {
                            let src = match j.checked_sub(1).map(|k| &ent[k]) {
                                Some(ExpEntry::Zone { node, .. }) => CornerSrc::Node(*node),
                                _ => CornerSrc::OldA(flat),
                            };
                            ws.push(Ref::Piece(*p), src);
                        }
                    }
                }
            } else {
                ws.push(Ref::FromA(arc), CornerSrc::OldA(flat));
            }
            if w == 0 {
                ws.add_gap(a.gaps()[s].clone());
            }
        }
        ws.finish();
        ws
    };
    let emit_b_window = |w: usize| -> WindowStream {
        let mut ws = WindowStream::new();
        for s in 0..gb.window_sizes()[w] {
            let flat = gb.flat(w, s);
            let arc = arc_idx_b[flat];
            if touches(gb, &arcs_b, arc, 0) {
                let ent = &exp_b[&arc];
                for j in 0..ent.len() {
                    match &ent[j] {
                        ExpEntry::Zone { width, .. } => ws.add_gap(width.clone()),
                        ExpEntry::Keep(p) => {
                            let src = match ent.get(j + 1) {
                                Some(ExpEntry::Zone { node, .. }) => CornerSrc::Node(*node),
                                _ => CornerSrc::OldB(flat),
                            };
                            ws.push(Ref::Piece(*p), src);
                        }
                    }
                }
            } else {
                ws.push(Ref::FromB(arc), CornerSrc::OldB(flat));
            }
        }
        ws.finish();
        ws
    };

    let mut wins: Vec<WindowStream> = Vec::with_capacity(n_a + n_b);
    wins.push(emit_a_window(0));
    for w in 1..i {
        wins.push(emit_a_window(w));
    }
    for w in 1..=n_b {
        wins.push(emit_b_window(w));
    }
    for w in (i + 1)..=n_a {
        wins.push(emit_a_window(w));
    }
    for (w, ws) in wins.iter().enumerate().skip(1) {
        if ws.has_gap_measure() {
            return Err(ArcError::SurgeryIntegrity {
                reason: format!(
                    "band measure erased at input window {w} cannot be recorded as a gap"
                ),
            });
        }
    }

    // Per-class Euler characteristic: members minus one per pinch event.
    let chi_of_classes = |uf: &mut UnionFind| -> BTreeMap<usize, i64> {
        let mut chi = BTreeMap::new();
        for r in 0..n_reg_a {
            *chi.entry(uf.find(r)).or_insert(0i64) += ga.region_euler_char(r);
        }
        for r in 0..gb.n_regions() {
            *chi.entry(uf.find(n_reg_a + r)).or_insert(0) += gb.region_euler_char(r);
        }
        for &e in &events {
            *chi.entry(uf.find(e)).or_insert(0) -= 1;
        }
        chi
    };

    // ------------------------------------------------------------------
    // Fully erased output: a 0-ary element. Every region of either side has
    // merged into a single class whose Euler characteristic fixes the genus.
    // ------------------------------------------------------------------
    if wins[0].slots.is_empty() {
        if wins.iter().any(|ws| !ws.slots.is_empty()) {
            return Err(ArcError::EmptyWindow { boundary: 0 });
        }
        let class_chi = chi_of_classes(&mut uf);
        if class_chi.len() != 1 {
            return Err(ArcError::SurgeryIntegrity {
                reason: "erasing all bands left disconnected regions".into(),
            });
        }
        let chi = *class_chi.values().next().unwrap();
        let two_g = 1 - chi;
        if two_g % 2 != 0 || two_g < 0 {
            return Err(ArcError::SurgeryIntegrity {
                reason: format!("non-integral genus for capped surface: chi {chi}"),
            });
        }
        return GapGraph::zero_ary((two_g / 2) as usize, wins[0].measure());
    }

    // ------------------------------------------------------------------
    // Assemble the output graph.
    // ------------------------------------------------------------------
    let window_sizes: Vec<usize> = wins.iter().map(|ws| ws.slots.len()).collect();
    let mut slot_refs: Vec<Ref> = Vec::new();
    let mut corner_srcs: Vec<CornerSrc> = Vec::new();
    let mut feet: BTreeMap<Ref, Vec<SlotAddr>> = BTreeMap::new();
    for (w, ws) in wins.iter().enumerate() {
        for (s, &(r, c)) in ws.slots.iter().enumerate() {
            slot_refs.push(r);
            corner_srcs.push(c);
            feet.entry(r).or_default().push((w, s));
        }
    }
    let mut arc_addrs: Vec<(SlotAddr, SlotAddr)> = Vec::new();
    for (_, f) in &feet {
        if f.len() != 2 {
            return Err(ArcError::SurgeryIntegrity {
                reason: "an output band does not have exactly two feet".into(),
            });
        }
        arc_addrs.push((f[0], f[1]));
    }
    let mut graph = ArcGraph::skeleton(window_sizes, &arc_addrs)?;
    let weight_of = |r: &Ref| -> Q {
        match r {
            Ref::Piece(p) => pieces[*p].hi.clone() - pieces[*p].lo.clone(),
            Ref::FromA(k) => a.weights()[*k].clone(),
            Ref::FromB(k) => b.weights()[*k].clone() * lambda.clone(),
        }
    };
    let weights: Vec<Q> = graph
        .arcs()
        .iter()
        .map(|&(lo, _)| weight_of(&slot_refs[lo]))
        .collect();

    // Region transport: resolve every new orbit to one merged class through
    // its corner attributions, then recover each class's genus from its
    // Euler characteristic and orbit count.
    let node_of_src = |c: &CornerSrc| -> usize {
        match c {
            CornerSrc::OldA(h) => node_a(*h),
            CornerSrc::OldB(h) => node_b(*h),
            CornerSrc::Node(n) => *n,
        }
    };
    let trace = graph.face_trace();
    let mut class_orbits: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (id, orbit) in trace.orbits.iter().enumerate() {
        let mut class = usize::MAX;
        for step in orbit {
            let c = uf.find(node_of_src(&corner_srcs[step.corner]));
            if class == usize::MAX {
                class = c;
            } else if class != c {
                return Err(ArcError::SurgeryIntegrity {
                    reason: "orbit attribution straddles region classes".into(),
                });
            }
        }
        class_orbits.entry(class).or_default().push(id);
    }
    let class_chi = chi_of_classes(&mut uf);
    if class_chi.keys().any(|c| !class_orbits.contains_key(c)) {
        return Err(ArcError::SurgeryIntegrity {
            reason: "a region lost all of its orbits".into(),
        });
    }
    let mut genus = Vec::new();
    let mut region_of_orbit = vec![usize::MAX; trace.orbits.len()];
    for (new_id, (&c, orbits)) in class_orbits.iter().enumerate() {
        let chi = class_chi[&c];
        let two_g = 2 - chi - orbits.len() as i64;
        if two_g % 2 != 0 || two_g < 0 {
            return Err(ArcError::SurgeryIntegrity {
                reason: format!("non-integral genus: chi {chi}, {} orbits", orbits.len()),
            });
        }
        genus.push((two_g / 2) as usize);
        for &o in orbits {
            region_of_orbit[o] = new_id;
        }
    }
    graph.set_regions(region_of_orbit, genus)?;
    if graph.surface_euler_char() != ga.surface_euler_char() + gb.surface_euler_char() {
        return Err(ArcError::SurgeryIntegrity {
            reason: "Euler characteristic is not additive across the gluing".into(),
        });
    }

    let gap_star = wins[0].lead.clone();
    let gaps = wins[0].gaps.clone();
    GapGraph::from_raw(graph, weights, gap_star, gaps).consolidate_loose()
}

/// Glue the weighted element `b` into input window `i` of `a`. A 0-ary `b`
/// caps the window off; otherwise the zero-gap thickenings are glued and the
/// result retracted (merging the parallel arcs the gluing may create).
pub fn compose(
    a: &WeightedArcGraph,
    i: usize,
    b: &WeightedArcGraph,
) -> Result<WeightedArcGraph> {
    if b.graph().is_zero_ary() {
        return cap(a, i, b.graph().region_genus()[0]);
    }
    thick_compose(&GapGraph::fatten(a), i, &GapGraph::fatten(b))?.retract()
}

/// Cap input window `i` of `a` with a genus `cap_genus` surface: every arc
/// meeting the window is erased, and all regions adjacent to the window merge
/// with the cap into one region whose Euler characteristic is fixed by
/// additivity.
pub fn cap(a: &WeightedArcGraph, i: usize, cap_genus: usize) -> Result<WeightedArcGraph> {
    let g = a.graph();
    if g.is_zero_ary() || i == 0 || i > g.arity() {
        return Err(ArcError::BoundaryOutOfRange {
            index: i,
            arity: g.arity(),
        });
    }
    let trace = g.face_trace();
    let arcs = g.arcs();
    let arc_idx = g.arc_index();
    let chi_target = g.surface_euler_char() + 1 - 2 * cap_genus as i64;

    // Regions adjacent to window `i` (equivalently: owning one of its
    // corners) all merge with the cap.
    let mut touched = vec![false; g.n_regions()];
    for s in 0..g.window_sizes()[i] {
        touched[g.region_of_orbit()[trace.orbit_of_corner[g.flat(i, s)]]] = true;
    }

    let dead = |arc: usize| {
        let (x, y) = arcs[arc];
        g.addr(x).0 == i || g.addr(y).0 == i
    };
    let survivors: Vec<usize> = (0..arcs.len()).filter(|&k| !dead(k)).collect();

    if survivors.is_empty() {
        if g.arity() != 1 {
            return Err(ArcError::SurgeryIntegrity {
                reason: "capping would empty a remaining window".into(),
            });
        }
        let two_g = 1 - chi_target;
        if two_g % 2 != 0 || two_g < 0 {
            return Err(ArcError::SurgeryIntegrity {
                reason: format!("non-integral genus for capped surface: chi {chi_target}"),
            });
        }
        return Ok(WeightedArcGraph::zero_ary((two_g / 2) as usize));
    }

    // Rebuild the windows: drop window `i`, drop the far feet of its arcs.
    let new_w = |w: usize| if w < i { w } else { w - 1 };
    let mut new_sizes = vec![0usize; g.n_boundaries() - 1];
    let mut slot_of = vec![usize::MAX; g.n_slots()];
    for w in (0..g.n_boundaries()).filter(|&w| w != i) {
        for s in 0..g.window_sizes()[w] {
            let flat = g.flat(w, s);
            if !dead(arc_idx[flat]) {
                slot_of[flat] = new_sizes[new_w(w)];
                new_sizes[new_w(w)] += 1;
            }
        }
    }
    if new_sizes.iter().any(|&k| k == 0) {
        return Err(ArcError::SurgeryIntegrity {
            reason: "capping would empty a remaining window".into(),
        });
    }
    let addr_pairs: Vec<(SlotAddr, SlotAddr)> = survivors
        .iter()
        .map(|&k| {
            let (x, y) = arcs[k];
            let (wx, _) = g.addr(x);
            let (wy, _) = g.addr(y);
            ((new_w(wx), slot_of[x]), (new_w(wy), slot_of[y]))
        })
        .collect();
    let mut skeleton = ArcGraph::skeleton(new_sizes, &addr_pairs)?;

    // Transport regions through surviving tails; untouched regions persist
    // verbatim, touched ones pool into the single capped mega region.
    let mut inv_slot = vec![usize::MAX; skeleton.n_slots()];
    for (old, &new) in slot_of.iter().enumerate() {
        if new != usize::MAX {
            let (w, _) = g.addr(old);
            inv_slot[skeleton.flat(new_w(w), new)] = old;
        }
    }
    const MEGA: usize = usize::MAX - 1;
    let new_trace = skeleton.face_trace();
    let mut class_orbits: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (id, orbit) in new_trace.orbits.iter().enumerate() {
        let mut class = usize::MAX;
        for step in orbit {
            let old_region = g.region_of_orbit()[trace.orbit_of_tail[inv_slot[step.tail]]];
            let c = if touched[old_region] { MEGA } else { old_region };
            if class == usize::MAX {
                class = c;
            } else if class != c {
                return Err(ArcError::SurgeryIntegrity {
                    reason: "orbit attribution straddles region classes".into(),
                });
            }
        }
        class_orbits.entry(class).or_default().push(id);
    }
    for (r, &t) in touched.iter().enumerate() {
        if !t && !class_orbits.contains_key(&r) {
            return Err(ArcError::SurgeryIntegrity {
                reason: "a region lost all of its orbits".into(),
            });
        }
    }
    if !class_orbits.contains_key(&MEGA) {
        return Err(ArcError::SurgeryIntegrity {
            reason: "the capped region lost all of its orbits".into(),
        });
    }
    let chi_untouched: i64 = (0..g.n_regions())
        .filter(|&r| !touched[r])
        .map(|r| g.region_euler_char(r))
        .sum();
    let chi_mega = chi_target + survivors.len() as i64 - chi_untouched;
    let mut genus = Vec::new();
    let mut region_of_orbit = vec![usize::MAX; new_trace.orbits.len()];
    for (new_id, (&c, orbits)) in class_orbits.iter().enumerate() {
        let chi = if c == MEGA {
            chi_mega
        } else {
            g.region_euler_char(c)
        };
        let two_g = 2 - chi - orbits.len() as i64;
        if two_g % 2 != 0 || two_g < 0 {
            return Err(ArcError::SurgeryIntegrity {
                reason: format!("non-integral genus: chi {chi}, {} orbits", orbits.len()),
            });
        }
        genus.push((two_g / 2) as usize);
        for &o in orbits {
            region_of_orbit[o] = new_id;
        }
    }
    skeleton.set_regions(region_of_orbit, genus)?;
    let weights = survivors.iter().map(|&k| a.weight(k).clone()).collect();
    let (out, _) = WeightedArcGraph::with_parallel(skeleton, weights)?.consolidate_all()?;
    out.graph().validate(false)?;
    Ok(out)
}
