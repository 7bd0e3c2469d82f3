//! Combinatorial arc graphs on oriented surfaces with boundary.
//!
//! A graph is stored by its boundary windows: boundary `i` carries a linear
//! order of half-edge slots (read along the induced boundary orientation,
//! starting at the marked point), a fixed-point-free pairing matching slots
//! across distinct boundaries into arcs, and a decoration of the complementary
//! regions. Regions are recorded as a partition of the face orbits of the
//! graph together with a genus for each part; the face orbits themselves are
//! recovered by tracing leaves through corners, so the whole structure is
//! canonical and structural equality is derived equality.
//!
//! Boundary 0 plays the role of the output; boundaries `1..=n` are inputs.
//! The 0-ary object (no arcs, one boundary, a single region carrying the
//! genus) is admitted as a special case.

use crate::error::{ArcError, Result};

/// A half-edge address: `(boundary, slot)` with slots counted from the marked
/// point along the boundary orientation.
pub type SlotAddr = (usize, usize);

/// One step of a face trace: travel along a directed arc (identified by its
/// tail half-edge), then turn through the corner following the head slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// Flat id of the tail half-edge of the directed arc.
    pub tail: usize,
    /// Flat id of the slot whose following gap the orbit passes through.
    pub corner: usize,
}

/// Face-orbit decomposition of a graph.
#[derive(Clone, Debug)]
pub struct FaceTrace {
    /// Orbits in canonical order (each starts at its minimal tail id and the
    /// list is sorted by that id).
    pub orbits: Vec<Vec<TraceStep>>,
    /// Orbit index of each directed arc, indexed by tail half-edge id.
    pub orbit_of_tail: Vec<usize>,
    /// Orbit index of each corner, indexed by the slot the gap follows.
    pub orbit_of_corner: Vec<usize>,
}

/// A decorated arc graph. See the module docs for the encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcGraph {
    window_sizes: Vec<usize>,
    /// Flat involution: `pairing[h]` is the partner slot of half-edge `h`.
    pairing: Vec<usize>,
    /// Region id of each face orbit, in canonical orbit order. Region ids are
    /// normalized to first-appearance order.
    region_of_orbit: Vec<usize>,
    /// Genus of each region.
    region_genus: Vec<usize>,
}

impl ArcGraph {
    // ------------------------------------------------------------------
    // Construction
    // ------------------------------------------------------------------

    /// The 0-ary object: a genus `g` surface with one free boundary and no
    /// arcs.
    pub fn zero_ary(genus: usize) -> ArcGraph {
        ArcGraph {
            window_sizes: vec![0],
            pairing: Vec::new(),
            region_of_orbit: Vec::new(),
            region_genus: vec![genus],
        }
    }

    /// Build a graph from window sizes, an arc list and a region decoration.
    ///
    /// `regions` assigns to each face orbit (in canonical orbit order; orbits
    /// are sorted by their minimal directed arc) a part index, and `genera`
    /// gives the genus of each part. Part indices are renormalized.
    pub fn from_parts(
        window_sizes: Vec<usize>,
        arcs: &[(SlotAddr, SlotAddr)],
        region_of_orbit: Vec<usize>,
        genera: Vec<usize>,
    ) -> Result<ArcGraph> {
        let g = Self::assemble(window_sizes, arcs, region_of_orbit, genera)?;
        g.validate(false)?;
        Ok(g)
    }

    /// Build the quasi-filling decoration: one genus-0 region per face orbit.
    pub fn quasi_filling(
        window_sizes: Vec<usize>,
        arcs: &[(SlotAddr, SlotAddr)],
    ) -> Result<ArcGraph> {
        let mut g = Self::assemble_undecorated(window_sizes, arcs)?;
        let n_orbits = g.face_trace().orbits.len();
        g.region_of_orbit = (0..n_orbits).collect();
        g.region_genus = vec![0; n_orbits];
        g.validate(false)?;
        Ok(g)
    }

    /// Like [`from_parts`](Self::from_parts) but tolerating parallel arcs
    /// (surgery intermediates and thickened graphs). With `regions = None`
    /// the quasi-filling decoration is used.
    pub fn from_parts_with(
        window_sizes: Vec<usize>,
        arcs: &[(SlotAddr, SlotAddr)],
        regions: Option<(Vec<usize>, Vec<usize>)>,
    ) -> Result<ArcGraph> {
        let mut g = Self::assemble_undecorated(window_sizes, arcs)?;
        match regions {
            Some((region_of_orbit, genera)) => {
                g.region_of_orbit = region_of_orbit;
                g.region_genus = genera;
                g.canonicalize_regions()?;
            }
            None => {
                let n_orbits = g.face_trace().orbits.len();
                g.region_of_orbit = (0..n_orbits).collect();
                g.region_genus = vec![0; n_orbits];
            }
        }
        g.validate(true)?;
        Ok(g)
    }

    /// Replace the region decoration (surgery transport).
    pub(crate) fn set_regions(
        &mut self,
        region_of_orbit: Vec<usize>,
        genus: Vec<usize>,
    ) -> Result<()> {
        self.region_of_orbit = region_of_orbit;
        self.region_genus = genus;
        self.canonicalize_regions()?;
        self.validate(true)
    }

    /// Assemble windows and pairing only; the caller must install a region
    /// decoration via [`set_regions`](Self::set_regions) before use.
    pub(crate) fn skeleton(
        window_sizes: Vec<usize>,
        arcs: &[(SlotAddr, SlotAddr)],
    ) -> Result<ArcGraph> {
        Self::assemble_undecorated(window_sizes, arcs)
    }

    fn assemble(
        window_sizes: Vec<usize>,
        arcs: &[(SlotAddr, SlotAddr)],
        region_of_orbit: Vec<usize>,
        genera: Vec<usize>,
    ) -> Result<ArcGraph> {
        let mut g = Self::assemble_undecorated(window_sizes, arcs)?;
        g.region_of_orbit = region_of_orbit;
        g.region_genus = genera;
        g.canonicalize_regions()?;
        Ok(g)
    }

    fn assemble_undecorated(
        window_sizes: Vec<usize>,
        arcs: &[(SlotAddr, SlotAddr)],
    ) -> Result<ArcGraph> {
        let total: usize = window_sizes.iter().sum();
        if total != 2 * arcs.len() {
            return Err(ArcError::Malformed {
                reason: format!(
                    "window sizes sum to {total} but {} arcs need {} slots",
                    arcs.len(),
                    2 * arcs.len()
                ),
            });
        }
        let mut g = ArcGraph {
            window_sizes,
            pairing: vec![usize::MAX; total],
            region_of_orbit: Vec::new(),
            region_genus: Vec::new(),
        };
        for &(a, b) in arcs {
            let (ha, hb) = (g.flat_checked(a)?, g.flat_checked(b)?);
            if g.pairing[ha] != usize::MAX || g.pairing[hb] != usize::MAX || ha == hb {
                return Err(ArcError::DanglingHalfEdge {
                    boundary: a.0,
                    slot: a.1,
                });
            }
            g.pairing[ha] = hb;
            g.pairing[hb] = ha;
        }
        Ok(g)
    }

    fn flat_checked(&self, (b, s): SlotAddr) -> Result<usize> {
        if b >= self.window_sizes.len() || s >= self.window_sizes[b] {
            return Err(ArcError::DanglingHalfEdge {
                boundary: b,
                slot: s,
            });
        }
        Ok(self.flat(b, s))
    }

    /// Renormalize region ids to first-appearance order so equal graphs have
    /// equal encodings.
    fn canonicalize_regions(&mut self) -> Result<()> {
        let n_regions = self.region_genus.len();
        let mut order = vec![usize::MAX; n_regions];
        let mut new_genus = Vec::with_capacity(n_regions);
        let mut next = 0usize;
        for r in self.region_of_orbit.iter_mut() {
            if *r >= n_regions {
                return Err(ArcError::BadRegionDecoration {
                    reason: format!("orbit mapped to unknown region {r}"),
                });
            }
            if order[*r] == usize::MAX {
                order[*r] = next;
                new_genus.push(self.region_genus[*r]);
                next += 1;
            }
            *r = order[*r];
        }
        if next != n_regions && !(self.is_zero_ary() && n_regions == 1) {
            return Err(ArcError::BadRegionDecoration {
                reason: "empty region part".into(),
            });
        }
        if !self.is_zero_ary() {
            self.region_genus = new_genus;
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Basic accessors
    // ------------------------------------------------------------------

    /// Number of boundaries (windows), including boundary 0.
    pub fn n_boundaries(&self) -> usize {
        self.window_sizes.len()
    }

    /// Operadic arity: number of input boundaries.
    pub fn arity(&self) -> usize {
        self.window_sizes.len() - 1
    }

    pub fn window_sizes(&self) -> &[usize] {
        &self.window_sizes
    }

    pub fn n_arcs(&self) -> usize {
        self.pairing.len() / 2
    }

    pub fn is_zero_ary(&self) -> bool {
        self.pairing.is_empty() && self.window_sizes == [0]
    }

    pub fn n_slots(&self) -> usize {
        self.pairing.len()
    }

    /// Flat id of slot `(b, s)`.
    pub fn flat(&self, b: usize, s: usize) -> usize {
        self.window_sizes[..b].iter().sum::<usize>() + s
    }

    /// Inverse of [`flat`](Self::flat).
    pub fn addr(&self, h: usize) -> SlotAddr {
        let mut b = 0;
        let mut rest = h;
        while rest >= self.window_sizes[b] {
            rest -= self.window_sizes[b];
            b += 1;
        }
        (b, rest)
    }

    pub fn partner(&self, h: usize) -> usize {
        self.pairing[h]
    }

    /// Cyclically next slot within the window of `h`.
    pub fn next_in_window(&self, h: usize) -> usize {
        let (b, s) = self.addr(h);
        self.flat(b, (s + 1) % self.window_sizes[b])
    }

    /// The corner following slot `(b, k_b - 1)` wraps through the marked
    /// point.
    pub fn corner_is_marked(&self, corner: usize) -> bool {
        let (b, s) = self.addr(corner);
        s + 1 == self.window_sizes[b]
    }

    /// Flat id of the marked corner of boundary `b` (gap after the last slot).
    pub fn marked_corner(&self, b: usize) -> usize {
        self.flat(b, self.window_sizes[b] - 1)
    }

    /// Arcs in canonical order (sorted by minimal flat half-edge id), as
    /// pairs of flat ids `(lo, hi)`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_arcs());
        for h in 0..self.pairing.len() {
            let p = self.pairing[h];
            if h < p {
                out.push((h, p));
            }
        }
        out
    }

    /// Arc index of the arc containing half-edge `h`.
    pub fn arc_of(&self, h: usize) -> usize {
        let lo = h.min(self.pairing[h]);
        (0..lo).filter(|&x| x < self.pairing[x]).count()
    }

    /// Precomputed map half-edge id -> arc index.
    pub fn arc_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.pairing.len()];
        for (k, (a, b)) in self.arcs().into_iter().enumerate() {
            idx[a] = k;
            idx[b] = k;
        }
        idx
    }

    pub fn n_regions(&self) -> usize {
        self.region_genus.len()
    }

    pub fn region_of_orbit(&self) -> &[usize] {
        &self.region_of_orbit
    }

    pub fn region_genus(&self) -> &[usize] {
        &self.region_genus
    }

    /// Orbit indices of each region.
    pub fn region_orbits(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.n_regions()];
        for (orbit, &r) in self.region_of_orbit.iter().enumerate() {
            parts[r].push(orbit);
        }
        parts
    }

    // ------------------------------------------------------------------
    // Face trace
    // ------------------------------------------------------------------

    /// Trace all face orbits. Each directed arc (= tail half-edge) appears in
    /// exactly one orbit; the step records the corner the orbit turns
    /// through after traversing the arc.
    pub fn face_trace(&self) -> FaceTrace {
        let total = self.pairing.len();
        let mut orbit_of_tail = vec![usize::MAX; total];
        let mut orbits = Vec::new();
        for start in 0..total {
            if orbit_of_tail[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut cycle = Vec::new();
            let mut h = start;
            loop {
                orbit_of_tail[h] = id;
                let corner = self.pairing[h];
                cycle.push(TraceStep { tail: h, corner });
                h = self.next_in_window(corner);
                if h == start {
                    break;
                }
            }
            orbits.push(cycle);
        }
        let mut orbit_of_corner = vec![usize::MAX; total];
        for (id, cycle) in orbits.iter().enumerate() {
            for step in cycle {
                orbit_of_corner[step.corner] = id;
            }
        }
        FaceTrace {
            orbits,
            orbit_of_tail,
            orbit_of_corner,
        }
    }

    // ------------------------------------------------------------------
    // Euler bookkeeping
    // ------------------------------------------------------------------

    /// Euler characteristic of one region: `2 - 2g - b` with `b` the number
    /// of orbits (the 0-ary region has a free boundary instead, `1 - 2g`).
    pub fn region_euler_char(&self, region: usize) -> i64 {
        let b = self
            .region_of_orbit
            .iter()
            .filter(|&&r| r == region)
            .count() as i64;
        let g = self.region_genus[region] as i64;
        if self.is_zero_ary() {
            1 - 2 * g
        } else {
            2 - 2 * g - b
        }
    }

    /// Euler characteristic of the ambient surface.
    pub fn surface_euler_char(&self) -> i64 {
        let regions: i64 = (0..self.n_regions())
            .map(|r| self.region_euler_char(r))
            .sum();
        regions - self.n_arcs() as i64
    }

    /// Genus of the ambient surface, from `chi = 2 - 2g - r`.
    pub fn ambient_genus(&self) -> i64 {
        let chi = self.surface_euler_char();
        let r = self.n_boundaries() as i64;
        (2 - r - chi) / 2
    }

    /// Euler defect `sum_R (chi(R) - 1)`; zero exactly on quasi-filling
    /// graphs and negative otherwise.
    pub fn euler_defect(&self) -> i64 {
        (0..self.n_regions())
            .map(|r| self.region_euler_char(r) - 1)
            .sum()
    }

    pub fn is_quasi_filling(&self) -> bool {
        self.euler_defect() == 0
    }

    // ------------------------------------------------------------------
    // Parallelism and twisting
    // ------------------------------------------------------------------

    /// All parallel pairs of arcs, as pairs of arc indices. Two arcs are
    /// parallel when the region between them is a single genus-0 rectangle
    /// orbit whose two boundary corners both avoid the marked points.
    pub fn parallel_pairs(&self) -> Vec<(usize, usize)> {
        let trace = self.face_trace();
        let arc_idx = self.arc_index();
        let mut pairs = Vec::new();
        for (id, orbit) in trace.orbits.iter().enumerate() {
            if orbit.len() != 2 {
                continue;
            }
            if orbit.iter().any(|s| self.corner_is_marked(s.corner)) {
                continue;
            }
            let region = self.region_of_orbit[id];
            let singleton = self.region_of_orbit.iter().filter(|&&r| r == region).count() == 1;
            if !singleton || self.region_genus[region] != 0 {
                continue;
            }
            let (a, b) = (arc_idx[orbit[0].tail], arc_idx[orbit[1].tail]);
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    pub fn are_parallel(&self, arc_a: usize, arc_b: usize) -> bool {
        let key = (arc_a.min(arc_b), arc_a.max(arc_b));
        self.parallel_pairs().contains(&key)
    }

    /// Whether the graph is twisted at boundary `i`: erasing the marked point
    /// of `i` would let the first and last arcs of window `i` become
    /// homotopic. Combinatorially, the region at the marked corner of `i` is
    /// a genus-0 rectangle orbit whose opposite corner avoids every marked
    /// point.
    pub fn is_twisted_at(&self, i: usize) -> bool {
        if self.window_sizes[i] < 2 {
            return false;
        }
        let trace = self.face_trace();
        let marked = self.marked_corner(i);
        let id = trace.orbit_of_corner[marked];
        let orbit = &trace.orbits[id];
        if orbit.len() != 2 {
            return false;
        }
        let other = orbit
            .iter()
            .map(|s| s.corner)
            .find(|&c| c != marked)
            .expect("rectangle has two corners");
        if self.corner_is_marked(other) {
            return false;
        }
        let region = self.region_of_orbit[id];
        let singleton = self.region_of_orbit.iter().filter(|&&r| r == region).count() == 1;
        singleton && self.region_genus[region] == 0
    }

    /// Untwisted at every boundary (including 0).
    pub fn is_untwisted(&self) -> bool {
        (0..self.n_boundaries()).all(|i| !self.is_twisted_at(i))
    }

    // ------------------------------------------------------------------
    // Tree classes
    // ------------------------------------------------------------------

    /// Every arc has exactly one endpoint on boundary 0.
    pub fn is_gtree(&self) -> bool {
        if self.is_zero_ary() {
            return true;
        }
        for h in 0..self.pairing.len() {
            let (b, _) = self.addr(h);
            let (pb, _) = self.addr(self.pairing[h]);
            if b != 0 && pb != 0 {
                return false;
            }
        }
        true
    }

    /// Boundary labels hit by the window-0 slots, in window-0 order.
    pub fn seq(&self) -> Result<Vec<usize>> {
        if !self.is_gtree() {
            return Err(ArcError::NotGTree);
        }
        Ok((0..self.window_sizes[0])
            .map(|s| self.addr(self.pairing[self.flat(0, s)]).0)
            .collect())
    }

    /// Inverse of [`seq`](Self::seq) on linearly anti-compatible trees: build
    /// the quasi-filling tree whose window-0 slots hit the given boundary
    /// labels in order. The labels must cover `1..=n` for some `n`.
    pub fn from_window_word(word: &[usize]) -> Result<ArcGraph> {
        let n = *word.iter().max().unwrap_or(&0);
        let mut counts = vec![0usize; n + 1];
        for &l in word {
            if l == 0 || l > n {
                return Err(ArcError::Malformed {
                    reason: format!("window label {l} out of range 1..={n}"),
                });
            }
            counts[l] += 1;
        }
        if counts[1..].iter().any(|&c| c == 0) {
            return Err(ArcError::Malformed {
                reason: "window word skips a boundary label".into(),
            });
        }
        let mut sizes = vec![word.len()];
        sizes.extend_from_slice(&counts[1..]);
        // Anti-compatibility: slot 0 of window l holds its last window-0 visit.
        let mut seen = vec![0usize; n + 1];
        let mut arcs = Vec::with_capacity(word.len());
        for (p, &l) in word.iter().enumerate() {
            seen[l] += 1;
            arcs.push(((0usize, p), (l, counts[l] - seen[l])));
        }
        ArcGraph::quasi_filling(sizes, &arcs)
    }

    /// For each boundary `i >= 1`, the window-0 slots of the arcs at `i`, in
    /// window-`i` order.
    fn window_zero_slots_per_window(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_gtree() {
            return Err(ArcError::NotGTree);
        }
        let mut out = Vec::with_capacity(self.arity());
        for i in 1..self.n_boundaries() {
            let mut v = Vec::with_capacity(self.window_sizes[i]);
            for s in 0..self.window_sizes[i] {
                let p = self.pairing[self.flat(i, s)];
                v.push(self.addr(p).1);
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Linear anti-compatibility: at each input boundary the arcs appear in
    /// reverse window-0 order.
    pub fn is_lgtree(&self) -> bool {
        match self.window_zero_slots_per_window() {
            Err(_) => false,
            Ok(ws) => ws.iter().all(|v| v.windows(2).all(|w| w[0] > w[1])),
        }
    }

    /// Cyclic anti-compatibility: at each input boundary the arcs appear in
    /// some rotation of reverse window-0 order.
    pub fn is_cgtree(&self) -> bool {
        match self.window_zero_slots_per_window() {
            Err(_) => false,
            Ok(ws) => ws.iter().all(|v| {
                let k = v.len();
                if k <= 1 {
                    return true;
                }
                let ascents = (0..k).filter(|&j| v[j] < v[(j + 1) % k]).count();
                ascents == 1
            }),
        }
    }

    // ------------------------------------------------------------------
    // Relabeling
    // ------------------------------------------------------------------

    /// Relabel input boundaries by `sigma` (old label `i` becomes
    /// `sigma[i-1]`). Returns the relabeled graph and the arc index map
    /// (old arc id -> new arc id).
    pub fn relabel_boundaries(&self, sigma: &[usize]) -> Result<(ArcGraph, Vec<usize>)> {
        let n = self.arity();
        if sigma.len() != n {
            return Err(ArcError::ArityMismatch {
                expected: n,
                got: sigma.len(),
            });
        }
        let mut seen = vec![false; n + 1];
        for &s in sigma {
            if s == 0 || s > n || seen[s] {
                return Err(ArcError::Malformed {
                    reason: "not a permutation of the input labels".into(),
                });
            }
            seen[s] = true;
        }
        let mut new_sizes = vec![0; n + 1];
        new_sizes[0] = self.window_sizes[0];
        for i in 1..=n {
            new_sizes[sigma[i - 1]] = self.window_sizes[i];
        }
        let map_addr = |(b, s): SlotAddr| -> SlotAddr {
            if b == 0 {
                (0, s)
            } else {
                (sigma[b - 1], s)
            }
        };
        let arcs: Vec<_> = self
            .arcs()
            .into_iter()
            .map(|(x, y)| (map_addr(self.addr(x)), map_addr(self.addr(y))))
            .collect();
        // Region data transports along the induced orbit bijection.
        let mut new = Self::assemble_undecorated(new_sizes, &arcs)?;
        let old_trace = self.face_trace();
        let new_trace = new.face_trace();
        // Map each new orbit to its old orbit via any tail half-edge.
        let flat_map: Vec<usize> = (0..self.pairing.len())
            .map(|h| {
                let (b, s) = map_addr(self.addr(h));
                new.flat(b, s)
            })
            .collect();
        let mut new_region = vec![usize::MAX; new_trace.orbits.len()];
        for (old_orbit, &region) in self.region_of_orbit.iter().enumerate() {
            let tail = old_trace.orbits[old_orbit][0].tail;
            new_region[new_trace.orbit_of_tail[flat_map[tail]]] = region;
        }
        new.region_of_orbit = new_region;
        new.region_genus = self.region_genus.clone();
        new.canonicalize_regions()?;
        // Arc index map.
        let old_arcs = self.arcs();
        let new_arc_idx = new.arc_index();
        let arc_map = old_arcs
            .iter()
            .map(|&(h, _)| new_arc_idx[flat_map[h]])
            .collect();
        Ok((new, arc_map))
    }

    // ------------------------------------------------------------------
    // Validation
    // ------------------------------------------------------------------

    /// Check all structural invariants. With `allow_parallel` the parallel-arc
    /// rejection is skipped (used for thickened graphs, where positive gaps
    /// hold parallel arcs apart).
    pub fn validate(&self, allow_parallel: bool) -> Result<()> {
        if self.window_sizes.is_empty() {
            return Err(ArcError::Malformed {
                reason: "no boundaries".into(),
            });
        }
        if self.is_zero_ary() {
            if self.region_genus.len() != 1 || !self.region_of_orbit.is_empty() {
                return Err(ArcError::BadRegionDecoration {
                    reason: "0-ary object must have exactly one region".into(),
                });
            }
            return Ok(());
        }
        for (b, &k) in self.window_sizes.iter().enumerate() {
            if k == 0 {
                return Err(ArcError::EmptyWindow { boundary: b });
            }
        }
        let total = self.pairing.len();
        for h in 0..total {
            let p = self.pairing[h];
            if p >= total || self.pairing[p] != h || p == h {
                let (b, s) = self.addr(h);
                return Err(ArcError::DanglingHalfEdge {
                    boundary: b,
                    slot: s,
                });
            }
            let (b, s) = self.addr(h);
            let (pb, ps) = self.addr(p);
            if b == pb {
                return Err(ArcError::SameBoundaryArc {
                    boundary: b,
                    slot_a: s.min(ps),
                    slot_b: s.max(ps),
                });
            }
        }
        let trace = self.face_trace();
        if self.region_of_orbit.len() != trace.orbits.len() {
            return Err(ArcError::BadRegionDecoration {
                reason: format!(
                    "{} orbits but {} region assignments",
                    trace.orbits.len(),
                    self.region_of_orbit.len()
                ),
            });
        }
        let mut seen = vec![false; self.region_genus.len()];
        for &r in &self.region_of_orbit {
            if r >= self.region_genus.len() {
                return Err(ArcError::BadRegionDecoration {
                    reason: format!("orbit mapped to unknown region {r}"),
                });
            }
            seen[r] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(ArcError::BadRegionDecoration {
                reason: "empty region part".into(),
            });
        }
        // Ambient genus must be a nonnegative integer.
        let chi = self.surface_euler_char();
        let r = self.n_boundaries() as i64;
        if (2 - r - chi) % 2 != 0 || (2 - r - chi) / 2 < 0 {
            return Err(ArcError::BadRegionDecoration {
                reason: format!("ambient genus from chi = {chi} is not a nonnegative integer"),
            });
        }
        if !allow_parallel {
            if let Some(&(a, b)) = self.parallel_pairs().first() {
                return Err(ArcError::ParallelArcs { arc_a: a, arc_b: b });
            }
        }
        // Connectivity of the ambient surface.
        let n_regions = self.n_regions();
        let n_bdry = self.n_boundaries();
        let mut uf = UnionFind::new(n_regions + n_bdry);
        for (id, orbit) in trace.orbits.iter().enumerate() {
            let region = self.region_of_orbit[id];
            for step in orbit {
                let (b, _) = self.addr(step.corner);
                uf.union(region, n_regions + b);
            }
        }
        let arc_idx = self.arc_index();
        let _ = arc_idx;
        for (a, b) in self.arcs() {
            uf.union(
                self.region_of_orbit[trace.orbit_of_tail[a]],
                self.region_of_orbit[trace.orbit_of_tail[b]],
            );
        }
        let root = uf.find(0);
        for node in 1..n_regions + n_bdry {
            if uf.find(node) != root {
                return Err(ArcError::Disconnected);
            }
        }
        Ok(())
    }
}

/// Union-find with path compression and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the two elements were in distinct classes.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One arc on the cylinder: the operad identity shape.
    pub fn id_graph() -> ArcGraph {
        ArcGraph::quasi_filling(vec![1, 1], &[((0, 0), (1, 0))]).unwrap()
    }

    /// The twist shape: two arcs on the cylinder, windows read identically on
    /// both sides.
    pub fn twist_graph() -> ArcGraph {
        ArcGraph::quasi_filling(vec![2, 2], &[((0, 0), (1, 0)), ((0, 1), (1, 1))]).unwrap()
    }

    #[test]
    fn id_cylinder_trace() {
        let g = id_graph();
        let t = g.face_trace();
        // A single square orbit through both marked corners.
        assert_eq!(t.orbits.len(), 1);
        assert_eq!(t.orbits[0].len(), 2);
        assert!(t.orbits[0].iter().all(|s| g.corner_is_marked(s.corner)));
        assert_eq!(g.euler_defect(), 0);
        assert!(g.is_quasi_filling());
        assert_eq!(g.ambient_genus(), 0);
        assert!(!g.is_twisted_at(0));
        assert!(!g.is_twisted_at(1));
        assert!(g.is_gtree() && g.is_lgtree() && g.is_cgtree());
    }

    #[test]
    fn twist_cylinder_structure() {
        let g = twist_graph();
        let t = g.face_trace();
        // Two rectangle orbits, each through exactly one marked corner.
        assert_eq!(t.orbits.len(), 2);
        for orbit in &t.orbits {
            assert_eq!(orbit.len(), 2);
            let marked = orbit
                .iter()
                .filter(|s| g.corner_is_marked(s.corner))
                .count();
            assert_eq!(marked, 1);
        }
        assert!(g.is_quasi_filling());
        assert_eq!(g.ambient_genus(), 0);
        assert!(g.parallel_pairs().is_empty());
        // The twist shape is twisted at both ends: either marked point can
        // slide across the wrapping band.
        assert!(g.is_twisted_at(0));
        assert!(g.is_twisted_at(1));
        // Identical window orders are cyclically but not linearly
        // anti-compatible.
        assert!(g.is_gtree());
        assert!(!g.is_lgtree());
        assert!(g.is_cgtree());
    }

    #[test]
    fn anti_compatible_two_arc_cylinder_is_parallel() {
        // Windows [A, B] against [B, A] put a rectangle with no marked corner
        // between the two arcs, so the quasi-filling decoration is rejected.
        let err = ArcGraph::quasi_filling(vec![2, 2], &[((0, 0), (1, 1)), ((0, 1), (1, 0))])
            .unwrap_err();
        assert!(matches!(err, ArcError::ParallelArcs { .. }));
        // Merging both orbits into one genus-0 region is the valid
        // decoration (a boundary-defect element).
        let g = ArcGraph::from_parts(
            vec![2, 2],
            &[((0, 0), (1, 1)), ((0, 1), (1, 0))],
            vec![0, 0],
            vec![0],
        )
        .unwrap();
        assert_eq!(g.euler_defect(), -1);
        assert_eq!(g.ambient_genus(), 1);
        assert!(g.is_untwisted());
    }

    #[test]
    fn one_arc_genus_region() {
        // One arc whose single region carries genus 1: defect -2 on a
        // genus-1 surface.
        let g = ArcGraph::from_parts(vec![1, 1], &[((0, 0), (1, 0))], vec![0], vec![1]).unwrap();
        assert_eq!(g.euler_defect(), -2);
        assert_eq!(g.ambient_genus(), 1);
        assert!(g.is_untwisted());
    }

    #[test]
    fn cup_one_trace() {
        // Alternating (1,2,1) with anti-compatible windows.
        let g = ArcGraph::quasi_filling(
            vec![3, 2, 1],
            &[((0, 0), (1, 1)), ((0, 1), (2, 0)), ((0, 2), (1, 0))],
        )
        .unwrap();
        assert_eq!(g.seq().unwrap(), vec![1, 2, 1]);
        assert!(g.is_lgtree());
        let t = g.face_trace();
        assert_eq!(t.orbits.len(), 2);
        assert!(g.is_quasi_filling());
        assert_eq!(g.ambient_genus(), 0);
        // Corner-count invariant: every slot heads one corner, plus one
        // marked corner per boundary already included (marked corners are
        // the wrap-around gaps).
        let corners: usize = t.orbits.iter().map(|o| o.len()).sum();
        assert_eq!(corners, g.n_slots());
    }

    #[test]
    fn cup_two_single_orbit() {
        // Alternating (1,2,1,2): one orbit, quasi-filling at ambient genus 1.
        let g = ArcGraph::quasi_filling(
            vec![4, 2, 2],
            &[
                ((0, 0), (1, 1)),
                ((0, 1), (2, 1)),
                ((0, 2), (1, 0)),
                ((0, 3), (2, 0)),
            ],
        )
        .unwrap();
        let t = g.face_trace();
        assert_eq!(t.orbits.len(), 1);
        assert!(g.is_quasi_filling());
        assert_eq!(g.ambient_genus(), 1);
        assert!(g.is_untwisted());
        assert!(g.is_lgtree());
    }

    #[test]
    fn zero_ary_objects() {
        let d = ArcGraph::zero_ary(0);
        d.validate(false).unwrap();
        assert_eq!(d.euler_defect(), 0);
        assert!(d.is_quasi_filling());
        assert_eq!(d.ambient_genus(), 0);
        let f = ArcGraph::zero_ary(2);
        f.validate(false).unwrap();
        assert_eq!(f.euler_defect(), -4);
        assert_eq!(f.ambient_genus(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        // Self-paired slot.
        assert!(ArcGraph::quasi_filling(vec![2, 2], &[((0, 0), (0, 0)), ((0, 1), (1, 0))]).is_err());
        // Same-boundary arc.
        let err =
            ArcGraph::quasi_filling(vec![2, 1, 1], &[((0, 0), (0, 1)), ((1, 0), (2, 0))])
                .unwrap_err();
        assert!(matches!(err, ArcError::SameBoundaryArc { .. }));
        // Out-of-range slot.
        let err = ArcGraph::quasi_filling(vec![1, 1], &[((0, 0), (1, 5))]).unwrap_err();
        assert!(matches!(err, ArcError::DanglingHalfEdge { .. }));
    }

    #[test]
    fn relabel_swaps_windows() {
        let g = ArcGraph::quasi_filling(
            vec![3, 2, 1],
            &[((0, 0), (1, 1)), ((0, 1), (2, 0)), ((0, 2), (1, 0))],
        )
        .unwrap();
        let (h, arc_map) = g.relabel_boundaries(&[2, 1]).unwrap();
        assert_eq!(h.seq().unwrap(), vec![2, 1, 2]);
        assert_eq!(h.window_sizes(), &[3, 1, 2]);
        assert_eq!(arc_map.len(), 3);
        let (back, _) = h.relabel_boundaries(&[2, 1]).unwrap();
        assert_eq!(back, g);
    }
}
