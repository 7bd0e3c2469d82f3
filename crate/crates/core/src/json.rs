//! Canonical JSON interchange for every domain type, and the DOT rendering
//! of dual graphs. All numbers are exact: rationals serialize as `"p/q"`
//! strings and chain coefficients as decimal strings. Serialization is
//! deterministic (fixed key order, canonical internal order), so identical
//! values always produce byte-identical text.

use num::bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cell::{Cell, Chain};
use crate::error::{ArcError, Result};
use crate::frobenius::{Cochain, FrobeniusAlgebra};
use crate::graph::ArcGraph;
use crate::rational::{format_ratio, parse_ratio, Q};
use crate::weighted::{GapGraph, WeightedArcGraph};

const VERSION: u32 = 1;

fn malformed(e: impl std::fmt::Display) -> ArcError {
    ArcError::Malformed {
        reason: e.to_string(),
    }
}

fn check_header(kind: &str, version: u32, expected: &str) -> Result<()> {
    if version != VERSION {
        return Err(malformed(format!(
            "unsupported format version {version}, expected {VERSION}"
        )));
    }
    if kind != expected {
        return Err(malformed(format!(
            "expected a {expected:?} document, found kind {kind:?}"
        )));
    }
    Ok(())
}

fn ratios_out(xs: &[Q]) -> Vec<String> {
    xs.iter().map(format_ratio).collect()
}

fn ratios_in(xs: &[String]) -> Result<Vec<Q>> {
    xs.iter().map(|s| parse_ratio(s)).collect()
}

// ----------------------------------------------------------------------
// Wire formats
// ----------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphBody {
    window_sizes: Vec<usize>,
    /// Arcs as pairs of `[window, slot]` addresses.
    arcs: Vec<[[usize; 2]; 2]>,
    region_of_orbit: Vec<usize>,
    region_genus: Vec<usize>,
}

impl GraphBody {
    fn of(g: &ArcGraph) -> GraphBody {
        GraphBody {
            window_sizes: g.window_sizes().to_vec(),
            arcs: g
                .arcs()
                .iter()
                .map(|&(h, p)| {
                    let a = g.addr(h);
                    let b = g.addr(p);
                    [[a.0, a.1], [b.0, b.1]]
                })
                .collect(),
            region_of_orbit: g.region_of_orbit().to_vec(),
            region_genus: g.region_genus().to_vec(),
        }
    }

    fn build(&self) -> Result<ArcGraph> {
        if self.window_sizes == [0] && self.arcs.is_empty() {
            let genus = self.region_genus.first().copied().unwrap_or(0);
            return Ok(ArcGraph::zero_ary(genus));
        }
        let arcs: Vec<((usize, usize), (usize, usize))> = self
            .arcs
            .iter()
            .map(|[[aw, asl], [bw, bsl]]| ((*aw, *asl), (*bw, *bsl)))
            .collect();
        ArcGraph::from_parts(
            self.window_sizes.clone(),
            &arcs,
            self.region_of_orbit.clone(),
            self.region_genus.clone(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    version: u32,
    kind: String,
    #[serde(flatten)]
    body: GraphBody,
}

#[derive(Serialize, Deserialize)]
struct WeightedWire {
    version: u32,
    kind: String,
    graph: GraphBody,
    weights: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GapWire {
    version: u32,
    kind: String,
    graph: GraphBody,
    weights: Vec<String>,
    gap_star: String,
    gaps: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ChainTermWire {
    graph: GraphBody,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct ChainWire {
    version: u32,
    kind: String,
    terms: Vec<ChainTermWire>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraWire {
    version: u32,
    kind: String,
    dim: usize,
    basis: Vec<String>,
    structure_constants: Vec<String>,
    trace: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CochainWire {
    version: u32,
    kind: String,
    arity: usize,
    dim: usize,
    coeffs: Vec<String>,
}

// ----------------------------------------------------------------------
// Public conversions
// ----------------------------------------------------------------------

fn to_text<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail") + "\n"
}

fn from_text<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(malformed)
}

pub fn graph_to_json(g: &ArcGraph) -> String {
    to_text(&GraphWire {
        version: VERSION,
        kind: "arc_graph".into(),
        body: GraphBody::of(g),
    })
}

pub fn graph_from_json(text: &str) -> Result<ArcGraph> {
    let wire: GraphWire = from_text(text)?;
    check_header(&wire.kind, wire.version, "arc_graph")?;
    wire.body.build()
}

pub fn weighted_to_json(w: &WeightedArcGraph) -> String {
    to_text(&WeightedWire {
        version: VERSION,
        kind: "weighted_arc_graph".into(),
        graph: GraphBody::of(w.graph()),
        weights: ratios_out(w.weights()),
    })
}

pub fn weighted_from_json(text: &str) -> Result<WeightedArcGraph> {
    let wire: WeightedWire = from_text(text)?;
    check_header(&wire.kind, wire.version, "weighted_arc_graph")?;
    WeightedArcGraph::new(wire.graph.build()?, ratios_in(&wire.weights)?)
}

pub fn gap_to_json(g: &GapGraph) -> String {
    to_text(&GapWire {
        version: VERSION,
        kind: "gap_graph".into(),
        graph: GraphBody::of(g.graph()),
        weights: ratios_out(g.weights()),
        gap_star: format_ratio(g.gap_star()),
        gaps: ratios_out(g.gaps()),
    })
}

pub fn gap_from_json(text: &str) -> Result<GapGraph> {
    let wire: GapWire = from_text(text)?;
    check_header(&wire.kind, wire.version, "gap_graph")?;
    GapGraph::new(
        wire.graph.build()?,
        ratios_in(&wire.weights)?,
        parse_ratio(&wire.gap_star)?,
        ratios_in(&wire.gaps)?,
    )
}

pub fn cell_to_json(c: &Cell) -> String {
    to_text(&GraphWire {
        version: VERSION,
        kind: "cell".into(),
        body: GraphBody::of(c.graph()),
    })
}

pub fn cell_from_json(text: &str) -> Result<Cell> {
    let wire: GraphWire = from_text(text)?;
    check_header(&wire.kind, wire.version, "cell")?;
    Cell::new(wire.body.build()?)
}

pub fn chain_to_json(c: &Chain) -> String {
    to_text(&ChainWire {
        version: VERSION,
        kind: "chain".into(),
        terms: c
            .iter()
            .map(|(cell, coeff)| ChainTermWire {
                graph: GraphBody::of(cell.graph()),
                coeff: coeff.to_string(),
            })
            .collect(),
    })
}

pub fn chain_from_json(text: &str) -> Result<Chain> {
    let wire: ChainWire = from_text(text)?;
    check_header(&wire.kind, wire.version, "chain")?;
    let mut out = Chain::new();
    for term in wire.terms {
        let coeff: BigInt = term
            .coeff
            .parse()
            .map_err(|_| malformed(format!("invalid integer literal {:?}", term.coeff)))?;
        out.add(Cell::new(term.graph.build()?)?, coeff);
    }
    Ok(out)
}

pub fn algebra_to_json(a: &FrobeniusAlgebra) -> String {
    to_text(&AlgebraWire {
        version: VERSION,
        kind: "frobenius_algebra".into(),
        dim: a.dim(),
        basis: a.basis().to_vec(),
        structure_constants: ratios_out(a.structure_constants()),
        trace: ratios_out(a.trace_vector()),
    })
}

pub fn algebra_from_json(text: &str) -> Result<FrobeniusAlgebra> {
    let wire: AlgebraWire = from_text(text)?;
    check_header(&wire.kind, wire.version, "frobenius_algebra")?;
    if wire.basis.len() != wire.dim {
        return Err(malformed(format!(
            "dim is {} but {} basis labels are given",
            wire.dim,
            wire.basis.len()
        )));
    }
    FrobeniusAlgebra::new(
        wire.basis,
        ratios_in(&wire.structure_constants)?,
        ratios_in(&wire.trace)?,
    )
}

/// Serialize a cochain as its dense coefficient tensor.
pub fn cochain_to_json(c: &Cochain) -> String {
    to_text(&CochainWire {
        version: VERSION,
        kind: "cochain".into(),
        arity: c.arity(),
        dim: c.dim(),
        coeffs: ratios_out(c.coeffs()),
    })
}

/// Parse a cochain; the coefficient tensor must have length `dim^arity * dim`.
pub fn cochain_from_json(text: &str) -> Result<Cochain> {
    let wire: CochainWire = from_text(text)?;
    check_header(&wire.kind, wire.version, "cochain")?;
    Cochain::new(wire.arity, wire.dim, ratios_in(&wire.coeffs)?)
}

// ----------------------------------------------------------------------
// DOT export of the dual graph
// ----------------------------------------------------------------------

/// Render the dual graph: one vertex per complementary region labeled with
/// its genus and boundary-cycle count, one edge per arc joining the regions
/// on its two sides, with the side orbits as edge attributes.
pub fn export_dot(g: &ArcGraph) -> String {
    let mut out = String::from("graph dual {\n");
    let genera = g.region_genus();
    if g.is_zero_ary() {
        out.push_str(&format!(
            "  r0 [label=\"({}, 1)\"];\n}}\n",
            genera.first().copied().unwrap_or(0)
        ));
        return out;
    }
    let trace = g.face_trace();
    let region_of_orbit = g.region_of_orbit();
    let mut cycles = vec![0usize; g.n_regions()];
    for &r in region_of_orbit {
        cycles[r] += 1;
    }
    for (r, &genus) in genera.iter().enumerate() {
        out.push_str(&format!("  r{r} [label=\"({genus}, {})\"];\n", cycles[r]));
    }
    for (k, &(h, p)) in g.arcs().iter().enumerate() {
        let oa = trace.orbit_of_tail[h];
        let ob = trace.orbit_of_tail[p];
        out.push_str(&format!(
            "  r{} -- r{} [label=\"a{k}\", sides=\"o{oa},o{ob}\"];\n",
            region_of_orbit[oa], region_of_orbit[ob]
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{cup, dl_class};
    use crate::rational::{q, qi};
    use crate::stabilize::st;

    #[test]
    fn graphs_round_trip_byte_for_byte() {
        let samples = vec![
            ArcGraph::from_window_word(&[1, 2]).unwrap(),
            ArcGraph::from_window_word(&[1, 2, 1, 3, 1]).unwrap(),
            cup(3).unwrap().graph().clone(),
            ArcGraph::zero_ary(2),
        ];
        for g in samples {
            let text = graph_to_json(&g);
            let back = graph_from_json(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(graph_to_json(&back), text, "canonical text is stable");
        }
    }

    #[test]
    fn weighted_and_gap_graphs_round_trip() {
        let tw = WeightedArcGraph::twist(&q(1, 3));
        let text = weighted_to_json(&tw);
        let back = weighted_from_json(&text).unwrap();
        assert_eq!(back.graph(), tw.graph());
        assert_eq!(back.weights(), tw.weights());
        assert_eq!(weighted_to_json(&back), text);

        let fat = GapGraph::fatten(&tw);
        let gtext = gap_to_json(&fat);
        let gback = gap_from_json(&gtext).unwrap();
        assert_eq!(gap_to_json(&gback), gtext);
        assert_eq!(gback.gaps(), fat.gaps());
    }

    #[test]
    fn cells_chains_and_algebras_round_trip() {
        let c = cup(2).unwrap();
        let text = cell_to_json(&c);
        assert_eq!(cell_from_json(&text).unwrap(), c);

        let chain = dl_class(3).unwrap();
        let ctext = chain_to_json(&chain);
        let cback = chain_from_json(&ctext).unwrap();
        assert_eq!(cback, chain);
        assert_eq!(chain_to_json(&cback), ctext);

        for a in [
            FrobeniusAlgebra::rationals(),
            FrobeniusAlgebra::split_pair(),
            FrobeniusAlgebra::dual_numbers(),
        ] {
            let atext = algebra_to_json(&a);
            let aback = algebra_from_json(&atext).unwrap();
            assert_eq!(aback, a);
            assert_eq!(algebra_to_json(&aback), atext);
        }
    }

    #[test]
    fn malformed_documents_are_rejected_with_reasons() {
        // Wrong kind.
        let g = ArcGraph::from_window_word(&[1, 2]).unwrap();
        let text = graph_to_json(&g);
        let err = cell_from_json(&text).unwrap_err();
        assert!(matches!(err, ArcError::Malformed { .. }));

        // Dangling pairing: an arc pointing at a slot that does not exist.
        let broken = r#"{
  "version": 1,
  "kind": "arc_graph",
  "window_sizes": [1, 1],
  "arcs": [[[0, 0], [1, 5]]],
  "region_of_orbit": [0],
  "region_genus": [0]
}"#;
        assert!(graph_from_json(broken).is_err());

        // Unparsable rational.
        let tw = WeightedArcGraph::twist(&q(1, 3));
        let wtext = weighted_to_json(&tw).replace("\"1/3\"", "\"one third\"");
        assert!(weighted_from_json(&wtext).is_err());
    }

    #[test]
    fn dual_graph_rendering_is_pinned() {
        // The twist: two rectangles, each arc flanked by both.
        let tw = WeightedArcGraph::twist(&q(1, 2));
        let dot = export_dot(tw.graph());
        assert_eq!(
            dot,
            "graph dual {\n  r0 [label=\"(0, 1)\"];\n  r1 [label=\"(0, 1)\"];\n  r0 -- r1 [label=\"a0\", sides=\"o0,o1\"];\n  r1 -- r0 [label=\"a1\", sides=\"o1,o0\"];\n}\n"
        );

        // A closed genus-2 surface: one vertex, no edges.
        assert_eq!(
            export_dot(&ArcGraph::zero_ary(2)),
            "graph dual {\n  r0 [label=\"(2, 1)\"];\n}\n"
        );

        // The stabilized two-dimensional alternating cell: all four arcs,
        // single genus-0 region with one cycle.
        let c2 = cup(2).unwrap();
        let w = WeightedArcGraph::new(c2.graph().clone(), vec![qi(1); 4]).unwrap();
        let stabilized = st(&w).unwrap();
        let dot = export_dot(stabilized.representative().graph());
        let vertex_lines = dot.lines().filter(|l| l.contains("label=\"(")).count();
        let edge_lines = dot.lines().filter(|l| l.contains("--")).count();
        assert_eq!(vertex_lines, 1);
        assert_eq!(edge_lines, 4);
        assert!(dot.contains("r0 [label=\"(0, 1)\"]"));
    }
}
