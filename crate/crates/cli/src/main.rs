//! Command-line surface over the arc-graph operad library.
//!
//! Every subcommand reads JSON documents (see the library's interchange
//! format), writes JSON to standard output, and is deterministic: identical
//! inputs produce byte-identical output. The only non-JSON output is DOT
//! text from `export-dot` (or `--dot` on the commands producing a graph).
//!
//! Exit codes: 0 on success, 1 on a domain error (invalid document, failed
//! invariant, out-of-range window, ...), 2 on a usage error.

use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use arcop_core::{
    act, act_cell, algebra_from_json, boundary, cell_from_json, chain_compose, chain_to_json,
    cochain_from_json, cochain_to_json, compose, dl_class, enumerate_graphs, export_dot,
    filtration_level, gap_from_json, gap_to_json, graph_from_json, graph_to_json, homology,
    ms_complexity, st, st_thick, thick_compose, weighted_from_json, weighted_to_json, ArcError,
    ArcGraph, Coefficients, Cochain, EnumerateOptions, FrobeniusAlgebra, GapGraph, Space,
};

#[derive(Parser)]
#[command(
    name = "arcop",
    version,
    about = "Weighted arc graphs on surfaces: gluing, stabilization, chains, and actions",
    after_help = "Environment:\n  ARC_OP_THREADS  upper bound on library worker threads (must be a positive\n                  integer when set; the current kernels are single-threaded,\n                  so the cap is validated but has no further effect)\n\nFile arguments accept `-` for standard input."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document of any known kind and run its validity checks.
    Validate {
        /// JSON document (arc graph, weighted/gap graph, cell, chain,
        /// Frobenius algebra, or cochain).
        file: PathBuf,
    },
    /// Glue element B into input window I of element A.
    Compose {
        /// Weighted arc graph (gap graph with --thick).
        a: PathBuf,
        /// Input window of A, counted from 1.
        window: usize,
        /// Weighted arc graph (gap graph with --thick); 0-ary caps the window.
        b: PathBuf,
        /// Glue thickened (gap) elements without retracting.
        #[arg(long)]
        thick: bool,
        /// Emit the dual graph of the result as DOT text instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Canonical quasi-filling representative of the stabilization class.
    Stabilize {
        /// Weighted arc graph or gap graph.
        file: PathBuf,
        /// Emit the dual graph of the result as DOT text instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Boundary of a basis cell in the cellular chain complex.
    Boundary {
        /// Cell document.
        cell: PathBuf,
        /// Take the boundary in the stabilized complex.
        #[arg(long)]
        stabilized: bool,
    },
    /// Chamber-by-chamber composition of two cells as a chain.
    ChainCompose {
        /// Cell document.
        a: PathBuf,
        /// Input window of A, counted from 1.
        window: usize,
        /// Cell document.
        b: PathBuf,
        /// Compose in the stabilized complex.
        #[arg(long)]
        stabilized: bool,
    },
    /// Homology of a truncated complex by exact Smith normal form.
    ///
    /// For the unbounded two-input complex the group in the truncation
    /// degree itself is suppressed (its outgoing rank is not determined by
    /// the truncation); finite filtration stages report every requested
    /// degree.
    Homology {
        /// `stlgtree2` or `filtration-N` (cells of filtration level <= N).
        #[arg(long, value_parser = parse_space)]
        space: Space,
        /// Build the complex through this dimension.
        #[arg(long)]
        max_dim: usize,
        /// `Z` (integral) or `Zp-sign` (mod-p sign-twisted coinvariants),
        /// e.g. `Z2-sign`.
        #[arg(long, default_value = "Z", value_parser = parse_coeffs)]
        coeffs: Coefficients,
    },
    /// Cycle representative of the degree-(p-1) power-class on p inputs.
    Dl {
        /// Number of inputs (a prime for the classical classes).
        #[arg(long)]
        p: usize,
    },
    /// The sequence of input windows visited along the output window.
    Seq {
        /// Any graph-carrying document (arc graph, weighted, gap, or cell).
        file: PathBuf,
    },
    /// Filtration level and sequence complexity of a cell.
    Filtration {
        /// Cell document.
        cell: PathBuf,
    },
    /// Act on cochains over a Frobenius algebra.
    Act {
        /// Algebra document, or a built-in name: `rationals`, `split-pair`,
        /// `dual-numbers`, `truncated-cubic`.
        #[arg(long)]
        algebra: String,
        /// Cell document, or a weighted arc graph (acting through its
        /// stabilization and the Euler-element correction).
        #[arg(long)]
        cell: PathBuf,
        /// Input cochain documents, one per input window of the cell;
        /// defaults to identity 1-cochains.
        #[arg(long, num_args = 1.., value_name = "FILE")]
        inputs: Vec<PathBuf>,
    },
    /// Exhaustively enumerate decorated tree-like graphs.
    Enumerate {
        /// Number of input windows.
        #[arg(long)]
        n: usize,
        /// Largest number of arcs.
        #[arg(long)]
        max_arcs: usize,
        /// Smallest number of arcs (default: one per input window).
        #[arg(long)]
        min_arcs: Option<usize>,
        /// Bound on the negated Euler defect of the decoration (default 2).
        #[arg(long)]
        max_defect: Option<usize>,
        /// Keep only graphs of this ambient genus.
        #[arg(long)]
        ambient_genus: Option<i64>,
        /// Keep only graphs untwisted at every window.
        #[arg(long)]
        untwisted: bool,
        /// Keep only linearly anti-compatible graphs.
        #[arg(long)]
        lgtree: bool,
        /// Keep only quasi-filling decorations.
        #[arg(long)]
        quasi_filling: bool,
        /// Abort if the raw search would visit more candidates than this.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Render the dual graph (regions as vertices, arcs as edges) as DOT.
    ExportDot {
        /// Any graph-carrying document (arc graph, weighted, gap, or cell).
        file: PathBuf,
    },
}

type DynError = Box<dyn std::error::Error>;

fn parse_space(s: &str) -> Result<Space, String> {
    if s == "stlgtree2" {
        return Ok(Space::StLgTree2);
    }
    if let Some(rest) = s.strip_prefix("filtration-") {
        let n: usize = rest
            .parse()
            .map_err(|_| format!("bad filtration level {rest:?}"))?;
        return Ok(Space::StLgTree2Filtration(n));
    }
    Err(format!("unknown space {s:?}; use `stlgtree2` or `filtration-N`"))
}

fn parse_coeffs(s: &str) -> Result<Coefficients, String> {
    if s == "Z" {
        return Ok(Coefficients::Integral);
    }
    if let Some(p) = s
        .strip_prefix('Z')
        .and_then(|r| r.strip_suffix("-sign"))
        .and_then(|p| p.parse::<usize>().ok())
    {
        return Ok(Coefficients::SignCoinvariantsMod(p));
    }
    Err(format!("unknown coefficients {s:?}; use `Z` or `Zp-sign`"))
}

fn space_name(space: Space) -> String {
    match space {
        Space::StLgTree2 => "stlgtree2".into(),
        Space::StLgTree2Filtration(n) => format!("filtration-{n}"),
    }
}

fn coeffs_name(coeffs: Coefficients) -> String {
    match coeffs {
        Coefficients::Integral => "Z".into(),
        Coefficients::SignCoinvariantsMod(p) => format!("Z{p}-sign"),
    }
}

fn read_input(path: &Path) -> Result<String, DynError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        return Ok(buf);
    }
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn malformed(reason: impl std::fmt::Display) -> ArcError {
    ArcError::Malformed {
        reason: reason.to_string(),
    }
}

/// The `kind` header of a JSON document, without validating the body.
fn kind_of(text: &str) -> Result<String, ArcError> {
    let v: Value = serde_json::from_str(text).map_err(malformed)?;
    v.get("kind")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| malformed("document has no `kind` field"))
}

/// The underlying combinatorial graph of any graph-carrying document.
fn load_graph_any(text: &str) -> Result<ArcGraph, ArcError> {
    match kind_of(text)?.as_str() {
        "arc_graph" => graph_from_json(text),
        "weighted_arc_graph" => Ok(weighted_from_json(text)?.graph().clone()),
        "gap_graph" => Ok(gap_from_json(text)?.graph().clone()),
        "cell" => Ok(cell_from_json(text)?.graph().clone()),
        other => Err(malformed(format!(
            "expected a graph-carrying document, got kind {other:?}"
        ))),
    }
}

/// A thick element: a gap graph document, or a weighted one thickened with
/// zero gaps.
fn load_gap(text: &str) -> Result<GapGraph, ArcError> {
    match kind_of(text)?.as_str() {
        "gap_graph" => gap_from_json(text),
        "weighted_arc_graph" => Ok(GapGraph::fatten(&weighted_from_json(text)?)),
        other => Err(malformed(format!(
            "expected a gap graph (or weighted arc graph), got kind {other:?}"
        ))),
    }
}

fn load_algebra(spec: &str) -> Result<FrobeniusAlgebra, DynError> {
    match spec {
        "rationals" => Ok(FrobeniusAlgebra::rationals()),
        "split-pair" => Ok(FrobeniusAlgebra::split_pair()),
        "dual-numbers" => Ok(FrobeniusAlgebra::dual_numbers()),
        "truncated-cubic" => Ok(FrobeniusAlgebra::truncated_cubic()),
        path => Ok(algebra_from_json(&read_input(Path::new(path))?)?),
    }
}

fn to_text(v: &Value) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("serializing JSON cannot fail");
    out.push('\n');
    out
}

/// Re-parse a canonical document so it can be embedded in a larger one.
fn embed(doc: &str) -> Value {
    serde_json::from_str(doc).expect("canonical serialization is valid JSON")
}

fn validate_report(text: &str) -> Result<Value, DynError> {
    let kind = kind_of(text)?;
    let summary = match kind.as_str() {
        "arc_graph" => {
            let g = graph_from_json(text)?;
            json!({
                "arity": g.arity(),
                "arcs": g.arcs().len(),
                "euler_defect": g.euler_defect(),
            })
        }
        "weighted_arc_graph" => {
            let w = weighted_from_json(text)?;
            json!({
                "arity": w.graph().arity(),
                "arcs": w.graph().arcs().len(),
                "euler_defect": w.graph().euler_defect(),
            })
        }
        "gap_graph" => {
            let g = gap_from_json(text)?;
            json!({
                "arity": g.graph().arity(),
                "arcs": g.graph().arcs().len(),
                "euler_defect": g.graph().euler_defect(),
            })
        }
        "cell" => {
            let c = cell_from_json(text)?;
            json!({ "arity": c.arity(), "dim": c.dim() })
        }
        "chain" => {
            let c = arcop_core::chain_from_json(text)?;
            json!({ "terms": c.len() })
        }
        "frobenius_algebra" => {
            let a = algebra_from_json(text)?;
            json!({ "dim": a.dim(), "descends": a.descends() })
        }
        "cochain" => {
            let c = cochain_from_json(text)?;
            json!({ "arity": c.arity(), "dim": c.dim() })
        }
        other => return Err(malformed(format!("unknown document kind {other:?}")).into()),
    };
    Ok(json!({ "version": 1, "kind": "validation", "document_kind": kind, "ok": true, "summary": summary }))
}

fn run(cli: Cli) -> Result<String, DynError> {
    match cli.command {
        Command::Validate { file } => {
            let text = read_input(&file)?;
            Ok(to_text(&validate_report(&text)?))
        }
        Command::Compose {
            a,
            window,
            b,
            thick,
            dot,
        } => {
            let (ta, tb) = (read_input(&a)?, read_input(&b)?);
            if thick {
                let out = thick_compose(&load_gap(&ta)?, window, &load_gap(&tb)?)?;
                if dot {
                    return Ok(export_dot(out.graph()));
                }
                return Ok(gap_to_json(&out));
            }
            let out = compose(&weighted_from_json(&ta)?, window, &weighted_from_json(&tb)?)?;
            if dot {
                return Ok(export_dot(out.graph()));
            }
            Ok(weighted_to_json(&out))
        }
        Command::Stabilize { file, dot } => {
            let text = read_input(&file)?;
            let class = match kind_of(&text)?.as_str() {
                "gap_graph" => st_thick(&gap_from_json(&text)?)?,
                _ => st(&weighted_from_json(&text)?)?,
            };
            let rep = class.into_representative();
            if dot {
                return Ok(export_dot(rep.graph()));
            }
            Ok(weighted_to_json(&rep))
        }
        Command::Boundary { cell, stabilized } => {
            let c = cell_from_json(&read_input(&cell)?)?;
            Ok(chain_to_json(&boundary(&c, stabilized)?))
        }
        Command::ChainCompose {
            a,
            window,
            b,
            stabilized,
        } => {
            let ca = cell_from_json(&read_input(&a)?)?;
            let cb = cell_from_json(&read_input(&b)?)?;
            Ok(chain_to_json(&chain_compose(&ca, window, &cb, stabilized)?))
        }
        Command::Homology {
            space,
            max_dim,
            coeffs,
        } => {
            let groups = homology(space, max_dim, coeffs)?;
            // Degrees whose outgoing boundary rank the truncation really
            // determines: everything below max_dim, plus max_dim itself
            // when the space is a finite filtration stage ending at or
            // below it.
            let keep = match space {
                Space::StLgTree2 => max_dim,
                Space::StLgTree2Filtration(n) => {
                    if max_dim + 1 >= n {
                        max_dim + 1
                    } else {
                        max_dim
                    }
                }
            };
            let names: Vec<String> = groups.iter().take(keep).map(|g| g.to_string()).collect();
            Ok(to_text(&json!({
                "version": 1,
                "kind": "homology",
                "space": space_name(space),
                "coefficients": coeffs_name(coeffs),
                "max_dim": max_dim,
                "groups": names,
            })))
        }
        Command::Dl { p } => Ok(chain_to_json(&dl_class(p)?)),
        Command::Seq { file } => {
            let g = load_graph_any(&read_input(&file)?)?;
            Ok(to_text(&json!({
                "version": 1,
                "kind": "sequence",
                "seq": g.seq()?,
            })))
        }
        Command::Filtration { cell } => {
            let c = cell_from_json(&read_input(&cell)?)?;
            let seq = c.graph().seq()?;
            Ok(to_text(&json!({
                "version": 1,
                "kind": "filtration",
                "filtration_level": filtration_level(&c)?,
                "ms_complexity": ms_complexity(&seq),
                "seq": seq,
            })))
        }
        Command::Act {
            algebra,
            cell,
            inputs,
        } => {
            let alg = load_algebra(&algebra)?;
            let text = read_input(&cell)?;
            let kind = kind_of(&text)?;
            let arity = match kind.as_str() {
                "cell" => cell_from_json(&text)?.arity(),
                "weighted_arc_graph" => weighted_from_json(&text)?.graph().arity(),
                other => {
                    return Err(malformed(format!(
                        "expected a cell or weighted arc graph, got kind {other:?}"
                    ))
                    .into())
                }
            };
            let ins: Vec<Cochain> = if inputs.is_empty() {
                vec![Cochain::identity(alg.dim()); arity]
            } else {
                inputs
                    .iter()
                    .map(|p| Ok(cochain_from_json(&read_input(p)?)?))
                    .collect::<Result<_, DynError>>()?
            };
            let out = match kind.as_str() {
                "cell" => act_cell(&alg, &cell_from_json(&text)?, &ins)?,
                _ => act(&alg, &weighted_from_json(&text)?, &ins)?,
            };
            Ok(cochain_to_json(&out))
        }
        Command::Enumerate {
            n,
            max_arcs,
            min_arcs,
            max_defect,
            ambient_genus,
            untwisted,
            lgtree,
            quasi_filling,
            limit,
        } => {
            let mut opts = EnumerateOptions::new(n, max_arcs);
            if let Some(m) = min_arcs {
                opts.min_arcs = m;
            }
            if let Some(d) = max_defect {
                opts.max_defect = d;
            }
            opts.ambient_genus = ambient_genus;
            opts.untwisted = untwisted;
            opts.lgtree = lgtree;
            opts.quasi_filling = quasi_filling;
            if let Some(l) = limit {
                opts.limit = l;
            }
            let graphs = enumerate_graphs(&opts)?;
            let docs: Vec<Value> = graphs.iter().map(|g| embed(&graph_to_json(g))).collect();
            Ok(to_text(&json!({
                "version": 1,
                "kind": "enumeration",
                "count": docs.len(),
                "graphs": docs,
            })))
        }
        Command::ExportDot { file } => {
            let g = load_graph_any(&read_input(&file)?)?;
            Ok(export_dot(&g))
        }
    }
}

/// Validate ARC_OP_THREADS. The library kernels are single-threaded, so a
/// valid cap has no further effect; an invalid one is a usage error.
fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var("ARC_OP_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .map(Some)
            .ok_or(format!("ARC_OP_THREADS must be a positive integer, got {v:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = thread_cap() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// `--help` output and default values are part of the CLI contract; the
/// behavioral tests live in `tests/cli.rs` against the built binary.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_and_coefficient_names_round_trip() {
        for s in ["stlgtree2", "filtration-1", "filtration-4"] {
            assert_eq!(space_name(parse_space(s).unwrap()), s);
        }
        for c in ["Z", "Z2-sign", "Z3-sign"] {
            assert_eq!(coeffs_name(parse_coeffs(c).unwrap()), c);
        }
        assert!(parse_space("disk").is_err());
        assert!(parse_space("filtration-x").is_err());
        assert!(parse_coeffs("Q").is_err());
        assert!(parse_coeffs("Z-sign").is_err());
    }
}
