//! Weighted arc graphs on surfaces with boundary: operadic gluing,
//! stabilization, cellular chains with their little-disks filtration, and
//! Hochschild-style actions on Frobenius algebras.

pub mod cell;
pub mod enumerate;
pub mod error;
pub mod frobenius;
pub mod homology;
pub mod glue;
pub mod graph;
pub mod json;
pub mod kgraph;
pub mod rational;
pub mod stabilize;
pub mod weighted;

pub use cell::{
    boundary, boundary_chain, chain_compose, chain_compose_chains, coinvariant_reduce, cup,
    dl_class, tau_cup, Cell, Chain,
};
pub use enumerate::{enumerate_graphs, EnumerateOptions};
pub use error::{ArcError, Result};
pub use frobenius::{
    act, act_cell, brace, hochschild_differential, multi_brace, product, Cochain,
    FrobeniusAlgebra,
};
pub use glue::{cap, compose, thick_compose};
pub use homology::{homology, smith_normal_form, Coefficients, HomologyGroup, Space};
pub use json::{
    algebra_from_json, algebra_to_json, cell_from_json, cell_to_json, chain_from_json,
    chain_to_json, cochain_from_json, cochain_to_json, export_dot, gap_from_json, gap_to_json,
    graph_from_json, graph_to_json, weighted_from_json, weighted_to_json,
};
pub use kgraph::{
    filtration_level, k_compose, k_leq, ms_complexity, ordered_point, phi_star, KElement,
};
pub use stabilize::{
    boundary_generator, decompose_unstable, genus_generator, rotate_marked_point, st, st_g, st_h,
    st_thick, stable_equal, untwist_at_zero, untwist_canonical, StClass,
};
pub use graph::{ArcGraph, FaceTrace, SlotAddr, TraceStep, UnionFind};
pub use rational::Q;
pub use weighted::{GapGraph, WeightedArcGraph};
