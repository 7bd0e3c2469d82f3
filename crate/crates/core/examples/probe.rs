//! Scratch probes for acceptance-test pins.

use arcop_core::graph::ArcGraph as G;
use arcop_core::*;
use num::rational::Ratio;
use std::time::Instant;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n.into(), d.into())
}
fn qi(n: i64) -> Q {
    q(n, 1)
}

fn main() {
    // --- C6: figure-gaps configuration ---
    // Outer: 3-arc anti-aligned cylinder, bands (a,b,c) = (6,9,4), no gaps.
    let ga = G::quasi_filling(
        vec![3, 3],
        &[((0, 0), (1, 2)), ((0, 1), (1, 1)), ((0, 2), (1, 0))],
    )
    .unwrap();
    let a = GapGraph::new(ga, vec![qi(6), qi(9), qi(4)], Q::zero(), vec![Q::zero(); 3]).unwrap();
    // Inner: 2-arc anti-aligned cylinder, bands (d,e) = (7,8),
    // gap* = u = 1, gap(d) = v = 2, gap(e) = w = 1.
    let gb = G::quasi_filling(vec![2, 2], &[((0, 0), (1, 1)), ((0, 1), (1, 0))]).unwrap();
    let b = GapGraph::new(gb, vec![qi(7), qi(8)], qi(1), vec![qi(2), qi(1)]).unwrap();
    let out = thick_compose(&a, 1, &b).unwrap();
    println!("C6 window_sizes = {:?}", out.graph().window_sizes());
    println!("C6 arcs    = {:?}", out.graph().arcs());
    println!("C6 weights = {:?}", out.weights());
    println!("C6 star    = {:?}", out.gap_star());
    println!("C6 gaps    = {:?}", out.gaps());

    // --- C12: arc bounds in genus-1 arity-1 ---
    let t0 = Instant::now();
    let mut opts = EnumerateOptions::new(1, 7);
    opts.quasi_filling = true;
    opts.max_defect = 0;
    opts.ambient_genus = Some(1);
    let all = enumerate_graphs(&opts).unwrap();
    let mut max_untwisted = 0usize;
    let mut max_cell_arcs = 0usize;
    let mut max_any = 0usize;
    let mut top_dim = 0usize;
    for g in &all {
        let arcs = g.arcs().len();
        max_any = max_any.max(arcs);
        if g.is_untwisted() {
            max_untwisted = max_untwisted.max(arcs);
        }
        if let Ok(c) = Cell::new(g.clone()) {
            max_cell_arcs = max_cell_arcs.max(arcs);
            top_dim = top_dim.max(c.dim());
        }
    }
    println!(
        "C12 total={} max_any={max_any} max_untwisted={max_untwisted} max_cell_arcs={max_cell_arcs} top_dim={top_dim} in {:?}",
        all.len(),
        t0.elapsed()
    );

    // --- C8 timing: two-input quasi-filling LGTree cells at 8 arcs ---
    let t0 = Instant::now();
    let mut opts = EnumerateOptions::new(2, 8);
    opts.min_arcs = 8;
    opts.quasi_filling = true;
    opts.max_defect = 0;
    opts.lgtree = true;
    let eight = enumerate_graphs(&opts).unwrap();
    let cells8: Vec<Cell> = eight
        .into_iter()
        .filter_map(|g| Cell::new(g).ok())
        .collect();
    println!("C8 dim-6 lgtree cells = {} in {:?}", cells8.len(), t0.elapsed());
    for c in &cells8 {
        println!("C8 seq {:?}", c.graph().seq().unwrap());
    }

    // --- C11 pool size: <=6 arcs, n<=3 ---
    let t0 = Instant::now();
    let mut count = 0usize;
    for n in 1..=3 {
        let mut opts = EnumerateOptions::new(n, 6);
        opts.quasi_filling = true;
        opts.max_defect = 0;
        opts.lgtree = true;
        for g in enumerate_graphs(&opts).unwrap() {
            if Cell::new(g).is_ok() {
                count += 1;
            }
        }
    }
    println!("C11 pool = {count} cells in {:?}", t0.elapsed());

    // --- C7 pool sizes: <=5 arcs, n<=3, defect<=2 ---
    let t0 = Instant::now();
    let mut qf = 0usize;
    let mut dec = 0usize;
    for n in 1..=3 {
        let mut opts = EnumerateOptions::new(n, 5);
        opts.quasi_filling = true;
        opts.max_defect = 0;
        for g in enumerate_graphs(&opts).unwrap() {
            if Cell::new(g).is_ok() {
                qf += 1;
            }
        }
        let mut opts = EnumerateOptions::new(n, 5);
        opts.max_defect = 2;
        for g in enumerate_graphs(&opts).unwrap() {
            if Cell::new(g).is_ok() {
                dec += 1;
            }
        }
    }
    println!("C7 pools: qf={qf} decorated={dec} in {:?}", t0.elapsed());

    // --- C2 twist wrap: sum >= 1 ---
    let left = compose(
        &WeightedArcGraph::twist(&q(2, 3)),
        1,
        &WeightedArcGraph::twist(&q(1, 2)),
    )
    .unwrap();
    let right = WeightedArcGraph::twist(&rational::mod_one(&(q(2, 3) + q(1, 2))));
    println!("C2 wrap equal: {}", left == right);
    let zero_sum = compose(
        &WeightedArcGraph::twist(&q(2, 3)),
        1,
        &WeightedArcGraph::twist(&q(1, 3)),
    )
    .unwrap();
    println!(
        "C2 zero wrap equals identity: {}",
        zero_sum == WeightedArcGraph::identity()
    );
}
