//! Commutative Frobenius algebras with exact rational coefficients,
//! Hochschild cochains as dense tensors, the brace and cup-product
//! operations, and the action of tree-type cells. Unstable graphs act
//! through their stabilization corrected by a power of the Euler element;
//! the action descends to stabilized classes exactly when that element is
//! the unit.

use crate::cell::Cell;
use crate::error::{ArcError, Result};
use crate::rational::{qi, Q};
use crate::stabilize::st;
use crate::weighted::WeightedArcGraph;
use num::Zero;

// ----------------------------------------------------------------------
// Exact linear algebra helpers
// ----------------------------------------------------------------------

/// Reduced row echelon form in place; returns the pivot column of each row.
fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for cc in 0..cols {
                    let sub = f.clone() * m[r][cc].clone();
                    m[i][cc] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Unique solution of the (possibly overdetermined) system `a x = b`.
fn solve_unique(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = if a.is_empty() { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&n) || pivots.len() < n {
        return None; // inconsistent or underdetermined
    }
    let mut x = vec![Q::zero(); n];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[row][n].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, if it exists.
fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { qi(1) } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

// ----------------------------------------------------------------------
// Frobenius algebras
// ----------------------------------------------------------------------

/// A finite-dimensional commutative Frobenius algebra over the rationals:
/// structure constants, a trace functional with nondegenerate pairing
/// `<a, b> = tr(ab)`, and the induced Euler element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusAlgebra {
    dim: usize,
    basis: Vec<String>,
    /// `structure[(i*d + j)*d + k]` is the coefficient of basis `k` in
    /// the product of basis elements `i` and `j`.
    structure: Vec<Q>,
    trace: Vec<Q>,
    unit: Vec<Q>,
    /// Inverse pairing, row-major.
    inverse_pairing: Vec<Q>,
}

impl FrobeniusAlgebra {
    /// Validate the axioms (commutativity, associativity, existence of a
    /// unit, nondegenerate trace pairing) and build the algebra.
    pub fn new(basis: Vec<String>, structure: Vec<Q>, trace: Vec<Q>) -> Result<FrobeniusAlgebra> {
        let d = basis.len();
        let bad = |reason: String| ArcError::BadAlgebra { reason };
        if d == 0 {
            return Err(bad("the algebra must have positive dimension".into()));
        }
        if structure.len() != d * d * d || trace.len() != d {
            return Err(bad(format!(
                "dimension {d} needs {} structure constants and {d} traces, got {} and {}",
                d * d * d,
                structure.len(),
                trace.len()
            )));
        }
        let c = |i: usize, j: usize, k: usize| structure[(i * d + j) * d + k].clone();
        for i in 0..d {
            for j in 0..i {
                for k in 0..d {
                    if c(i, j, k) != c(j, i, k) {
                        return Err(bad(format!(
                            "product of basis elements {i} and {j} is not commutative"
                        )));
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let lhs: Q = (0..d).map(|m| c(i, j, m) * c(m, k, l)).sum();
                        let rhs: Q = (0..d).map(|m| c(j, k, m) * c(i, m, l)).sum();
                        if lhs != rhs {
                            return Err(bad(format!(
                                "associativity fails on basis elements ({i}, {j}, {k})"
                            )));
                        }
                    }
                }
            }
        }
        // Solve u . b_i = b_i for the unit coordinates.
        let mut rows = Vec::with_capacity(d * d);
        let mut rhs = Vec::with_capacity(d * d);
        for i in 0..d {
            for k in 0..d {
                rows.push((0..d).map(|j| c(j, i, k)).collect::<Vec<Q>>());
                rhs.push(if i == k { qi(1) } else { Q::zero() });
            }
        }
        let unit = solve_unique(&rows, &rhs)
            .ok_or_else(|| bad("the algebra has no unit element".into()))?;
        let pairing: Vec<Vec<Q>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| c(i, j, k) * trace[k].clone()).sum())
                    .collect()
            })
            .collect();
        let inverse = invert(&pairing)
            .ok_or_else(|| bad("the trace pairing is degenerate".into()))?;
        Ok(FrobeniusAlgebra {
            dim: d,
            basis,
            structure,
            trace,
            unit,
            inverse_pairing: inverse.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn structure_constants(&self) -> &[Q] {
        &self.structure
    }

    pub fn trace_vector(&self) -> &[Q] {
        &self.trace
    }

    pub fn unit(&self) -> &[Q] {
        &self.unit
    }

    fn c(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.structure[(i * self.dim + j) * self.dim + k]
    }

    /// Product of two elements in basis coordinates.
    pub fn multiply(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let d = self.dim;
        let mut out = vec![Q::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let f = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    *o += f.clone() * self.c(i, j, k).clone();
                }
            }
        }
        out
    }

    pub fn trace_of(&self, x: &[Q]) -> Q {
        x.iter().zip(&self.trace).map(|(a, t)| a.clone() * t.clone()).sum()
    }

    /// The Euler element: the inverse pairing contracted with the product,
    /// `sum_{i,j} g^{ij} b_i b_j`.
    pub fn euler_element(&self) -> Vec<Q> {
        let d = self.dim;
        let mut e = vec![Q::zero(); d];
        for i in 0..d {
            for j in 0..d {
                let g = &self.inverse_pairing[i * d + j];
                if g.is_zero() {
                    continue;
                }
                for (k, o) in e.iter_mut().enumerate() {
                    *o += g.clone() * self.c(i, j, k).clone();
                }
            }
        }
        e
    }

    /// The action on Hochschild cochains descends to stabilized classes
    /// exactly when the Euler element is the unit.
    pub fn descends(&self) -> bool {
        self.euler_element() == self.unit
    }

    fn power_of_euler(&self, k: usize) -> Vec<Q> {
        let e = self.euler_element();
        let mut out = self.unit.clone();
        for _ in 0..k {
            out = self.multiply(&out, &e);
        }
        out
    }

    /// Transport the whole structure through the invertible basis change
    /// `b'_i = sum_j p[i][j] b_j`.
    pub fn change_basis(&self, p: &[Vec<Q>]) -> Result<FrobeniusAlgebra> {
        let d = self.dim;
        let p_inv = invert(p).ok_or_else(|| ArcError::BadAlgebra {
            reason: "basis change matrix is singular".into(),
        })?;
        let mut structure = vec![Q::zero(); d * d * d];
        for i in 0..d {
            for j in 0..d {
                // Coordinates of b'_i b'_j in the old basis, then convert.
                let mut old = vec![Q::zero(); d];
                for a in 0..d {
                    for b in 0..d {
                        let f = p[i][a].clone() * p[j][b].clone();
                        if f.is_zero() {
                            continue;
                        }
                        for (m, o) in old.iter_mut().enumerate() {
                            *o += f.clone() * self.c(a, b, m).clone();
                        }
                    }
                }
                for k in 0..d {
                    structure[(i * d + j) * d + k] =
                        (0..d).map(|m| old[m].clone() * p_inv[m][k].clone()).sum();
                }
            }
        }
        let trace = (0..d)
            .map(|i| (0..d).map(|j| p[i][j].clone() * self.trace[j].clone()).sum())
            .collect();
        FrobeniusAlgebra::new(self.basis.clone(), structure, trace)
    }

    /// The one-dimensional algebra with trace one.
    pub fn rationals() -> FrobeniusAlgebra {
        FrobeniusAlgebra::new(vec!["1".into()], vec![qi(1)], vec![qi(1)])
            .expect("the one-dimensional algebra is Frobenius")
    }

    /// Two orthogonal idempotents, each of trace one (a unital metric).
    pub fn split_pair() -> FrobeniusAlgebra {
        let mut structure = vec![Q::zero(); 8];
        structure[0] = qi(1); // e1 * e1 = e1
        structure[7] = qi(1); // e2 * e2 = e2
        FrobeniusAlgebra::new(vec!["e1".into(), "e2".into()], structure, vec![qi(1), qi(1)])
            .expect("the split pair is Frobenius")
    }

    /// The dual numbers: a square-zero generator with trace one.
    pub fn dual_numbers() -> FrobeniusAlgebra {
        let mut structure = vec![Q::zero(); 8];
        structure[0] = qi(1); // 1 * 1 = 1
        structure[3] = qi(1); // 1 * x = x
        structure[5] = qi(1); // x * 1 = x
        FrobeniusAlgebra::new(vec!["1".into(), "x".into()], structure, vec![Q::zero(), qi(1)])
            .expect("the dual numbers are Frobenius")
    }

    /// The cube-zero truncated polynomial algebra with trace dual to the
    /// top power.
    pub fn truncated_cubic() -> FrobeniusAlgebra {
        let d = 3;
        let mut structure = vec![Q::zero(); d * d * d];
        for i in 0..d {
            for j in 0..d {
                if i + j < d {
                    structure[(i * d + j) * d + (i + j)] = qi(1);
                }
            }
        }
        FrobeniusAlgebra::new(
            vec!["1".into(), "x".into(), "x2".into()],
            structure,
            vec![Q::zero(), Q::zero(), qi(1)],
        )
        .expect("the truncated cubic algebra is Frobenius")
    }

    /// Orthogonal idempotents with prescribed nonzero traces.
    pub fn split_scaled(traces: &[Q]) -> Result<FrobeniusAlgebra> {
        let d = traces.len();
        let mut structure = vec![Q::zero(); d * d * d];
        for i in 0..d {
            structure[(i * d + i) * d + i] = qi(1);
        }
        let basis = (1..=d).map(|i| format!("e{i}")).collect();
        FrobeniusAlgebra::new(basis, structure, traces.to_vec())
    }
}

// ----------------------------------------------------------------------
// Hochschild cochains
// ----------------------------------------------------------------------

/// A multilinear map from `arity` copies of the algebra to itself, stored
/// as a dense tensor: `coeffs[flat(multi_index) * dim + k]` is the
/// coefficient of output basis element `k` on a basis multi-index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    arity: usize,
    dim: usize,
    coeffs: Vec<Q>,
}

fn tensor_len(dim: usize, arity: usize) -> usize {
    dim.pow(arity as u32) * dim
}

impl Cochain {
    pub fn new(arity: usize, dim: usize, coeffs: Vec<Q>) -> Result<Cochain> {
        if dim == 0 || coeffs.len() != tensor_len(dim, arity) {
            return Err(ArcError::Malformed {
                reason: format!(
                    "an arity-{arity} cochain over dimension {dim} needs {} coefficients, got {}",
                    tensor_len(dim.max(1), arity),
                    coeffs.len()
                ),
            });
        }
        Ok(Cochain { arity, dim, coeffs })
    }

    pub fn zero(arity: usize, dim: usize) -> Cochain {
        Cochain {
            arity,
            dim,
            coeffs: vec![Q::zero(); tensor_len(dim, arity)],
        }
    }

    /// The identity map as a 1-cochain.
    pub fn identity(dim: usize) -> Cochain {
        let mut c = Cochain::zero(1, dim);
        for i in 0..dim {
            c.coeffs[i * dim + i] = qi(1);
        }
        c
    }

    /// An algebra element as a 0-cochain.
    pub fn element(coords: &[Q]) -> Cochain {
        Cochain {
            arity: 0,
            dim: coords.len(),
            coeffs: coords.to_vec(),
        }
    }

    /// The multiplication of the algebra as a 2-cochain.
    pub fn multiplication(a: &FrobeniusAlgebra) -> Cochain {
        Cochain {
            arity: 2,
            dim: a.dim,
            coeffs: a.structure.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Q::is_zero)
    }

    /// Output coordinates on a basis multi-index.
    pub fn value(&self, idx: &[usize]) -> &[Q] {
        let flat = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
        &self.coeffs[flat * self.dim..(flat + 1) * self.dim]
    }

    pub fn add_scaled(&mut self, other: &Cochain, factor: &Q) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor.clone() * b.clone();
        }
    }

    /// Pointwise multiplication of every output by a fixed element.
    fn scale_by_element(&self, a: &FrobeniusAlgebra, e: &[Q]) -> Cochain {
        let mut out = Cochain::zero(self.arity, self.dim);
        for flat in 0..self.coeffs.len() / self.dim {
            let v = self.multiply_slice(a, flat, e);
            out.coeffs[flat * self.dim..(flat + 1) * self.dim].clone_from_slice(&v);
        }
        out
    }

    fn multiply_slice(&self, a: &FrobeniusAlgebra, flat: usize, e: &[Q]) -> Vec<Q> {
        a.multiply(&self.coeffs[flat * self.dim..(flat + 1) * self.dim], e)
    }
}

/// Iterate over all basis multi-indices of the given length.
fn for_each_index(dim: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut pos = len;
        while pos > 0 {
            idx[pos - 1] += 1;
            if idx[pos - 1] < dim {
                break;
            }
            idx[pos - 1] = 0;
            pos -= 1;
        }
        if pos == 0 {
            return;
        }
    }
}

fn check_dim(a: &FrobeniusAlgebra, f: &Cochain) -> Result<()> {
    if f.dim != a.dim {
        return Err(ArcError::Malformed {
            reason: format!(
                "cochain over dimension {} fed to an algebra of dimension {}",
                f.dim, a.dim
            ),
        });
    }
    Ok(())
}

/// The Hochschild differential: alternating sum of the outer
/// multiplications and the inner contractions of adjacent arguments.
pub fn hochschild_differential(a: &FrobeniusAlgebra, f: &Cochain) -> Result<Cochain> {
    check_dim(a, f)?;
    let d = a.dim;
    let m = f.arity;
    let mut out = Cochain::zero(m + 1, d);
    for_each_index(d, m + 1, |idx| {
        let flat = idx.iter().fold(0, |acc, &i| acc * d + i);
        let target = &mut out.coeffs[flat * d..(flat + 1) * d];
        // a_1 . f(a_2, ..., a_{m+1})
        let unit_vec: Vec<Q> = (0..d)
            .map(|k| if k == idx[0] { qi(1) } else { Q::zero() })
            .collect();
        let head = a.multiply(&unit_vec, f.value(&idx[1..]));
        for (t, h) in target.iter_mut().zip(&head) {
            *t += h.clone();
        }
        // (-1)^k f(..., a_k a_{k+1}, ...)
        let mut inner = vec![0usize; m];
        for k in 1..=m {
            inner[..k - 1].copy_from_slice(&idx[..k - 1]);
            inner[k..].copy_from_slice(&idx[k + 1..]);
            let sign = if k % 2 == 0 { qi(1) } else { qi(-1) };
            for t in 0..d {
                let c = a.c(idx[k - 1], idx[k], t).clone();
                if c.is_zero() {
                    continue;
                }
                inner[k - 1] = t;
                let v = f.value(&inner);
                for (o, x) in target.iter_mut().zip(v) {
                    *o += sign.clone() * c.clone() * x.clone();
                }
            }
        }
        // (-1)^{m+1} f(a_1, ..., a_m) . a_{m+1}
        let last_vec: Vec<Q> = (0..d)
            .map(|k| if k == idx[m] { qi(1) } else { Q::zero() })
            .collect();
        let tail = a.multiply(f.value(&idx[..m]), &last_vec);
        let sign = if (m + 1) % 2 == 0 { qi(1) } else { qi(-1) };
        for (t, h) in target.iter_mut().zip(&tail) {
            *t += sign.clone() * h.clone();
        }
    });
    Ok(out)
}

/// Partial composition: feed the output of `g` into slot `p` (1-based) of
/// `f`, without any sign.
fn compose_at(a: &FrobeniusAlgebra, f: &Cochain, p: usize, g: &Cochain) -> Cochain {
    let d = a.dim;
    let (r, s) = (f.arity, g.arity);
    let mut out = Cochain::zero(r + s - 1, d);
    for_each_index(d, r + s - 1, |idx| {
        let flat = idx.iter().fold(0, |acc, &i| acc * d + i);
        let gval = g.value(&idx[p - 1..p - 1 + s]);
        let mut fidx = vec![0usize; r];
        fidx[..p - 1].copy_from_slice(&idx[..p - 1]);
        fidx[p..].copy_from_slice(&idx[p - 1 + s..]);
        let target = &mut out.coeffs[flat * d..(flat + 1) * d];
        for (t, gt) in gval.iter().enumerate() {
            if gt.is_zero() {
                continue;
            }
            fidx[p - 1] = t;
            for (o, x) in target.iter_mut().zip(f.value(&fidx)) {
                *o += gt.clone() * x.clone();
            }
        }
    });
    out
}

/// The brace operation with several arguments: sum over all order-preserving
/// insertions of the `g`s into distinct slots of `f`, with the sign counting
/// the inputs standing before each insertion, weighted by its degree.
pub fn multi_brace(a: &FrobeniusAlgebra, f: &Cochain, gs: &[Cochain]) -> Result<Cochain> {
    check_dim(a, f)?;
    for g in gs {
        check_dim(a, g)?;
        if g.arity == 0 {
            return Err(ArcError::Malformed {
                reason: "brace arguments must have arity at least one".into(),
            });
        }
    }
    if f.arity == 0 {
        return Err(ArcError::Malformed {
            reason: "the braced cochain must have arity at least one".into(),
        });
    }
    let k = gs.len();
    let arity = f.arity + gs.iter().map(|g| g.arity).sum::<usize>() - k;
    let mut out = Cochain::zero(arity, a.dim);
    if k == 0 {
        return Ok(f.clone());
    }
    // Iterate over strictly increasing slot choices 1 <= i_1 < ... <= r.
    let mut slots: Vec<usize> = (1..=k).collect();
    if k > f.arity {
        return Ok(out);
    }
    loop {
        let mut exponent = 0usize;
        let mut shift = 0usize; // inputs contributed by earlier insertions
        for (m, &im) in slots.iter().enumerate() {
            exponent += (gs[m].arity - 1) * (im - 1 + shift);
            shift += gs[m].arity - 1;
        }
        let mut term = f.clone();
        for m in (0..k).rev() {
            term = compose_at(a, &term, slots[m], &gs[m]);
        }
        let sign = if exponent % 2 == 0 { qi(1) } else { qi(-1) };
        out.add_scaled(&term, &sign);
        // Next increasing sequence bounded by f.arity.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            slots[pos] += 1;
            if slots[pos] <= f.arity - (k - 1 - pos) {
                for j in pos + 1..k {
                    slots[j] = slots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The binary brace `f{g}`.
pub fn brace(a: &FrobeniusAlgebra, f: &Cochain, g: &Cochain) -> Result<Cochain> {
    multi_brace(a, f, std::slice::from_ref(g))
}

/// The cup product: evaluate `f` on the first block and `g` on the second,
/// and multiply the results.
pub fn product(a: &FrobeniusAlgebra, f: &Cochain, g: &Cochain) -> Result<Cochain> {
    check_dim(a, f)?;
    check_dim(a, g)?;
    let d = a.dim;
    let (r, s) = (f.arity, g.arity);
    let mut out = Cochain::zero(r + s, d);
    for_each_index(d, r + s, |idx| {
        let flat = idx.iter().fold(0, |acc, &i| acc * d + i);
        let v = a.multiply(f.value(&idx[..r]), g.value(&idx[r..]));
        out.coeffs[flat * d..(flat + 1) * d].clone_from_slice(&v);
    });
    Ok(out)
}

// ----------------------------------------------------------------------
// The action of tree-type cells
// ----------------------------------------------------------------------

fn letters_of(seq: &[usize]) -> std::collections::BTreeSet<usize> {
    seq.iter().copied().collect()
}

/// Evaluate the brace/product expression encoded by the window word of a
/// stabilized tree-type cell.
fn act_tree(a: &FrobeniusAlgebra, seq: &[usize], inputs: &[Cochain]) -> Result<Cochain> {
    if seq.is_empty() {
        return Err(ArcError::UnsupportedCell {
            reason: "empty window word".into(),
        });
    }
    if seq.len() == 1 {
        return Ok(inputs[seq[0] - 1].clone());
    }
    // A prefix whose letters never reappear splits off as a cup factor.
    for p in 1..seq.len() {
        let left = letters_of(&seq[..p]);
        if seq[p..].iter().all(|l| !left.contains(l)) {
            let lhs = act_tree(a, &seq[..p], inputs)?;
            let rhs = act_tree(a, &seq[p..], inputs)?;
            return product(a, &lhs, &rhs);
        }
    }
    // Otherwise the word must open and close with the same letter, whose
    // return visits separate the nested arguments of a brace.
    let x = seq[0];
    if *seq.last().unwrap() != x {
        return Err(ArcError::UnsupportedCell {
            reason: format!("window word {seq:?} is not of brace or product shape"),
        });
    }
    let mut gaps: Vec<&[usize]> = Vec::new();
    let mut start = 1;
    for (pos, &l) in seq.iter().enumerate().skip(1) {
        if l == x {
            gaps.push(&seq[start..pos]);
            start = pos + 1;
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for gap in &gaps {
        if gap.is_empty() {
            return Err(ArcError::UnsupportedCell {
                reason: format!("window word {seq:?} revisits a window immediately"),
            });
        }
        for l in letters_of(gap) {
            if !seen.insert(l) {
                return Err(ArcError::UnsupportedCell {
                    reason: format!("window word {seq:?} interleaves two windows"),
                });
            }
        }
    }
    let gs = gaps
        .iter()
        .map(|gap| act_tree(a, gap, inputs))
        .collect::<Result<Vec<Cochain>>>()?;
    multi_brace(a, &inputs[x - 1], &gs)
}

fn act_stabilized(
    a: &FrobeniusAlgebra,
    alpha: &WeightedArcGraph,
    defect: i64,
    inputs: &[Cochain],
) -> Result<Cochain> {
    let arity = alpha.graph().arity();
    if inputs.len() != arity {
        return Err(ArcError::ArityMismatch {
            expected: arity,
            got: inputs.len(),
        });
    }
    for f in inputs {
        check_dim(a, f)?;
    }
    if arity == 0 {
        return Err(ArcError::UnsupportedCell {
            reason: "closed elements do not act on cochains".into(),
        });
    }
    let stable = st(alpha)?;
    let seq = stable.representative().graph().seq()?;
    let tree = act_tree(a, &seq, inputs)?;
    if defect == 0 {
        return Ok(tree);
    }
    let correction = a.power_of_euler((-defect) as usize);
    Ok(tree.scale_by_element(a, &correction))
}

/// Act by a weighted graph: stabilize, evaluate the tree expression, and
/// correct by the Euler element to the power of the negated defect.
pub fn act(a: &FrobeniusAlgebra, alpha: &WeightedArcGraph, inputs: &[Cochain]) -> Result<Cochain> {
    act_stabilized(a, alpha, alpha.graph().euler_defect(), inputs)
}

/// Act by a cell of the tree complex (any interior weights give the same
/// stabilized class).
pub fn act_cell(a: &FrobeniusAlgebra, c: &Cell, inputs: &[Cochain]) -> Result<Cochain> {
    let graph = c.graph().clone();
    let n = graph.n_arcs();
    let w = WeightedArcGraph::new(graph, vec![qi(1); n])?;
    act_stabilized(a, &w, c.graph().euler_defect(), inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{cup, tau_cup};
    use crate::graph::ArcGraph;
    use crate::rational::q;
    use crate::stabilize::{st_g, st_h};

    /// Deterministic linear congruential generator for reproducible samples.
    struct Lcg(u64);

    impl Lcg {
        fn next(&mut self) -> u64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            self.0 >> 33
        }

        fn rational(&mut self) -> Q {
            q((self.next() % 9) as i64 - 4, (self.next() % 3) as i64 + 1)
        }

        fn cochain(&mut self, arity: usize, dim: usize) -> Cochain {
            let len = dim.pow(arity as u32) * dim;
            Cochain::new(arity, dim, (0..len).map(|_| self.rational()).collect()).unwrap()
        }

        fn basis_change(&mut self, dim: usize) -> Vec<Vec<Q>> {
            // Identity plus a strictly upper-triangular perturbation is
            // always invertible.
            (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            if i == j {
                                qi(1)
                            } else if j > i {
                                qi((self.next() % 3) as i64 - 1)
                            } else {
                                Q::zero()
                            }
                        })
                        .collect()
                })
                .collect()
        }
    }

    fn sample_algebras(rng: &mut Lcg) -> Vec<FrobeniusAlgebra> {
        let bases: Vec<FrobeniusAlgebra> = vec![
            FrobeniusAlgebra::split_pair(),
            FrobeniusAlgebra::dual_numbers(),
            FrobeniusAlgebra::truncated_cubic(),
            FrobeniusAlgebra::split_scaled(&[qi(1), qi(2), q(1, 3)]).unwrap(),
        ];
        let mut out = vec![FrobeniusAlgebra::rationals()];
        for a in bases {
            let p = rng.basis_change(a.dim());
            out.push(a.change_basis(&p).unwrap());
            out.push(a);
        }
        out
    }

    #[test]
    fn named_algebras_have_pinned_euler_elements() {
        let q1 = FrobeniusAlgebra::rationals();
        assert_eq!(q1.euler_element(), vec![qi(1)]);
        assert!(q1.descends());

        let s = FrobeniusAlgebra::split_pair();
        assert_eq!(s.euler_element(), s.unit().to_vec());
        assert_eq!(s.euler_element(), vec![qi(1), qi(1)]);
        assert!(s.descends());

        let dual = FrobeniusAlgebra::dual_numbers();
        assert_eq!(dual.euler_element(), vec![Q::zero(), qi(2)]);
        assert_eq!(dual.unit(), &[qi(1), Q::zero()]);
        assert!(!dual.descends());

        let cubic = FrobeniusAlgebra::truncated_cubic();
        assert_eq!(cubic.euler_element(), vec![Q::zero(), Q::zero(), qi(3)]);
        assert!(!cubic.descends());

        // The scaled split algebra descends only at unit scale.
        let scaled = FrobeniusAlgebra::split_scaled(&[qi(1), qi(2)]).unwrap();
        assert_eq!(scaled.euler_element(), vec![qi(1), q(1, 2)]);
        assert!(!scaled.descends());
    }

    #[test]
    fn invalid_algebras_are_rejected() {
        // Degenerate trace on the dual numbers.
        let mut structure = vec![Q::zero(); 8];
        structure[0] = qi(1);
        structure[3] = qi(1);
        structure[5] = qi(1);
        let degenerate = FrobeniusAlgebra::new(
            vec!["1".into(), "x".into()],
            structure.clone(),
            vec![qi(1), Q::zero()],
        );
        assert!(matches!(degenerate, Err(ArcError::BadAlgebra { .. })));

        // Non-commutative structure constants.
        let mut nc = vec![Q::zero(); 8];
        nc[0] = qi(1);
        nc[3] = qi(1);
        let non_comm =
            FrobeniusAlgebra::new(vec!["1".into(), "x".into()], nc, vec![Q::zero(), qi(1)]);
        assert!(matches!(non_comm, Err(ArcError::BadAlgebra { .. })));

        // Square-one generator without a unit row: x*x = x but 1 missing.
        let mut no_unit = vec![Q::zero(); 1];
        no_unit[0] = Q::zero();
        let zero_algebra = FrobeniusAlgebra::new(vec!["x".into()], no_unit, vec![qi(1)]);
        assert!(matches!(zero_algebra, Err(ArcError::BadAlgebra { .. })));
    }

    #[test]
    fn differential_squares_to_zero() {
        let mut rng = Lcg(7);
        for a in sample_algebras(&mut rng) {
            for arity in 0..=2usize {
                let f = rng.cochain(arity, a.dim());
                let df = hochschild_differential(&a, &f).unwrap();
                let ddf = hochschild_differential(&a, &df).unwrap();
                assert!(ddf.is_zero(), "d^2 != 0 on dimension {}", a.dim());
            }
            // The identity map bounds the multiplication, and 0-cochains
            // are cocycles by commutativity.
            let id = Cochain::identity(a.dim());
            assert_eq!(
                hochschild_differential(&a, &id).unwrap(),
                Cochain::multiplication(&a)
            );
            let elt = rng.cochain(0, a.dim());
            assert!(hochschild_differential(&a, &elt).unwrap().is_zero());
        }
    }

    #[test]
    fn brace_of_the_multiplication_with_itself_is_the_associator() {
        for a in [
            FrobeniusAlgebra::split_pair(),
            FrobeniusAlgebra::dual_numbers(),
            FrobeniusAlgebra::truncated_cubic(),
        ] {
            let mu = Cochain::multiplication(&a);
            let assoc = brace(&a, &mu, &mu).unwrap();
            assert_eq!(assoc.arity(), 3);
            assert!(assoc.is_zero(), "associative multiplication has zero associator");
        }
    }

    #[test]
    fn braces_and_products_have_the_expected_arities() {
        let a = FrobeniusAlgebra::dual_numbers();
        let mut rng = Lcg(11);
        let f = rng.cochain(2, 2);
        let g = rng.cochain(3, 2);
        assert_eq!(brace(&a, &f, &g).unwrap().arity(), 4);
        assert_eq!(product(&a, &f, &g).unwrap().arity(), 5);
        let zero_ary = rng.cochain(0, 2);
        assert!(brace(&a, &f, &zero_ary).is_err());
        assert!(brace(&a, &zero_ary, &f).is_err());
        // Bracing more arguments than slots gives the empty sum.
        let id = Cochain::identity(2);
        let overfull = multi_brace(&a, &id, &[f.clone(), g.clone()]).unwrap();
        assert!(overfull.is_zero());
    }

    fn parity(exp: usize) -> Q {
        if exp % 2 == 0 {
            qi(1)
        } else {
            qi(-1)
        }
    }

    /// The realized convention: the brace measures the failure of the cup
    /// product to commute,
    /// `d(f{g}) - f{dg} + (-1)^s (df){g} = (-1)^{(r-1)s+1} (f.g - (-1)^{rs} g.f)`
    /// for f of arity r and g of arity s. The signs are pinned by this test.
    #[test]
    fn gerstenhaber_chain_identity_on_random_cochains() {
        let mut rng = Lcg(23);
        for a in sample_algebras(&mut rng) {
            for (r, s) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (1, 3), (3, 2), (2, 3)] {
                let f = rng.cochain(r, a.dim());
                let g = rng.cochain(s, a.dim());
                let mut lhs = hochschild_differential(&a, &brace(&a, &f, &g).unwrap()).unwrap();
                lhs.add_scaled(
                    &brace(&a, &f, &hochschild_differential(&a, &g).unwrap()).unwrap(),
                    &qi(-1),
                );
                lhs.add_scaled(
                    &brace(&a, &hochschild_differential(&a, &f).unwrap(), &g).unwrap(),
                    &parity(s),
                );
                let mut rhs = product(&a, &f, &g).unwrap();
                rhs.add_scaled(&product(&a, &g, &f).unwrap(), &parity(r * s + 1));
                let mut diff = lhs;
                diff.add_scaled(&rhs, &parity((r - 1) * s));
                assert!(
                    diff.is_zero(),
                    "obstruction identity fails at arities ({r}, {s}) over dimension {}",
                    a.dim()
                );
            }
        }
    }

    fn weighted_corolla(n: usize) -> WeightedArcGraph {
        let word: Vec<usize> = (1..=n).collect();
        let g = ArcGraph::from_window_word(&word).unwrap();
        WeightedArcGraph::new(g, vec![qi(1); n]).unwrap()
    }

    #[test]
    fn tree_actions_of_named_cells() {
        let a = FrobeniusAlgebra::dual_numbers();
        let id = Cochain::identity(2);
        let mut rng = Lcg(5);
        let f = rng.cochain(2, 2);
        let g = rng.cochain(1, 2);

        // The two-input corolla acts as the multiplication.
        let corolla = Cell::new(ArcGraph::from_window_word(&[1, 2]).unwrap()).unwrap();
        let mu = act_cell(&a, &corolla, &[id.clone(), id.clone()]).unwrap();
        assert_eq!(mu, Cochain::multiplication(&a));

        // A three-input corolla with permuted labels multiplies in label
        // order read along the output window.
        let corolla3 = Cell::new(ArcGraph::from_window_word(&[2, 1, 3]).unwrap()).unwrap();
        let h = rng.cochain(1, 2);
        let lhs = act_cell(&a, &corolla3, &[f.clone(), g.clone(), h.clone()]).unwrap();
        let rhs = product(&a, &product(&a, &g, &f).unwrap(), &h).unwrap();
        assert_eq!(lhs, rhs);

        // The one-dimensional alternating cell acts as the brace.
        let braced = act_cell(&a, &cup(1).unwrap(), &[f.clone(), g.clone()]).unwrap();
        assert_eq!(braced, brace(&a, &f, &g).unwrap());
        let flipped = act_cell(&a, &tau_cup(1).unwrap(), &[f.clone(), g.clone()]).unwrap();
        assert_eq!(flipped, brace(&a, &g, &f).unwrap());

        // The two-dimensional alternating cell is not a tree expression.
        let err = act_cell(&a, &cup(2).unwrap(), &[f.clone(), g.clone()]);
        assert!(matches!(err, Err(ArcError::UnsupportedCell { .. })));
    }

    #[test]
    fn unstable_graphs_act_through_euler_powers() {
        let base = weighted_corolla(2);
        let witness_g = st_g(&Q::zero(), &base).unwrap();
        assert_eq!(witness_g.graph().euler_defect(), -2);
        // A generic conjugating twist keeps the boundary surgery at its own
        // defect; degenerate twists merge one region more.
        let witness_h = st_h(&q(1, 3), &q(1, 2), &base).unwrap();
        assert_eq!(witness_h.graph().euler_defect(), -1);
        let witness_gh = st_g(&Q::zero(), &witness_h).unwrap();
        assert_eq!(witness_gh.graph().euler_defect(), -3);

        for a in [FrobeniusAlgebra::split_pair(), FrobeniusAlgebra::dual_numbers()] {
            let id = Cochain::identity(a.dim());
            let ids = vec![id.clone(), id.clone()];
            let stable = act(&a, &base, &ids).unwrap();
            assert_eq!(stable, Cochain::multiplication(&a));
            for (witness, power) in [(&witness_g, 2usize), (&witness_h, 1), (&witness_gh, 3)] {
                let acted = act(&a, witness, &ids).unwrap();
                let expected = stable.scale_by_element(&a, &a.power_of_euler(power));
                assert_eq!(acted, expected);
                if a.descends() {
                    assert_eq!(acted, stable, "descending algebras forget the defect");
                } else {
                    assert_ne!(acted, stable, "the Euler correction must show");
                }
            }
        }
    }

    #[test]
    fn action_is_equivariant_under_relabeling() {
        let a = FrobeniusAlgebra::dual_numbers();
        let mut rng = Lcg(31);
        let inputs: Vec<Cochain> = (0..3)
            .map(|_| {
                let arity = rng.next() as usize % 2 + 1;
                rng.cochain(arity, 2)
            })
            .collect();
        let cells = [
            Cell::new(ArcGraph::from_window_word(&[1, 2, 3]).unwrap()).unwrap(),
            Cell::new(ArcGraph::from_window_word(&[1, 2, 1, 3, 1]).unwrap()).unwrap(),
            Cell::new(ArcGraph::from_window_word(&[1, 2, 3, 2, 1]).unwrap()).unwrap(),
        ];
        // Relabeling the windows and permuting the input cochains the same
        // way leaves the evaluated operation unchanged; the orientation
        // sign returned by the relabeling belongs to chain coefficients,
        // not to the evaluation.
        for cell in &cells {
            for perm in crate::enumerate::permutations(3) {
                let sigma: Vec<usize> = perm.iter().map(|&x| x + 1).collect();
                let (relabeled, _sign) = cell.relabel(&sigma).unwrap();
                let permuted: Vec<Cochain> =
                    (1..=3).map(|l| inputs[sigma[l - 1] - 1].clone()).collect();
                let lhs = act_cell(&a, &relabeled, &inputs).unwrap();
                let rhs = act_cell(&a, cell, &permuted).unwrap();
                assert_eq!(lhs, rhs, "relabeling by {sigma:?}");
            }
        }
    }
}
