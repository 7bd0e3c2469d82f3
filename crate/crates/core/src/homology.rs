//! Homology of truncated cellular complexes via integer Smith normal form.
//!
//! The two-input stabilized complex has exactly two cells per dimension (the
//! alternating cell and its input swap), so its truncations and filtration
//! stages have small boundary matrices; the Smith normal form routine is
//! nevertheless general and exact over `BigInt`.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{Signed, Zero};

use crate::cell::{boundary, coinvariant_reduce, cup, tau_cup, Cell, Chain};
use crate::error::{ArcError, Result};

/// Which truncated complex to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// The stabilized two-input complex truncated at `max_dim`.
    StLgTree2,
    /// The cells of filtration level at most `n`: dimensions `0..n`.
    StLgTree2Filtration(usize),
}

/// Coefficient system for the homology computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// Integral homology of the complex itself.
    Integral,
    /// Homology over `Z/p` of the sign-twisted relabeling coinvariants.
    SignCoinvariantsMod(usize),
}

/// One homology group: a free rank plus finite cyclic torsion summands
/// (for field coefficients the "torsion" entries carry the field modulus).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn zero() -> Self {
        HomologyGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        HomologyGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut counts: BTreeMap<&BigInt, usize> = BTreeMap::new();
        for t in &self.torsion {
            *counts.entry(t).or_insert(0) += 1;
        }
        for (t, k) in counts {
            if k == 1 {
                parts.push(format!("Z/{t}"));
            } else {
                parts.push(format!("(Z/{t})^{k}"));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Nonzero diagonal entries of the Smith normal form of an integer matrix,
/// each dividing the next. The matrix is consumed.
pub fn smith_normal_form(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        // Pivot: smallest nonzero magnitude in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        // Clear row and column t; restart whenever a remainder shrinks the
        // pivot, so the loop terminates by strict decrease of its magnitude.
        loop {
            let mut dirty = false;
            for i in (t + 1)..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = &m[i][t] / &m[t][t];
                for j in t..cols {
                    let sub = &q * &m[t][j];
                    m[i][j] -= sub;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in (t + 1)..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = &m[t][j] / &m[t][t];
                for row in m.iter_mut().take(rows).skip(t) {
                    let sub = &q * &row[t];
                    row[j] -= sub;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: fold in any entry the pivot does not divide.
            let mut fixed = None;
            'scan: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !(&m[i][j] % &m[t][t]).is_zero() {
                        fixed = Some(i);
                        break 'scan;
                    }
                }
            }
            match fixed {
                Some(i) => {
                    for j in t..cols {
                        let add = m[i][j].clone();
                        m[t][j] += add;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

/// Rank of a matrix over `Z/p` (p prime), by Gaussian elimination.
fn rank_mod_p(mut m: Vec<Vec<i64>>, p: i64) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x = x.rem_euclid(p);
        }
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = mod_inverse(m[rank][col], p);
        for x in m[rank].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for i in 0..rows {
            if i != rank && m[i][col] != 0 {
                let factor = m[i][col];
                for j in 0..cols {
                    m[i][j] = (m[i][j] - factor * m[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: i64, p: i64) -> i64 {
    // Extended Euclid; p is a small prime and a is nonzero mod p.
    let (mut r0, mut r1) = (p, a.rem_euclid(p));
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p)
}

/// The cells of the two-input stabilized complex in one dimension.
fn stlgtree2_cells(dim: usize) -> Result<Vec<Cell>> {
    Ok(vec![cup(dim)?, tau_cup(dim)?])
}

/// Boundary matrix from dimension `d` to `d - 1`: rows are indexed by the
/// faces, columns by the cells.
fn boundary_matrix(
    cells: &[Cell],
    faces: &BTreeMap<Cell, usize>,
    reduce: Option<usize>,
) -> Result<Vec<Vec<BigInt>>> {
    let mut m = vec![vec![BigInt::zero(); cells.len()]; faces.len()];
    for (j, cell) in cells.iter().enumerate() {
        let mut b = boundary(cell, true)?;
        if let Some(p) = reduce {
            b = coinvariant_reduce(&b, p)?;
        }
        for (face, coeff) in b.iter() {
            let Some(&i) = faces.get(face) else {
                return Err(ArcError::Malformed {
                    reason: format!(
                        "boundary face with sequence {:?} is missing from the complex",
                        face.graph().seq()
                    ),
                });
            };
            m[i][j] = coeff.clone();
        }
    }
    Ok(m)
}

/// Orbit representative cells (as produced by `coinvariant_reduce`) for the
/// sign-twisted coinvariant complex in one dimension.
fn coinvariant_cells(dim: usize, p: usize) -> Result<Vec<Cell>> {
    let mut reps: BTreeMap<Cell, ()> = BTreeMap::new();
    for cell in stlgtree2_cells(dim)? {
        let reduced = coinvariant_reduce(&Chain::unit(cell), p)?;
        for (rep, _) in reduced.iter() {
            reps.insert(rep.clone(), ());
        }
    }
    Ok(reps.into_keys().collect())
}

/// Homology groups `H_0 .. H_max_dim` of the requested truncated complex.
pub fn homology(space: Space, max_dim: usize, coeffs: Coefficients) -> Result<Vec<HomologyGroup>> {
    let top = match space {
        Space::StLgTree2 => max_dim,
        Space::StLgTree2Filtration(n) => {
            if n == 0 {
                return Err(ArcError::Malformed {
                    reason: "filtration level must be at least 1".into(),
                });
            }
            max_dim.min(n - 1)
        }
    };
    match coeffs {
        Coefficients::Integral => {
            let mut cells_by_dim = Vec::new();
            for d in 0..=top {
                cells_by_dim.push(stlgtree2_cells(d)?);
            }
            let mut out = Vec::new();
            for k in 0..=max_dim {
                if k > top {
                    out.push(HomologyGroup::zero());
                    continue;
                }
                let n_k = cells_by_dim[k].len();
                let rank_in = if k == 0 {
                    0
                } else {
                    let faces: BTreeMap<Cell, usize> = cells_by_dim[k - 1]
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(i, c)| (c, i))
                        .collect();
                    smith_normal_form(boundary_matrix(&cells_by_dim[k], &faces, None)?).len()
                };
                let (rank_out, torsion) = if k == top {
                    (0, Vec::new())
                } else {
                    let faces: BTreeMap<Cell, usize> = cells_by_dim[k]
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(i, c)| (c, i))
                        .collect();
                    let diag =
                        smith_normal_form(boundary_matrix(&cells_by_dim[k + 1], &faces, None)?);
                    let torsion: Vec<BigInt> = diag
                        .iter()
                        .filter(|d| **d != BigInt::from(1))
                        .cloned()
                        .collect();
                    (diag.len(), torsion)
                };
                out.push(HomologyGroup {
                    free_rank: n_k - rank_in - rank_out,
                    torsion,
                });
            }
            Ok(out)
        }
        Coefficients::SignCoinvariantsMod(p) => {
            if p < 2 {
                return Err(ArcError::Malformed {
                    reason: "coefficient modulus must be at least 2".into(),
                });
            }
            let mut cells_by_dim = Vec::new();
            for d in 0..=top {
                cells_by_dim.push(coinvariant_cells(d, p)?);
            }
            let to_i64 = |m: Vec<Vec<BigInt>>| -> Vec<Vec<i64>> {
                m.into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|x| {
                                let r = x % BigInt::from(p as i64);
                                i64::try_from(r).expect("reduced coefficient fits in i64")
                            })
                            .collect()
                    })
                    .collect()
            };
            let mut out = Vec::new();
            for k in 0..=max_dim {
                if k > top {
                    out.push(HomologyGroup::zero());
                    continue;
                }
                let n_k = cells_by_dim[k].len();
                let rank_in = if k == 0 {
                    0
                } else {
                    let faces: BTreeMap<Cell, usize> = cells_by_dim[k - 1]
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(i, c)| (c, i))
                        .collect();
                    let m = boundary_matrix(&cells_by_dim[k], &faces, Some(p))?;
                    rank_mod_p(to_i64(m), p as i64)
                };
                let rank_out = if k == top {
                    0
                } else {
                    let faces: BTreeMap<Cell, usize> = cells_by_dim[k]
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(i, c)| (c, i))
                        .collect();
                    let m = boundary_matrix(&cells_by_dim[k + 1], &faces, Some(p))?;
                    rank_mod_p(to_i64(m), p as i64)
                };
                let rank = n_k - rank_in - rank_out;
                out.push(HomologyGroup {
                    free_rank: 0,
                    torsion: vec![BigInt::from(p as i64); rank],
                });
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_of_pinned_matrices() {
        // Diagonalizable 2x2 with determinant 6 and content 1.
        let m = vec![
            vec![BigInt::from(2), BigInt::from(4)],
            vec![BigInt::from(4), BigInt::from(5)],
        ];
        assert_eq!(
            smith_normal_form(m),
            vec![BigInt::from(1), BigInt::from(6)]
        );
        // Rank-deficient.
        let m = vec![
            vec![BigInt::from(2), BigInt::from(4)],
            vec![BigInt::from(1), BigInt::from(2)],
        ];
        assert_eq!(smith_normal_form(m), vec![BigInt::from(1)]);
        // Requires a divisibility fix-up: diag(2,3) -> (1,6).
        let m = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
        ];
        assert_eq!(
            smith_normal_form(m),
            vec![BigInt::from(1), BigInt::from(6)]
        );
        assert!(smith_normal_form(vec![vec![BigInt::zero(); 3]; 2]).is_empty());
    }

    #[test]
    fn truncated_two_input_complex_is_connected_and_acyclic_below_top() {
        let h = homology(Space::StLgTree2, 6, Coefficients::Integral).unwrap();
        assert_eq!(h[0], HomologyGroup::free(1));
        for (k, item) in h.iter().enumerate().take(6).skip(1) {
            assert!(item.is_zero(), "H_{k} = {item}");
        }
    }

    #[test]
    fn filtration_stages_are_spheres() {
        for n in 1..=5 {
            let h = homology(
                Space::StLgTree2Filtration(n),
                n.max(2) - 1,
                Coefficients::Integral,
            )
            .unwrap();
            for (k, item) in h.iter().enumerate() {
                // S^(n-1): two points when n = 1, otherwise Z in degrees
                // 0 and n - 1.
                let expect_free = usize::from(k == 0) + usize::from(k + 1 == n);
                assert_eq!(
                    item,
                    &HomologyGroup::free(expect_free),
                    "n={n} k={k}: {item}"
                );
            }
        }
    }

    #[test]
    fn sign_coinvariants_mod_two_give_one_class_per_degree() {
        let h = homology(Space::StLgTree2, 5, Coefficients::SignCoinvariantsMod(2)).unwrap();
        for (k, item) in h.iter().enumerate().take(5) {
            assert_eq!(
                item,
                &HomologyGroup {
                    free_rank: 0,
                    torsion: vec![BigInt::from(2)],
                },
                "H_{k} = {item}"
            );
        }
    }
}
