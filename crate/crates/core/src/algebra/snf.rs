//! Smith normal form over `Z`.
//!
//! Boundary matrices of simplicial complexes are sparse and dominated by unit
//! entries, so elimination first pivots on units in checked `i64` arithmetic.
//! The residual block goes through a dense `BigInt` reduction that records its
//! unimodular transforms and re-multiplies them before returning.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::intmat::IntMatrix;
use crate::error::{Error, Result};

/// Smith form summary: the diagonal `d_1 | d_2 | ...` (length `min(rows, cols)`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snf {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
}

impl Snf {
    fn from_diagonal(diagonal: Vec<BigInt>) -> Snf {
        let rank = diagonal.iter().filter(|d| !d.is_zero()).count();
        let torsion = diagonal
            .iter()
            .filter(|d| **d > BigInt::one())
            .cloned()
            .collect();
        Snf {
            diagonal,
            rank,
            torsion,
        }
    }
}

/// Dense Smith form with transforms: `p * a * q = d`.
#[derive(Clone, Debug)]
pub struct DenseSnf {
    pub d: Vec<Vec<BigInt>>,
    pub p: Vec<Vec<BigInt>>,
    pub q: Vec<Vec<BigInt>>,
    pub diagonal: Vec<BigInt>,
}

/// Dimension below which the whole matrix goes straight to the dense path.
const DENSE_CUTOFF: usize = 24;

pub fn snf(m: &IntMatrix) -> Result<Snf> {
    let n = m.rows().min(m.cols());
    if n == 0 {
        return Ok(Snf::from_diagonal(Vec::new()));
    }
    if m.rows().max(m.cols()) <= DENSE_CUTOFF {
        return Ok(Snf::from_diagonal(
            dense_snf_verified(&to_big(&m.to_dense()))?.diagonal,
        ));
    }
    let (units, residual) = match unit_eliminate(m) {
        Ok(x) => x,
        Err(Error::Overflow(_)) => {
            return Ok(Snf::from_diagonal(
                dense_snf_verified(&to_big(&m.to_dense()))?.diagonal,
            ))
        }
        Err(e) => return Err(e),
    };
    let mut diagonal = vec![BigInt::one(); units];
    if !residual.is_empty() && !residual[0].is_empty() {
        let r = dense_snf_verified(&residual)?;
        diagonal.extend(r.diagonal.into_iter().filter(|d| !d.is_zero()));
    }
    diagonal.resize(n, BigInt::zero());
    Ok(Snf::from_diagonal(diagonal))
}

fn to_big(d: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    d.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Repeatedly pivots on `±1` entries, each pivot contributing an invariant
/// factor 1. Returns the pivot count and the remaining dense block.
fn unit_eliminate(m: &IntMatrix) -> Result<(usize, Vec<Vec<BigInt>>)> {
    let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); m.rows()];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols()];
    for (i, j, v) in m.triples() {
        rows[i].insert(j, v);
        cols[j].insert(i);
    }
    let mut row_alive = vec![true; m.rows()];
    let mut col_alive = vec![true; m.cols()];
    let mut units = 0;
    loop {
        let mut progress = false;
        for c in 0..m.cols() {
            if !col_alive[c] {
                continue;
            }
            // unit pivot in this column with the shortest row
            let pivot = cols[c]
                .iter()
                .copied()
                .filter(|&i| rows[i][&c].abs() == 1)
                .min_by_key(|&i| (rows[i].len(), i));
            let Some(pr) = pivot else { continue };
            let pv = rows[pr][&c];
            let prow: Vec<(usize, i64)> = rows[pr].iter().map(|(&j, &v)| (j, v)).collect();
            let others: Vec<usize> = cols[c].iter().copied().filter(|&i| i != pr).collect();
            for i in others {
                // row_i -= (a_ic / pv) * row_pr, exact since pv = ±1
                let factor = rows[i][&c] * pv;
                for &(j, v) in &prow {
                    let delta = factor.checked_mul(v).ok_or(Error::Overflow("snf"))?;
                    let cur = rows[i].get(&j).copied().unwrap_or(0);
                    let new = cur.checked_sub(delta).ok_or(Error::Overflow("snf"))?;
                    if new == 0 {
                        rows[i].remove(&j);
                        cols[j].remove(&i);
                    } else {
                        rows[i].insert(j, new);
                        cols[j].insert(i);
                    }
                }
            }
            // column ops clear the rest of the pivot row; drop row and column
            for &(j, _) in &prow {
                cols[j].remove(&pr);
            }
            rows[pr].clear();
            row_alive[pr] = false;
            col_alive[c] = false;
            units += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let live_rows: Vec<usize> = (0..m.rows())
        .filter(|&i| row_alive[i] && !rows[i].is_empty())
        .collect();
    let live_cols: Vec<usize> = (0..m.cols())
        .filter(|&j| col_alive[j] && !cols[j].is_empty())
        .collect();
    let mut col_pos = vec![usize::MAX; m.cols()];
    for (k, &j) in live_cols.iter().enumerate() {
        col_pos[j] = k;
    }
    let residual = live_rows
        .iter()
        .map(|&i| {
            let mut r = vec![BigInt::zero(); live_cols.len()];
            for (&j, &v) in &rows[i] {
                r[col_pos[j]] = BigInt::from(v);
            }
            r
        })
        .collect();
    Ok((units, residual))
}

/// Dense reduction with transforms, checked by re-multiplication.
pub fn dense_snf_verified(a: &[Vec<BigInt>]) -> Result<DenseSnf> {
    let out = dense_snf(a);
    if mat_mul(&mat_mul(&out.p, a), &out.q) != out.d {
        return Err(Error::Internal(
            "Smith form transforms do not reproduce the matrix".into(),
        ));
    }
    for w in out.diagonal.windows(2) {
        let ok = if w[0].is_zero() {
            w[1].is_zero()
        } else {
            (&w[1] % &w[0]).is_zero()
        };
        if !ok {
            return Err(Error::Internal(
                "Smith diagonal is not a divisibility chain".into(),
            ));
        }
    }
    Ok(out)
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(BigInt::zero(), |acc, (x, br)| acc + x * &br[j])
                })
                .collect()
        })
        .collect()
}

fn row_sub(m: &mut [Vec<BigInt>], dst: usize, c: &BigInt, src: usize) {
    let (d, s) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= c * y;
        }
    }
}

fn col_sub(m: &mut [Vec<BigInt>], dst: usize, c: &BigInt, src: usize) {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let v = c * &row[src];
            row[dst] -= v;
        }
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Plain dense Smith reduction, minimal-absolute-value pivoting.
pub fn dense_snf(a: &[Vec<BigInt>]) -> DenseSnf {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut d: Vec<Vec<BigInt>> = a.to_vec();
    let mut p = identity(rows);
    let mut q = identity(cols);
    let n = rows.min(cols);
    for t in 0..n {
        // smallest nonzero entry of the trailing block
        let Some((pi, pj)) = min_entry(&d, t, t) else {
            break;
        };
        d.swap(t, pi);
        p.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut q, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !d[i][t].is_zero() {
                    let c = d[i][t].div_floor(&d[t][t]);
                    row_sub(&mut d, i, &c, t);
                    row_sub(&mut p, i, &c, t);
                    clean &= d[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !d[t][j].is_zero() {
                    let c = d[t][j].div_floor(&d[t][t]);
                    col_sub(&mut d, j, &c, t);
                    col_sub(&mut q, j, &c, t);
                    clean &= d[t][j].is_zero();
                }
            }
            if !clean {
                // bring the smallest remainder in row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !d[i][t].is_zero() && d[i][t].abs() < d[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !d[t][j].is_zero() && d[t][j].abs() < d[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap(t, best.0);
                    p.swap(t, best.0);
                } else if best.1 != t {
                    swap_cols(&mut d, t, best.1);
                    swap_cols(&mut q, t, best.1);
                }
                continue;
            }
            // divisibility of the trailing block
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[i][j] % &d[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    let m1 = BigInt::from(-1);
                    row_sub(&mut d, t, &m1, i);
                    row_sub(&mut p, t, &m1, i);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in p[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    let diagonal = (0..n).map(|i| d[i][i].clone()).collect();
    DenseSnf { d, p, q, diagonal }
}

fn min_entry(d: &[Vec<BigInt>], r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in d.iter().enumerate().skip(r0) {
        for (j, x) in row.iter().enumerate().skip(c0) {
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < d[bi][bj].abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn diagonal_already_smith() {
        let s = snf(&IntMatrix::from_dense(&[vec![2, 0], vec![0, 4]])).unwrap();
        assert_eq!(s.diagonal, big(&[2, 4]));
        assert_eq!(s.torsion, big(&[2, 4]));
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn rank_one_all_ones() {
        let s = snf(&IntMatrix::from_dense(&[vec![1, 1], vec![1, 1]])).unwrap();
        assert_eq!(s.diagonal, big(&[1, 0]));
        assert_eq!(s.rank, 1);
        assert!(s.torsion.is_empty());
    }

    #[test]
    fn three_cycle_boundary() {
        // vertices x rows, edges (01, 12, 02) x cols
        let d = IntMatrix::from_dense(&[vec![-1, 0, -1], vec![1, -1, 0], vec![0, 1, 1]]);
        let s = snf(&d).unwrap();
        assert_eq!(s.rank, 2);
        assert!(s.torsion.is_empty());
    }

    #[test]
    fn non_divisible_diagonal_fixed() {
        let s = snf(&IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!(s.diagonal, big(&[1, 6]));
    }

    #[test]
    fn sparse_path_matches_dense() {
        // cycle graph on 40 vertices plus a doubled chord: large enough for the sparse path
        let n = 40;
        let mut t = Vec::new();
        for e in 0..n {
            t.push((e, e, -1));
            t.push(((e + 1) % n, e, 1));
        }
        t.push((0, n, 2));
        t.push((20, n, -2));
        let m = IntMatrix::from_triples(n, n + 1, t).unwrap();
        let s = snf(&m).unwrap();
        let dense = dense_snf_verified(&to_big(&m.to_dense())).unwrap();
        assert_eq!(s.diagonal, dense.diagonal);
        assert_eq!(s.rank, n - 1);
    }

    /// gcd of all k x k minors, by cofactor expansion.
    fn det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum()
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    fn determinantal_divisors(m: &[Vec<i64>]) -> Vec<i64> {
        let n = m.len();
        let mut out = Vec::new();
        for k in 1..=n {
            let mut g = 0i64;
            for rs in subsets(n, k) {
                for cs in subsets(n, k) {
                    let sub: Vec<Vec<i64>> = rs
                        .iter()
                        .map(|&i| cs.iter().map(|&j| m[i][j]).collect())
                        .collect();
                    g = g.gcd(&det(&sub));
                }
            }
            out.push(g);
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn agrees_with_minor_gcds(v in proptest::collection::vec(-3i64..=3, 36)) {
            let m: Vec<Vec<i64>> = v.chunks(6).map(<[i64]>::to_vec).collect();
            let s = snf(&IntMatrix::from_dense(&m)).unwrap();
            let dd = determinantal_divisors(&m);
            let mut prev = 1i64;
            for k in 0..6 {
                let expect = if dd[k] == 0 { 0 } else { dd[k] / prev };
                prop_assert_eq!(s.diagonal[k].clone(), BigInt::from(expect));
                if dd[k] != 0 { prev = dd[k]; }
            }
        }
    }
}
