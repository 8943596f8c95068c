//! Dense matrices over `K = F_q(t)`. Matrices over `A` are the ones with polynomial entries.

use std::fmt;

use super::field::{Fe, Fq};
use super::poly::Poly;
use super::ratfunc::{RatK, Valuation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KMat {
    rows: usize,
    cols: usize,
    data: Vec<RatK>,
}

impl KMat {
    pub fn zeros(rows: usize, cols: usize) -> KMat {
        KMat {
            rows,
            cols,
            data: vec![RatK::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> KMat {
        let mut m = KMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = RatK::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut g: impl FnMut(usize, usize) -> RatK) -> KMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(g(i, j));
            }
        }
        KMat { rows, cols, data }
    }

    /// Diagonal matrix `diag(varpi^e_0, ...)`.
    pub fn varpi_diag(exps: &[i64]) -> KMat {
        let n = exps.len();
        KMat::from_fn(n, n, |i, j| {
            if i == j {
                RatK::varpi_pow(exps[i])
            } else {
                RatK::zero()
            }
        })
    }

    /// Matrix unit `E_ij` scaled by a polynomial.
    pub fn unit(n: usize, i: usize, j: usize, entry: RatK) -> KMat {
        let mut m = KMat::zeros(n, n);
        m[(i, j)] = entry;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[RatK] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<RatK> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[RatK] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn from_columns(rows: usize, cols: &[Vec<RatK>]) -> KMat {
        KMat::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatK::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// All entries lie in `A`.
    pub fn is_polynomial(&self) -> bool {
        self.data.iter().all(RatK::is_poly)
    }

    /// All entries lie in the valuation ring `R` at infinity.
    pub fn is_integral_at_inf(&self) -> bool {
        self.data.iter().all(RatK::is_integral_at_inf)
    }

    /// Smallest entry valuation.
    pub fn min_valuation(&self) -> Valuation {
        self.data
            .iter()
            .map(RatK::valuation)
            .min()
            .unwrap_or(Valuation::Infinity)
    }

    pub fn add(&self, o: &KMat, f: &Fq) -> KMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        KMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.add(b, f))
                .collect(),
        }
    }

    pub fn sub(&self, o: &KMat, f: &Fq) -> KMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        KMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.sub(b, f))
                .collect(),
        }
    }

    pub fn scale(&self, c: &RatK, f: &Fq) -> KMat {
        KMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c, f)).collect(),
        }
    }

    pub fn scale_fe(&self, c: Fe, f: &Fq) -> KMat {
        KMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.scale(c, f)).collect(),
        }
    }

    pub fn mul_varpi(&self, k: i64, f: &Fq) -> KMat {
        if k == 0 {
            return self.clone();
        }
        self.scale(&RatK::varpi_pow(k), f)
    }

    pub fn mul(&self, o: &KMat, f: &Fq) -> KMat {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = KMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].add(&a.mul(b, f), f);
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[RatK], f: &Fq) -> Vec<RatK> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(RatK::zero(), |acc, (a, b)| acc.add(&a.mul(b, f), f))
            })
            .collect()
    }

    pub fn transpose(&self) -> KMat {
        KMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn hstack(&self, o: &KMat) -> KMat {
        assert_eq!(self.rows, o.rows);
        KMat::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, o: &KMat) -> KMat {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        KMat {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    /// Submatrix of the given row range and column range.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> KMat {
        let c0 = cols.start;
        let r0 = rows.start;
        KMat::from_fn(rows.len(), cols.len(), |i, j| {
            self[(r0 + i, c0 + j)].clone()
        })
    }

    /// Block diagonal `diag(self, o)`.
    pub fn block_diag(&self, o: &KMat) -> KMat {
        KMat::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => o[(i - self.rows, j - self.cols)].clone(),
                _ => RatK::zero(),
            }
        })
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `col_dst -= c * col_src`.
    pub fn col_axpy(&mut self, dst: usize, c: &RatK, src: usize, f: &Fq) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self[(i, src)];
            if s.is_zero() {
                continue;
            }
            let v = self[(i, dst)].sub(&c.mul(s, f), f);
            self[(i, dst)] = v;
        }
    }

    /// `row_dst -= c * row_src`.
    pub fn row_axpy(&mut self, dst: usize, c: &RatK, src: usize, f: &Fq) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self[(src, j)];
            if s.is_zero() {
                continue;
            }
            let v = self[(dst, j)].sub(&c.mul(s, f), f);
            self[(dst, j)] = v;
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &RatK, f: &Fq) {
        for i in 0..self.rows {
            let v = self[(i, j)].mul(c, f);
            self[(i, j)] = v;
        }
    }

    /// In-place reduced row echelon form over `K`; returns pivot columns and drops zero rows.
    pub fn rref(&mut self, f: &Fq) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv(f);
            for j in c..self.cols {
                let v = self[(r, j)].mul(&inv, f);
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i != r {
                    let factor = self[(i, c)].clone();
                    self.row_axpy(i, &factor, r, f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.data.truncate(r * self.cols);
        self.rows = r;
        pivots
    }

    pub fn rank(&self, f: &Fq) -> usize {
        self.clone().rref(f).len()
    }

    /// Basis of the right kernel over `K`, as column vectors in echelon order.
    pub fn kernel(&self, f: &Fq) -> Vec<Vec<RatK>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![RatK::zero(); self.cols];
                v[free] = RatK::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = m[(row, free)].neg(f);
                }
                v
            })
            .collect()
    }

    pub fn det(&self, f: &Fq) -> RatK {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = RatK::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return RatK::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = det.neg(f);
            }
            let piv = m[(c, c)].clone();
            det = det.mul(&piv, f);
            let inv = piv.inv(f);
            for i in c + 1..n {
                let factor = m[(i, c)].mul(&inv, f);
                m.row_axpy(i, &factor, c, f);
            }
        }
        det
    }

    pub fn inverse(&self, f: &Fq) -> Result<KMat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut aug = self.hstack(&KMat::identity(n));
        let pivots = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::SingularMatrix);
        }
        Ok(aug.block(0..n, n..2 * n))
    }

    /// Entrywise conversion to polynomials; `None` if some entry is not in `A`.
    pub fn to_poly_entries(&self) -> Option<Vec<Poly>> {
        self.data.iter().map(|e| e.as_poly().cloned()).collect()
    }

    /// Largest entry degree of a polynomial matrix (`-1` for zero).
    pub fn max_degree(&self) -> i64 {
        self.data
            .iter()
            .map(|e| {
                debug_assert!(e.is_poly());
                e.num().deg_i64()
            })
            .max()
            .unwrap_or(-1)
    }

    /// `self^e` for a square matrix.
    pub fn pow(&self, e: u32, f: &Fq) -> KMat {
        let mut acc = KMat::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for KMat {
    type Output = RatK;
    fn index(&self, (i, j): (usize, usize)) -> &RatK {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for KMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut RatK {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for KMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let f = Fq::of_order(3).unwrap();
        let t = RatK::t();
        let m = KMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => t.clone(),
            (0, 1) => RatK::one(),
            (1, 0) => RatK::one().add(&t, &f),
            _ => RatK::varpi_pow(1),
        });
        let inv = m.inverse(&f).unwrap();
        assert!(m.mul(&inv, &f).is_identity());
        assert!(inv.mul(&m, &f).is_identity());
    }

    #[test]
    fn singular_detected() {
        let f = Fq::of_order(2).unwrap();
        let m = KMat::from_fn(2, 2, |_, _| RatK::t());
        assert_eq!(m.inverse(&f), Err(Error::SingularMatrix));
        assert!(m.det(&f).is_zero());
    }

    #[test]
    fn det_of_unipotent_is_one() {
        let f = Fq::of_order(2).unwrap();
        let mut m = KMat::identity(3);
        m[(0, 2)] = RatK::t();
        m[(1, 0)] = RatK::varpi_pow(-3);
        assert!(m.det(&f).is_one());
    }

    #[test]
    fn kernel_over_k() {
        let f = Fq::of_order(2).unwrap();
        // E_12 has kernel K e_1
        let m = KMat::unit(2, 0, 1, RatK::t());
        let k = m.kernel(&f);
        assert_eq!(k, vec![vec![RatK::one(), RatK::zero()]]);
    }
}
