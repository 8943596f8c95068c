//! Dense linear algebra over `F_q`.

use super::field::{Fe, Fq};
use crate::error::{Error, Result};

/// A dense row-major matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> FqMatrix {
        FqMatrix {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> FqMatrix {
        let mut m = FqMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Fe::ONE;
        }
        m
    }

    /// Builds a matrix from row vectors, all of length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<Fe>]) -> Result<FqMatrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(FqMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, r: &[Fe]) {
        assert_eq!(r.len(), self.cols);
        self.data.extend_from_slice(r);
        self.rows += 1;
    }

    /// In-place reduced row echelon form; returns pivot columns. Zero rows are dropped.
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
            let inv = f.inv(self[(r, c)]);
            for j in c..self.cols {
                self[(r, j)] = f.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self[(i, c)];
                if factor.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.mul(factor, self[(r, j)]);
                    self[(i, j)] = f.sub(self[(i, j)], v);
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

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the right kernel `{x : M x = 0}`, itself in reduced echelon form.
    pub fn kernel(&self, f: &Fq) -> Vec<Vec<Fe>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Fe::ZERO; self.cols];
            v[free] = Fe::ONE;
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(m[(row, free)]);
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return basis;
        }
        let mut b = FqMatrix::from_rows(self.cols, &basis).expect("consistent widths");
        b.rref(f);
        b.to_rows()
    }

    pub fn mul_vec(&self, v: &[Fe], f: &Fq) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for FqMatrix {
    type Output = Fe;
    fn index(&self, (i, j): (usize, usize)) -> &Fe {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FqMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fe {
        &mut self.data[i * self.cols + j]
    }
}

/// Solution basis of the homogeneous system whose equations are the rows of
/// `equations`, each a coefficient vector over `num_unknowns` unknowns.
///
/// The basis is returned in reduced echelon form and is deterministic given
/// the input order. With no equations the identity basis is returned.
pub fn solve_fq(num_unknowns: usize, equations: &[Vec<Fe>], f: &Fq) -> Result<Vec<Vec<Fe>>> {
    let m = FqMatrix::from_rows(num_unknowns, equations)?;
    Ok(m.kernel(f))
}

/// Solutions of `A x = b` as a particular solution plus a kernel basis, or
/// `None` when the system is inconsistent. Each equation is `(coeffs, rhs)`.
pub fn solve_affine(
    num_unknowns: usize,
    equations: &[(Vec<Fe>, Fe)],
    f: &Fq,
) -> Result<Option<(Vec<Fe>, Vec<Vec<Fe>>)>> {
    let rows: Vec<Vec<Fe>> = equations
        .iter()
        .map(|(c, b)| {
            let mut r = c.clone();
            r.push(*b);
            r
        })
        .collect();
    if let Some((i, _)) = equations
        .iter()
        .enumerate()
        .find(|(_, (c, _))| c.len() != num_unknowns)
    {
        return Err(Error::DimensionMismatch(format!(
            "equation {i} does not have {num_unknowns} coefficients"
        )));
    }
    let mut aug = FqMatrix::from_rows(num_unknowns + 1, &rows)?;
    let pivots = aug.rref(f);
    if pivots.last() == Some(&num_unknowns) {
        return Ok(None);
    }
    let mut x = vec![Fe::ZERO; num_unknowns];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = aug[(row, num_unknowns)];
    }
    let hom: Vec<Vec<Fe>> = equations.iter().map(|(c, _)| c.clone()).collect();
    let kernel = solve_fq(num_unknowns, &hom, f)?;
    Ok(Some((x, kernel)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_equation_over_f2() {
        let f = Fq::of_order(2).unwrap();
        let basis = solve_fq(2, &[vec![Fe(1), Fe(1)]], &f).unwrap();
        assert_eq!(basis, vec![vec![Fe(1), Fe(1)]]);
    }

    #[test]
    fn no_constraints_gives_identity() {
        let f = Fq::of_order(3).unwrap();
        let basis = solve_fq(3, &[], &f).unwrap();
        assert_eq!(
            basis,
            vec![
                vec![Fe(1), Fe(0), Fe(0)],
                vec![Fe(0), Fe(1), Fe(0)],
                vec![Fe(0), Fe(0), Fe(1)]
            ]
        );
    }

    #[test]
    fn full_rank_gives_empty_basis() {
        let f = Fq::of_order(5).unwrap();
        let eqs = vec![vec![Fe(1), Fe(2)], vec![Fe(3), Fe(4)]];
        assert!(solve_fq(2, &eqs, &f).unwrap().is_empty());
    }

    #[test]
    fn malformed_equation_rejected() {
        let f = Fq::of_order(2).unwrap();
        assert!(matches!(
            solve_fq(3, &[vec![Fe(1)]], &f),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn kernel_vectors_are_solutions() {
        let f = Fq::of_order(4).unwrap();
        let eqs = vec![
            vec![Fe(1), Fe(2), Fe(3), Fe(0)],
            vec![Fe(0), Fe(1), Fe(1), Fe(2)],
        ];
        let m = FqMatrix::from_rows(4, &eqs).unwrap();
        let basis = m.kernel(&f);
        assert_eq!(basis.len(), 2);
        for v in basis {
            assert!(m.mul_vec(&v, &f).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn affine_solution() {
        let f = Fq::of_order(3).unwrap();
        // x + y = 1, y = 2  ->  x = 2
        let eqs = vec![(vec![Fe(1), Fe(1)], Fe(1)), (vec![Fe(0), Fe(1)], Fe(2))];
        let (x, k) = solve_affine(2, &eqs, &f).unwrap().unwrap();
        assert_eq!(x, vec![Fe(2), Fe(2)]);
        assert!(k.is_empty());
        let bad = vec![(vec![Fe(1)], Fe(1)), (vec![Fe(1)], Fe(2))];
        assert!(solve_affine(1, &bad, &f).unwrap().is_none());
    }
}
