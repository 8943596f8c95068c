//! Sparse integer matrices, the carrier for chain-complex boundary maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse matrix over `Z`, stored column-wise with rows sorted and no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        IntMatrix::from_triples(n, n, (0..n).map(|i| (i, i, 1))).expect("in range")
    }

    /// Builds from `(row, col, value)` triples; duplicates are summed, zeros dropped.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<IntMatrix> {
        let mut columns: Vec<Vec<(usize, i64)>> = vec![Vec::new(); cols];
        for (i, j, v) in triples {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            columns[j].push((i, v));
        }
        for col in &mut columns {
            col.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(col.len());
            for &(i, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == i => {
                        last.1 = last.1.checked_add(v).ok_or(Error::Overflow("IntMatrix"))?
                    }
                    _ => merged.push((i, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *col = merged;
        }
        Ok(IntMatrix {
            rows,
            cols,
            columns,
        })
    }

    pub fn from_dense(d: &[Vec<i64>]) -> IntMatrix {
        let rows = d.len();
        let cols = d.first().map_or(0, Vec::len);
        let triples = d
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)));
        IntMatrix::from_triples(rows, cols, triples).expect("dense input in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.columns[j]
            .binary_search_by_key(&i, |e| e.0)
            .map(|k| self.columns[j][k].1)
            .unwrap_or(0)
    }

    /// Triples in column-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (i, j, v) in self.triples() {
            d[i][j] = v;
        }
        d
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_triples(
            self.cols,
            self.rows,
            self.triples().map(|(i, j, v)| (j, i, v)),
        )
        .expect("in range")
    }

    /// Product `self * o`, failing on `i64` overflow.
    pub fn mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut triples = Vec::new();
        for (j, col) in o.columns.iter().enumerate() {
            let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
            for &(k, b) in col {
                for &(i, a) in &self.columns[k] {
                    let prod = a.checked_mul(b).ok_or(Error::Overflow("IntMatrix::mul"))?;
                    let e = acc.entry(i).or_insert(0);
                    *e = e
                        .checked_add(prod)
                        .ok_or(Error::Overflow("IntMatrix::mul"))?;
                }
            }
            triples.extend(acc.into_iter().map(|(i, v)| (i, j, v)));
        }
        IntMatrix::from_triples(self.rows, o.cols, triples)
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut row_pos = vec![usize::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            row_pos[r] = k;
        }
        let triples = cols.iter().enumerate().flat_map(|(jn, &j)| {
            let row_pos = &row_pos;
            self.columns[j]
                .iter()
                .filter(move |e| row_pos[e.0] != usize::MAX)
                .map(move |&(i, v)| (row_pos[i], jn, v))
        });
        IntMatrix::from_triples(rows.len(), cols.len(), triples).expect("in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_merge_and_zeros_drop() {
        let m =
            IntMatrix::from_triples(2, 2, [(0, 0, 1), (0, 0, -1), (1, 1, 2), (1, 1, 3)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), 5);
        assert_eq!(m.get(0, 0), 0);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(IntMatrix::from_triples(1, 1, [(1, 0, 1)]).is_err());
    }

    #[test]
    fn product_matches_dense() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![0, -1], vec![3, 0]]);
        let b = IntMatrix::from_dense(&[vec![1, 0, 1], vec![2, -1, 0]]);
        let c = a.mul(&b).unwrap();
        assert_eq!(
            c.to_dense(),
            vec![vec![5, -2, 1], vec![-2, 1, 0], vec![3, 0, 3]]
        );
    }

    #[test]
    fn select_reorders() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(a.select(&[1], &[1, 0]).to_dense(), vec![vec![4, 3]]);
    }
}
