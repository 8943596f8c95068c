//! Subspaces of `F_q^r`, one reduced echelon matrix per subspace.

use crate::algebra::{Fe, Fq, FqMatrix};

/// A subspace of `F_q^r` given by its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub rows: Vec<Vec<Fe>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `self ⊆ o`.
    pub fn is_subspace_of(&self, o: &Subspace, f: &Fq) -> bool {
        if self.dim() > o.dim() {
            return false;
        }
        let r = o.rows.first().or(self.rows.first()).map_or(0, Vec::len);
        let mut stacked = FqMatrix::from_rows(r, &o.rows).expect("consistent widths");
        for v in &self.rows {
            stacked.push_row(v);
        }
        stacked.rank(f) == o.dim()
    }
}

/// All proper nonzero subspaces of `F_q^r`, ordered by dimension, then pivot
/// columns, then free entries in field-index order.
pub fn proper_subspaces(r: usize, f: &Fq) -> Vec<Subspace> {
    let mut out = Vec::new();
    for k in 1..r {
        for pivots in combinations(r, k) {
            // free positions: (row, col) with col > pivot[row], col not a pivot
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| {
                    let pivots = &pivots;
                    (pivots[i] + 1..r)
                        .filter(move |c| !pivots.contains(c))
                        .map(move |c| (i, c))
                })
                .collect();
            let q = f.q() as usize;
            let total = q.pow(free.len() as u32);
            for mut code in 0..total {
                let mut rows = vec![vec![Fe::ZERO; r]; k];
                for (i, &p) in pivots.iter().enumerate() {
                    rows[i][p] = Fe::ONE;
                }
                for &(i, c) in free.iter().rev() {
                    rows[i][c] = Fe((code % q) as u16);
                    code /= q;
                }
                out.push(Subspace { rows });
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}
