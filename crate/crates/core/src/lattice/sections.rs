//! Finite-dimensional section spaces: polynomial matrices cut out by integrality
//! conditions at infinity, solved as linear systems over `F_q`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Lattice;
use crate::algebra::{solve_affine, solve_fq, Fe, Fq, KMat, Poly, RatK, Valuation};
use crate::error::{Error, Result};

/// An `F_q`-space of `rows x cols` matrices over `A`, given by an explicit basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<KMat>,
    pub meta: SectionMeta,
}

/// The search space the solver used: entry `(i, j)` ranges over `ideal * g`
/// with `deg(ideal * g) <= degree_bounds[i][j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionMeta {
    pub degree_bounds: Vec<Vec<i64>>,
    pub ideal: Vec<u32>,
    pub twist: i64,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// `sum c_k basis_k`.
    pub fn combination(&self, coeffs: &[Fe], f: &Fq) -> KMat {
        assert_eq!(coeffs.len(), self.basis.len());
        let mut out = KMat::zeros(self.rows, self.cols);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = out.add(&b.scale_fe(*c, f), f);
            }
        }
        out
    }
}

/// A linear section problem. Unknown `x` ranges over matrices with entries in
/// `ideal * A` of bounded degree, subject to
/// `varpi^m * left * x * right ∈ M(R)` for every integrality condition and
/// `x * u = 0` for every vanishing condition.
#[derive(Clone, Debug)]
pub struct SectionProblem {
    pub rows: usize,
    pub cols: usize,
    pub ideal: Poly,
    pub twist: i64,
    pub degree_bounds: Vec<Vec<i64>>,
    pub integrality: Vec<(KMat, KMat, i64)>,
    pub vanishing: Vec<KMat>,
}

type EqKey = (usize, usize, usize, i64);

/// Largest `-v_inf` over a row (or column) of `m`.
fn neg_val_max(vals: impl Iterator<Item = Valuation>) -> i64 {
    vals.filter_map(Valuation::finite)
        .map(|v| -v)
        .max()
        .expect("row of an invertible matrix is nonzero")
}

/// Degree bound for `x` with `varpi^m tgt^{-1} x src ∈ M(R)`, i.e.
/// `x = varpi^{-m} tgt X src^{-1}`: entry `(i, j)` has degree at most
/// `m + max_k(-v(tgt_ik)) + max_l(-v(src^{-1}_lj))`.
pub fn hom_degree_bounds(src_inv: &KMat, tgt: &KMat, m: i64) -> Vec<Vec<i64>> {
    let row_part: Vec<i64> = (0..tgt.rows())
        .map(|i| neg_val_max(tgt.row(i).iter().map(RatK::valuation)))
        .collect();
    let col_part: Vec<i64> = (0..src_inv.cols())
        .map(|j| neg_val_max((0..src_inv.rows()).map(|l| src_inv[(l, j)].valuation())))
        .collect();
    row_part
        .iter()
        .map(|a| col_part.iter().map(|b| m + a + b).collect())
        .collect()
}

impl SectionProblem {
    /// Endomorphism-style problem for several `(src, tgt)` lattice pairs at once;
    /// the search space is the intersection of the individual ones.
    pub fn for_pairs(
        pairs: &[(&Lattice, &Lattice)],
        ideal: &Poly,
        m: i64,
        f: &Fq,
    ) -> SectionProblem {
        assert!(!pairs.is_empty());
        let rows = pairs[0].1.rank();
        let cols = pairs[0].0.rank();
        let mut bounds: Option<Vec<Vec<i64>>> = None;
        let mut integrality = Vec::new();
        for (src, tgt) in pairs {
            let src_inv = src.basis().inverse(f).expect("invertible");
            let tgt_inv = tgt.basis().inverse(f).expect("invertible");
            let b = hom_degree_bounds(&src_inv, tgt.basis(), m);
            bounds = Some(match bounds {
                None => b,
                Some(prev) => prev
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| *p.min(q)).collect())
                    .collect(),
            });
            integrality.push((tgt_inv, src.basis().clone(), m));
        }
        SectionProblem {
            rows,
            cols,
            ideal: ideal.clone(),
            twist: m,
            degree_bounds: bounds.expect("nonempty"),
            integrality,
            vanishing: Vec::new(),
        }
    }

    /// The unknowns, one per `(i, j, d)`: the matrix `ideal * t^d * E_ij`.
    fn unknowns(&self) -> Vec<(usize, usize, usize)> {
        let dl = self.ideal.deg_i64();
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let top = self.degree_bounds[i][j] - dl;
                for d in 0..=top.max(-1) {
                    out.push((i, j, d as usize));
                }
            }
        }
        out
    }

    /// Equation rows of the homogeneous system, keyed by
    /// `(condition, row, col, exponent)`, as sparse `(unknown, coefficient)` lists.
    fn equations(
        &self,
        unknowns: &[(usize, usize, usize)],
        f: &Fq,
    ) -> Result<BTreeMap<EqKey, Vec<(usize, Fe)>>> {
        let mut eqs: BTreeMap<EqKey, Vec<(usize, Fe)>> = BTreeMap::new();
        // outer products left[:, i] right[j, :], cached per (condition, i, j)
        let mut outer: BTreeMap<(usize, usize, usize), KMat> = BTreeMap::new();
        for (u, &(i, j, d)) in unknowns.iter().enumerate() {
            let scalar = RatK::from_poly(self.ideal.shift(d));
            for (c, (left, right, m)) in self.integrality.iter().enumerate() {
                let op = outer.entry((c, i, j)).or_insert_with(|| {
                    let lcol = KMat::from_columns(left.rows(), &[left.column(i)]);
                    let rrow = KMat::from_fn(1, right.cols(), |_, k| right[(j, k)].clone());
                    lcol.mul(&rrow, f).mul_varpi(*m, f)
                });
                for a in 0..op.rows() {
                    for b in 0..op.cols() {
                        let e = &op[(a, b)];
                        if e.is_zero() {
                            continue;
                        }
                        let (low, coeffs) = e.mul(&scalar, f).laurent(0, f);
                        for (k, &x) in coeffs.iter().enumerate() {
                            if !x.is_zero() {
                                eqs.entry((c, a, b, low + k as i64))
                                    .or_default()
                                    .push((u, x));
                            }
                        }
                    }
                }
            }
            for (c, uvec) in self.vanishing.iter().enumerate() {
                // (x u)_{i, b} = ideal t^d u_{j, b}
                for b in 0..uvec.cols() {
                    let e = &uvec[(j, b)];
                    if e.is_zero() {
                        continue;
                    }
                    let p = e.mul(&scalar, f);
                    let p = p.as_poly().ok_or_else(|| {
                        Error::Internal("vanishing conditions must be polynomial".into())
                    })?;
                    for (k, &x) in p.coeffs().iter().enumerate() {
                        if !x.is_zero() {
                            let key = (self.integrality.len() + c, i, b, k as i64);
                            eqs.entry(key).or_default().push((u, x));
                        }
                    }
                }
            }
        }
        Ok(eqs)
    }

    /// The same linear functionals evaluated on a fixed matrix `x0`.
    fn evaluate(&self, x0: &KMat, f: &Fq) -> BTreeMap<EqKey, Fe> {
        let mut out = BTreeMap::new();
        for (c, (left, right, m)) in self.integrality.iter().enumerate() {
            let y = left.mul(x0, f).mul(right, f).mul_varpi(*m, f);
            for a in 0..y.rows() {
                for b in 0..y.cols() {
                    let (low, coeffs) = y[(a, b)].laurent(0, f);
                    for (k, &x) in coeffs.iter().enumerate() {
                        if !x.is_zero() {
                            out.insert((c, a, b, low + k as i64), x);
                        }
                    }
                }
            }
        }
        for (c, u) in self.vanishing.iter().enumerate() {
            let y = x0.mul(u, f);
            for a in 0..y.rows() {
                for b in 0..y.cols() {
                    if let Some(p) = y[(a, b)].as_poly() {
                        for (k, &x) in p.coeffs().iter().enumerate() {
                            if !x.is_zero() {
                                out.insert((self.integrality.len() + c, a, b, k as i64), x);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn to_matrix(&self, unknowns: &[(usize, usize, usize)], v: &[Fe], f: &Fq) -> KMat {
        let mut entries: Vec<Vec<Fe>> = vec![Vec::new(); self.rows * self.cols];
        for (&(i, j, d), &x) in unknowns.iter().zip(v) {
            let e = &mut entries[i * self.cols + j];
            if e.len() <= d {
                e.resize(d + 1, Fe::ZERO);
            }
            e[d] = x;
        }
        KMat::from_fn(self.rows, self.cols, |i, j| {
            let g = Poly::from_coeffs(entries[i * self.cols + j].clone());
            RatK::from_poly(g.mul(&self.ideal, f))
        })
    }

    fn dense_rows(
        n: usize,
        eqs: BTreeMap<EqKey, Vec<(usize, Fe)>>,
        f: &Fq,
    ) -> Vec<(EqKey, Vec<Fe>)> {
        eqs.into_iter()
            .map(|(k, sparse)| {
                let mut r = vec![Fe::ZERO; n];
                for (u, x) in sparse {
                    r[u] = f.add(r[u], x);
                }
                (k, r)
            })
            .collect()
    }

    pub fn solve(&self, f: &Fq) -> Result<SectionSpace> {
        let unknowns = self.unknowns();
        let eqs = self.equations(&unknowns, f)?;
        let rows: Vec<Vec<Fe>> = Self::dense_rows(unknowns.len(), eqs, f)
            .into_iter()
            .map(|(_, r)| r)
            .collect();
        let sol = solve_fq(unknowns.len(), &rows, f)?;
        let basis: Vec<KMat> = sol
            .iter()
            .map(|v| self.to_matrix(&unknowns, v, f))
            .collect();
        for b in &basis {
            if !self.satisfied_by(b, f) {
                return Err(Error::Internal(
                    "section basis element fails its conditions".into(),
                ));
            }
        }
        Ok(SectionSpace {
            rows: self.rows,
            cols: self.cols,
            basis,
            meta: self.meta(),
        })
    }

    pub fn meta(&self) -> SectionMeta {
        SectionMeta {
            degree_bounds: self.degree_bounds.clone(),
            ideal: self.ideal.to_indices(),
            twist: self.twist,
        }
    }

    /// Solutions `x0 + x` with `x` in the search space: a particular solution
    /// and a kernel basis, or `None` when inconsistent.
    pub fn solve_shifted(&self, x0: &KMat, f: &Fq) -> Result<Option<(KMat, Vec<KMat>)>> {
        let unknowns = self.unknowns();
        let n = unknowns.len();
        let mut eqs = self.equations(&unknowns, f)?;
        let consts = self.evaluate(x0, f);
        for k in consts.keys() {
            eqs.entry(*k).or_default();
        }
        let system: Vec<(Vec<Fe>, Fe)> = Self::dense_rows(n, eqs, f)
            .into_iter()
            .map(|(k, r)| {
                let c = consts.get(&k).copied().unwrap_or(Fe::ZERO);
                (r, f.neg(c))
            })
            .collect();
        let Some((part, kernel)) = solve_affine(n, &system, f)? else {
            return Ok(None);
        };
        let p = x0.add(&self.to_matrix(&unknowns, &part, f), f);
        let k = kernel
            .iter()
            .map(|v| self.to_matrix(&unknowns, v, f))
            .collect();
        Ok(Some((p, k)))
    }

    /// Direct check of all conditions on a candidate matrix.
    pub fn satisfied_by(&self, x: &KMat, f: &Fq) -> bool {
        if !x.is_polynomial() {
            return false;
        }
        let divisible = x.entries().iter().all(|e| self.ideal.divides(e.num(), f));
        divisible
            && self
                .integrality
                .iter()
                .all(|(l, r, m)| l.mul(x, f).mul(r, f).mul_varpi(*m, f).is_integral_at_inf())
            && self.vanishing.iter().all(|u| x.mul(u, f).is_zero())
    }
}

/// `{w ∈ A^r : w ∈ L}`, as column vectors.
pub fn global_sections(l: &Lattice, f: &Fq) -> SectionSpace {
    let inv = l.basis().inverse(f).expect("invertible");
    let degree_bounds = (0..l.rank())
        .map(|i| vec![neg_val_max(l.basis().row(i).iter().map(RatK::valuation))])
        .collect();
    let problem = SectionProblem {
        rows: l.rank(),
        cols: 1,
        ideal: Poly::one(),
        twist: 0,
        degree_bounds,
        integrality: vec![(inv, KMat::identity(1), 0)],
        vanishing: Vec::new(),
    };
    problem.solve(f).expect("well-formed system")
}

/// `{x ∈ f M(A) : x L_src ⊆ varpi^{-m} L_tgt}`.
pub fn hom_sections(
    src: &Lattice,
    tgt: &Lattice,
    ideal: &Poly,
    m: i64,
    f: &Fq,
) -> Result<SectionSpace> {
    check_ideal(ideal)?;
    SectionProblem::for_pairs(&[(src, tgt)], ideal, m, f).solve(f)
}

pub fn check_ideal(ideal: &Poly) -> Result<()> {
    if ideal.is_constant() {
        return Err(Error::InvalidLevel(format!(
            "ideal generator {ideal} must be nonconstant and nonzero"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::of_order(2).unwrap()
    }

    #[test]
    fn global_sections_of_split_lattices() {
        let f = f2();
        assert_eq!(global_sections(&Lattice::standard(2), &f).dim(), 2);
        assert_eq!(global_sections(&Lattice::diagonal(&[-2, 0]), &f).dim(), 4);
        assert_eq!(global_sections(&Lattice::diagonal(&[1, 0]), &f).dim(), 1);
    }

    #[test]
    fn endomorphisms_of_diag_t_1() {
        let f = f2();
        let l = Lattice::diagonal(&[-1, 0]);
        let h = hom_sections(&l, &l, &Poly::t(), 0, &f).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.basis[0], KMat::unit(2, 0, 1, RatK::t()));
        let l0 = Lattice::standard(2);
        assert_eq!(hom_sections(&l0, &l0, &Poly::t(), 0, &f).unwrap().dim(), 0);
    }

    #[test]
    fn one_by_one_twists() {
        let f = f2();
        let r1 = Lattice::standard(1);
        let h1 = hom_sections(&r1, &r1, &Poly::t(), 1, &f).unwrap();
        assert_eq!(h1.basis, vec![KMat::unit(1, 0, 0, RatK::t())]);
        assert_eq!(hom_sections(&r1, &r1, &Poly::t(), 0, &f).unwrap().dim(), 0);
    }

    #[test]
    fn constant_ideal_rejected() {
        let f = f2();
        let l = Lattice::standard(2);
        assert!(hom_sections(&l, &l, &Poly::one(), 0, &f).is_err());
        assert!(hom_sections(&l, &l, &Poly::zero(), 0, &f).is_err());
    }
}
