//! Principal congruence subgroups acting on the building: stabilizers,
//! stability, fixed spaces and orbit witnesses.

pub mod sigma;

use serde::{Deserialize, Serialize};

use crate::algebra::{Fe, Fq, KMat, Poly, RatK};
use crate::error::{Error, Result};
use crate::lattice::sections::{check_ideal, SectionProblem};
use crate::lattice::{canonical_class, distance, Lattice, LatticeClass, SectionSpace};

pub use sigma::{alpha, beta, epsilon, g_map, in_b_sigma, SigmaData};

/// Resource limits for enumerations. Exceeding one is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Largest stabilizer dimension `enumerate_stab` will expand.
    pub enum_cap: u32,
    /// Largest solution space `orbit_witness` will scan.
    pub solution_cap: u64,
    pub vertex_budget: usize,
    /// Largest candidate count for `brute_stab`.
    pub brute_budget: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            enum_cap: 12,
            solution_cap: 1 << 20,
            vertex_budget: crate::building::DEFAULT_VERTEX_BUDGET,
            brute_budget: 1 << 22,
        }
    }
}

/// The level `I = (f)`, with `f` nonconstant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Level {
    ideal: Poly,
    r: usize,
}

impl Level {
    pub fn new(ideal: Poly, r: usize, f: &Fq) -> Result<Level> {
        check_ideal(&ideal)?;
        if r < 2 {
            return Err(Error::InvalidLevel(format!("rank {r} is below 2")));
        }
        Ok(Level {
            ideal: ideal.monic(f),
            r,
        })
    }

    pub fn ideal(&self) -> &Poly {
        &self.ideal
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// `(self) ⊆ (coarse)`, i.e. the coarse generator divides ours.
    pub fn contained_in(&self, coarse: &Level, f: &Fq) -> bool {
        coarse.ideal.divides(&self.ideal, f)
    }
}

/// An element of `GL_r(A)`, flagged when it lies in a principal congruence subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElt {
    mat: KMat,
    congruence: bool,
}

impl GroupElt {
    pub fn identity(r: usize) -> GroupElt {
        GroupElt {
            mat: KMat::identity(r),
            congruence: true,
        }
    }

    /// Validates polynomial entries, unit determinant and, at a level, `g ≡ 1 mod f`.
    pub fn new(mat: KMat, level: Option<&Level>, f: &Fq) -> Result<GroupElt> {
        if !mat.is_square() || !mat.is_polynomial() {
            return Err(Error::Domain(
                "group elements are square matrices over A".into(),
            ));
        }
        let det = mat.det(f);
        if det.is_zero() || !det.is_poly() || !det.num().is_constant() {
            return Err(Error::Domain("determinant is not a unit of A".into()));
        }
        let congruence = match level {
            None => false,
            Some(lv) => {
                if !is_congruent_to_one(&mat, lv, f) {
                    return Err(Error::Domain(format!("matrix is not 1 mod {}", lv.ideal)));
                }
                true
            }
        };
        Ok(GroupElt { mat, congruence })
    }

    pub fn matrix(&self) -> &KMat {
        &self.mat
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    pub fn is_congruence(&self) -> bool {
        self.congruence
    }

    pub fn mul(&self, o: &GroupElt, f: &Fq) -> GroupElt {
        GroupElt {
            mat: self.mat.mul(&o.mat, f),
            congruence: self.congruence && o.congruence,
        }
    }

    pub fn inverse(&self, f: &Fq) -> GroupElt {
        GroupElt {
            mat: self.mat.inverse(f).expect("unit determinant"),
            congruence: self.congruence,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "matrix": matrix_json(&self.mat) })
    }
}

fn is_congruent_to_one(m: &KMat, lv: &Level, f: &Fq) -> bool {
    let d = m.sub(&KMat::identity(m.rows()), f);
    d.entries()
        .iter()
        .all(|e| e.as_poly().is_some_and(|p| lv.ideal.divides(p, f)))
}

/// Polynomial matrix as nested coefficient-index lists.
pub fn matrix_json(m: &KMat) -> Vec<Vec<Vec<u32>>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let e = &m[(i, j)];
                    debug_assert!(e.is_poly());
                    e.num().to_indices()
                })
                .collect()
        })
        .collect()
}

/// `H_s`: the stabilizer of a simplex is exactly `1 + H_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerSpace {
    pub space: SectionSpace,
    pub q: u32,
}

#[derive(Serialize)]
struct StabilizerJson<'a> {
    dim: usize,
    order: String,
    basis: Vec<Vec<Vec<Vec<u32>>>>,
    degree_bounds: &'a [Vec<i64>],
}

impl StabilizerSpace {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[KMat] {
        &self.space.basis
    }

    pub fn degree_bounds(&self) -> &[Vec<i64>] {
        &self.space.meta.degree_bounds
    }

    /// Largest per-entry degree bound of the search space.
    pub fn max_degree_bound(&self) -> i64 {
        self.degree_bounds()
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StabilizerJson {
            dim: self.dim(),
            order: stab_order(self).to_string(),
            basis: self.basis().iter().map(matrix_json).collect(),
            degree_bounds: self.degree_bounds(),
        })
        .expect("serializable")
    }
}

/// Representative lattices of the vertices of a simplex.
fn lattices(s: &[LatticeClass]) -> Vec<&Lattice> {
    s.iter().map(LatticeClass::lattice).collect()
}

pub(crate) fn stab_problem(s: &[LatticeClass], lv: &Level, f: &Fq) -> SectionProblem {
    let ls = lattices(s);
    let pairs: Vec<(&Lattice, &Lattice)> = ls.iter().map(|l| (*l, *l)).collect();
    SectionProblem::for_pairs(&pairs, &lv.ideal, 0, f)
}

/// `H_s = ∩_i {h ∈ f M_r(A) : h L_i ⊆ L_i}`, solved as one system.
pub fn stab_space(s: &[LatticeClass], lv: &Level, f: &Fq) -> StabilizerSpace {
    let space = stab_problem(s, lv, f).solve(f).expect("well-formed system");
    StabilizerSpace { space, q: f.q() }
}

/// `q^dim`.
pub fn stab_order(h: &StabilizerSpace) -> u128 {
    (h.q as u128).pow(h.dim() as u32)
}

pub fn is_unstable(s: &[LatticeClass], lv: &Level, f: &Fq) -> bool {
    stab_space(s, lv, f).dim() > 0
}

/// All elements of `F_q^dim` in index order (first coordinate fastest).
pub(crate) fn fq_vectors(dim: usize, f: &Fq) -> impl Iterator<Item = Vec<Fe>> {
    let q = f.q() as u64;
    let total = q.pow(dim as u32);
    (0..total).map(move |mut code| {
        (0..dim)
            .map(|_| {
                let c = Fe((code % q) as u16);
                code /= q;
                c
            })
            .collect()
    })
}

/// The `q^dim` elements `1 + h`.
pub fn enumerate_stab(h: &StabilizerSpace, f: &Fq, cap: u32) -> Result<Vec<GroupElt>> {
    if h.dim() as u32 > cap {
        return Err(Error::BudgetExceeded {
            what: "stabilizer dimension",
            value: h.dim() as u128,
            limit: cap as u128,
        });
    }
    let r = h.space.rows;
    Ok(fq_vectors(h.dim(), f)
        .map(|c| GroupElt {
            mat: KMat::identity(r).add(&h.space.combination(&c, f), f),
            congruence: true,
        })
        .collect())
}

/// Exhaustive oracle: every `g = 1 + f x` with entry degrees at most
/// `deg_bound`, unit determinant, fixing every vertex of `s`.
pub fn brute_stab(
    s: &[LatticeClass],
    lv: &Level,
    deg_bound: i64,
    f: &Fq,
    budget: u64,
) -> Result<Vec<GroupElt>> {
    let r = lv.r;
    let slots = (deg_bound - lv.ideal.deg_i64() + 1).max(0) as usize;
    let coeffs = slots * r * r;
    let count = (f.q() as u128)
        .checked_pow(coeffs as u32)
        .unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "brute-force candidates",
            value: count,
            limit: budget as u128,
        });
    }
    let polys: Vec<Poly> = fq_vectors(slots, f)
        .map(|c| Poly::from_coeffs(c).mul(&lv.ideal, f))
        .collect();
    let mut out = Vec::new();
    let npoly = polys.len();
    let mut idx = vec![0usize; r * r];
    loop {
        let m = KMat::from_fn(r, r, |i, j| {
            let p = RatK::from_poly(polys[idx[i * r + j]].clone());
            if i == j {
                p.add(&RatK::one(), f)
            } else {
                p
            }
        });
        let det = m.det(f);
        if !det.is_zero() && det.is_poly() && det.num().is_constant() {
            let fixes = s
                .iter()
                .all(|c| canonical_class(&m.mul(c.basis(), f), f).is_ok_and(|img| &img == c));
            if fixes {
                out.push(GroupElt {
                    mat: m,
                    congruence: true,
                });
            }
        }
        // odometer over all entry choices
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < npoly {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// A `K`-subspace of `W` as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceK {
    ambient: usize,
    rows: Vec<Vec<RatK>>,
}

impl SubspaceK {
    /// Span of the given vectors.
    pub fn span(ambient: usize, vectors: &[Vec<RatK>], f: &Fq) -> SubspaceK {
        if vectors.is_empty() {
            return SubspaceK {
                ambient,
                rows: Vec::new(),
            };
        }
        let mut m = KMat::from_fn(vectors.len(), ambient, |i, j| vectors[i][j].clone());
        m.rref(f);
        let rows = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        SubspaceK { ambient, rows }
    }

    pub fn whole(r: usize) -> SubspaceK {
        let rows = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| if i == j { RatK::one() } else { RatK::zero() })
                    .collect()
            })
            .collect();
        SubspaceK { ambient: r, rows }
    }

    /// Span of standard basis vectors `e_i`, `i` in `idx`.
    pub fn coordinate(r: usize, idx: &[usize], f: &Fq) -> SubspaceK {
        let vs: Vec<Vec<RatK>> = idx
            .iter()
            .map(|&i| {
                (0..r)
                    .map(|j| if i == j { RatK::one() } else { RatK::zero() })
                    .collect()
            })
            .collect();
        SubspaceK::span(r, &vs, f)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<RatK>] {
        &self.rows
    }

    pub fn contains(&self, v: &[RatK], f: &Fq) -> bool {
        let mut vs = self.rows.clone();
        vs.push(v.to_vec());
        SubspaceK::span(self.ambient, &vs, f).dim() == self.dim()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        serde_json::json!({ "dim": self.dim(), "ambient": self.ambient, "basis": rows })
    }
}

/// Common kernel over `K` of a family of matrices.
pub fn common_kernel(r: usize, mats: &[KMat], f: &Fq) -> SubspaceK {
    if mats.is_empty() {
        return SubspaceK::whole(r);
    }
    let stacked = mats[1..]
        .iter()
        .fold(mats[0].clone(), |acc, m| acc.vstack(m));
    SubspaceK::span(r, &stacked.kernel(f), f)
}

/// `W^{1 + H}`: the common kernel of the basis of `H`.
pub fn fixed_space(h: &StabilizerSpace, f: &Fq) -> SubspaceK {
    common_kernel(h.space.cols, h.basis(), f)
}

/// Canonical classes of `g L_i`, in type order.
pub fn apply(g: &GroupElt, s: &[LatticeClass], f: &Fq) -> Vec<LatticeClass> {
    let mut out: Vec<LatticeClass> = s
        .iter()
        .map(|c| canonical_class(&g.mat.mul(c.basis(), f), f).expect("g is invertible"))
        .collect();
    if cfg!(debug_assertions) && g.congruence && !g.is_identity() {
        for (c, gc) in s.iter().zip(&out) {
            debug_assert_ne!(
                distance(c, gc, f),
                1,
                "a congruence element moved a vertex by one"
            );
        }
    }
    out.sort_by_key(LatticeClass::vertex_type);
    out
}

/// Result of a bounded orbit search.
#[derive(Clone, Debug)]
pub struct OrbitSearch {
    pub witness: Option<GroupElt>,
    pub deg_bound: i64,
    pub searched: u128,
}

impl OrbitSearch {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "witness": self.witness.as_ref().map(|g| matrix_json(g.matrix())),
            "deg_bound": self.deg_bound,
            "searched": self.searched.to_string(),
            "conclusive": self.witness.is_some(),
        })
    }
}

/// Searches for `g ≡ 1 mod f` with entry degrees at most `deg_bound` and unit
/// determinant mapping `s1` onto `s2` vertex by vertex in type order. A missing
/// witness says nothing about inequivalence.
pub fn orbit_witness(
    s1: &[LatticeClass],
    s2: &[LatticeClass],
    lv: &Level,
    deg_bound: i64,
    f: &Fq,
    solution_cap: u64,
) -> Result<OrbitSearch> {
    let none = |searched| OrbitSearch {
        witness: None,
        deg_bound,
        searched,
    };
    let types = |s: &[LatticeClass]| s.iter().map(LatticeClass::vertex_type).collect::<Vec<_>>();
    if s1.len() != s2.len() || types(s1) != types(s2) {
        return Ok(none(0));
    }
    let mut a = s1.to_vec();
    let mut b = s2.to_vec();
    a.sort();
    b.sort();
    if a == b {
        return Ok(OrbitSearch {
            witness: Some(GroupElt::identity(lv.r)),
            deg_bound,
            searched: 1,
        });
    }
    let r = lv.r;
    let mut pairs = Vec::with_capacity(s1.len());
    let mut targets = Vec::with_capacity(s1.len());
    for (a, b) in s1.iter().zip(s2) {
        // rescale the target so determinant valuations agree
        let diff = a.lattice().det_valuation() - b.lattice().det_valuation();
        if diff.rem_euclid(r as i64) != 0 {
            return Ok(none(0));
        }
        targets.push(b.lattice().scale_varpi(diff / r as i64, f));
    }
    for (a, t) in s1.iter().zip(&targets) {
        pairs.push((a.lattice(), t));
    }
    let mut problem = SectionProblem::for_pairs(&pairs, &lv.ideal, 0, f);
    problem.degree_bounds = vec![vec![deg_bound; r]; r];
    let Some((part, kernel)) = problem.solve_shifted(&KMat::identity(r), f)? else {
        return Ok(none(0));
    };
    let size = (f.q() as u128)
        .checked_pow(kernel.len() as u32)
        .unwrap_or(u128::MAX);
    if size > solution_cap as u128 {
        return Err(Error::BudgetExceeded {
            what: "orbit solution space",
            value: size,
            limit: solution_cap as u128,
        });
    }
    let mut searched = 0u128;
    for c in fq_vectors(kernel.len(), f) {
        searched += 1;
        let mut m = part.clone();
        for (x, k) in c.iter().zip(&kernel) {
            if !x.is_zero() {
                m = m.add(&k.scale_fe(*x, f), f);
            }
        }
        let Ok(g) = GroupElt::new(m, Some(lv), f) else {
            continue;
        };
        let mut img = apply(&g, s1, f);
        let mut want = s2.to_vec();
        img.sort();
        want.sort();
        if img != want {
            return Err(Error::Internal(
                "orbit solution does not map the simplex".into(),
            ));
        }
        return Ok(OrbitSearch {
            witness: Some(g),
            deg_bound,
            searched,
        });
    }
    Ok(none(searched))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::of_order(2).unwrap()
    }

    fn class(exps: &[i64], f: &Fq) -> LatticeClass {
        Lattice::diagonal(exps).class(f)
    }

    #[test]
    fn vertex_stabilizers() {
        let f = f2();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        assert_eq!(stab_space(&[LatticeClass::standard(2)], &lv, &f).dim(), 0);
        let h = stab_space(&[class(&[-1, 0], &f)], &lv, &f);
        assert_eq!(h.basis(), &[KMat::unit(2, 0, 1, RatK::t())]);
        let h2 = stab_space(&[class(&[-2, 0], &f)], &lv, &f);
        assert_eq!(stab_order(&h2), 4);
        let edge = [LatticeClass::standard(2), class(&[-1, 0], &f)];
        assert_eq!(stab_space(&edge, &lv, &f).dim(), 0);
    }

    #[test]
    fn stability_depends_on_level() {
        let f = f2();
        let v = [class(&[-1, 0], &f)];
        let t2 = Poly::t().mul(&Poly::t(), &f);
        assert!(is_unstable(&v, &Level::new(Poly::t(), 2, &f).unwrap(), &f));
        assert!(!is_unstable(&v, &Level::new(t2, 2, &f).unwrap(), &f));
    }

    #[test]
    fn enumerate_and_brute_agree() {
        let f = f2();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        let v = [class(&[-1, 0], &f)];
        let mut e = enumerate_stab(&stab_space(&v, &lv, &f), &f, 12).unwrap();
        let mut b = brute_stab(&v, &lv, 2, &f, 1 << 16).unwrap();
        e.sort();
        b.sort();
        assert_eq!(e, b);
        assert_eq!(e.len(), 2);
        let l0 = [LatticeClass::standard(2)];
        assert_eq!(brute_stab(&l0, &lv, 2, &f, 1 << 16).unwrap().len(), 1);
        assert_eq!(brute_stab(&v, &lv, 0, &f, 1 << 16).unwrap().len(), 1);
    }

    #[test]
    fn fixed_spaces() {
        let f = f2();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        let h = stab_space(&[class(&[-1, 0], &f)], &lv, &f);
        assert_eq!(fixed_space(&h, &f), SubspaceK::coordinate(2, &[0], &f));
        let h0 = stab_space(&[LatticeClass::standard(2)], &lv, &f);
        assert_eq!(fixed_space(&h0, &f).dim(), 2);
        let e13 = KMat::unit(3, 0, 2, RatK::t());
        assert_eq!(
            common_kernel(3, &[e13], &f),
            SubspaceK::coordinate(3, &[0, 1], &f)
        );
    }

    #[test]
    fn apply_and_witness() {
        let f = f2();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        let mut m = KMat::identity(2);
        m[(0, 1)] = RatK::t();
        let g = GroupElt::new(m, Some(&lv), &f).unwrap();
        let s1 = vec![LatticeClass::standard(2), class(&[-1, 0], &f)];
        let s2 = apply(&g, &s1, &f);
        assert_eq!(s2[0].vertex_type(), 0);
        let found = orbit_witness(&s1, &s2, &lv, 2, &f, 1 << 20).unwrap();
        let w = found.witness.unwrap();
        let mut img = apply(&w, &s1, &f);
        img.sort();
        let mut want = s2.clone();
        want.sort();
        assert_eq!(img, want);
        let same = orbit_witness(&s1, &s1, &lv, 2, &f, 1 << 20).unwrap();
        assert!(same.witness.is_some());
        let other = vec![LatticeClass::standard(2)];
        assert!(orbit_witness(&s1, &other, &lv, 3, &f, 1 << 20)
            .unwrap()
            .witness
            .is_none());
    }

    #[test]
    fn group_element_validation() {
        let f = f2();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        let mut m = KMat::identity(2);
        m[(0, 1)] = RatK::one();
        assert!(GroupElt::new(m.clone(), None, &f).is_ok());
        assert!(GroupElt::new(m, Some(&lv), &f).is_err());
        assert!(Level::new(Poly::one(), 2, &f).is_err());
    }
}
