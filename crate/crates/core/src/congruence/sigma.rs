//! Lattices whose stabilizer fixes a subspace `W_1` pointwise, and the maps
//! `alpha`, `epsilon`, `beta`, `G_n` relating them to lattices in `W / W_1`.
//!
//! Everything is computed in coordinates adapted to a splitting
//! `A^r = P_1 ⊕ Q` with `P_1 = A^r ∩ W_1`: the columns of `u` are an `A`-basis
//! of `A^r` whose first `k` columns span `P_1`.

use super::{stab_problem, Level, SubspaceK};
use crate::algebra::{Fq, KMat, RatK, Valuation};
use crate::error::{Error, Result};
use crate::lattice::sections::{hom_degree_bounds, SectionProblem};
use crate::lattice::{hom_sections, Lattice, LatticeClass, SectionSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaData {
    w1: SubspaceK,
    u: KMat,
    u_inv: KMat,
    k: usize,
    ltilde: Lattice,
}

impl SigmaData {
    /// Splitting data for `W_1`, with `L~` the `R`-span of the `P_1` basis.
    pub fn new(w1: SubspaceK, f: &Fq) -> Result<SigmaData> {
        let k = w1.dim();
        SigmaData::with_ltilde(w1, Lattice::standard(k), f)
    }

    /// As [`SigmaData::new`] with a chosen lattice `L~ ⊂ W_1`, given in
    /// coordinates of the `P_1` basis.
    pub fn with_ltilde(w1: SubspaceK, ltilde: Lattice, f: &Fq) -> Result<SigmaData> {
        let r = w1.ambient();
        let k = w1.dim();
        if k == 0 || k >= r {
            return Err(Error::Domain(format!(
                "W_1 must be proper and nonzero, got dimension {k}"
            )));
        }
        if ltilde.rank() != k {
            return Err(Error::DimensionMismatch("L~ must have rank dim W_1".into()));
        }
        // clear denominators: columns of m span W_1 and lie in A^r
        let cols: Vec<Vec<RatK>> = w1
            .basis()
            .iter()
            .map(|v| {
                let den = v
                    .iter()
                    .fold(crate::algebra::Poly::one(), |acc, x| acc.mul(x.den(), f));
                let d = RatK::from_poly(den);
                v.iter().map(|x| x.mul(&d, f)).collect()
            })
            .collect();
        let m = KMat::from_columns(r, &cols);
        let t = row_reduce_over_a(&m, f)?;
        let u = t.inverse(f)?;
        if !u.is_polynomial() {
            return Err(Error::Internal("splitting matrix is not over A".into()));
        }
        Ok(SigmaData {
            w1,
            u_inv: t,
            u,
            k,
            ltilde,
        })
    }

    pub fn w1(&self) -> &SubspaceK {
        &self.w1
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.u.rows()
    }

    /// `A`-basis of `P_1 = A^r ∩ W_1`, as columns.
    pub fn p1_basis(&self) -> KMat {
        self.u.block(0..self.rank(), 0..self.k)
    }

    /// Columns completing `p1_basis` to an `A`-basis of `A^r`.
    pub fn complement_basis(&self) -> KMat {
        self.u.block(0..self.rank(), self.k..self.rank())
    }

    pub fn splitting(&self) -> &KMat {
        &self.u
    }

    pub fn ltilde(&self) -> &Lattice {
        &self.ltilde
    }

    /// `L~` as a (non-full-rank) generating matrix in `W`.
    fn ltilde_in_w(&self, f: &Fq) -> KMat {
        self.p1_basis().mul(self.ltilde.basis(), f)
    }
}

/// `T ∈ GL_r(A)` with `T m = [E; 0]`, by Euclidean row operations.
fn row_reduce_over_a(m: &KMat, f: &Fq) -> Result<KMat> {
    let r = m.rows();
    let k = m.cols();
    let mut a = m.clone();
    let mut t = KMat::identity(r);
    for c in 0..k {
        loop {
            let pivot = (c..r)
                .filter(|&i| !a[(i, c)].is_zero())
                .min_by_key(|&i| (a[(i, c)].num().deg_i64(), i));
            let Some(p) = pivot else {
                return Err(Error::SingularMatrix);
            };
            a.swap_rows(c, p);
            t.swap_rows(c, p);
            let piv = a[(c, c)].num().clone();
            let mut done = true;
            for i in c + 1..r {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let (q, rem) = a[(i, c)].num().divrem(&piv, f);
                let q = RatK::from_poly(q);
                a.row_axpy(i, &q, c, f);
                t.row_axpy(i, &q, c, f);
                done &= rem.is_zero();
            }
            if done {
                break;
            }
        }
    }
    Ok(t)
}

/// Image of `L` in `W / W_1`, in complement coordinates.
pub fn alpha(l: &Lattice, sd: &SigmaData, f: &Fq) -> Lattice {
    let r = sd.rank();
    let coords = sd.u_inv.mul(l.basis(), f);
    let proj = coords.block(sd.k..r, 0..r);
    Lattice::from_basis(&proj, f).expect("projection of a full-rank lattice has full rank")
}

/// `min{m : Hom sections from L' to L~ (twist m, level I) are nonzero} + 1`.
pub fn epsilon(lq: &Lattice, sd: &SigmaData, lv: &Level, f: &Fq) -> i64 {
    let src_inv = lq.basis().inverse(f).expect("invertible");
    let b0 = hom_degree_bounds(&src_inv, sd.ltilde.basis(), 0);
    let top = b0.iter().flatten().copied().max().expect("nonempty");
    // below m0 every entry's degree bound is smaller than deg f
    let mut m = lv.ideal().deg_i64() - top;
    loop {
        let h = hom_sections(lq, &sd.ltilde, lv.ideal(), m, f).expect("level checked");
        if !h.is_zero() {
            return m + 1;
        }
        m += 1;
    }
}

/// `varpi^{-epsilon(L')} L~ ⊕ L'`, lifted through the splitting.
pub fn beta(lq: &Lattice, sd: &SigmaData, lv: &Level, f: &Fq) -> Lattice {
    let e = epsilon(lq, sd, lv, f);
    let block = sd.ltilde.basis().mul_varpi(-e, f).block_diag(lq.basis());
    Lattice::from_basis(&sd.u.mul(&block, f), f).expect("invertible")
}

fn sigma_problem(s: &[LatticeClass], sd: &SigmaData, lv: &Level, f: &Fq) -> SectionProblem {
    let mut p = stab_problem(s, lv, f);
    p.vanishing.push(sd.p1_basis());
    p
}

/// `{h ∈ H_s : h W_1 = 0}`.
pub fn sigma_stab_space(s: &[LatticeClass], sd: &SigmaData, lv: &Level, f: &Fq) -> SectionSpace {
    sigma_problem(s, sd, lv, f)
        .solve(f)
        .expect("well-formed system")
}

/// Whether some nontrivial stabilizer element of `s` is the identity on `W_1`.
pub fn in_b_sigma(s: &[LatticeClass], sd: &SigmaData, lv: &Level, f: &Fq) -> bool {
    !sigma_stab_space(s, sd, lv, f).is_zero()
}

/// `epsilon(alpha(L))`.
pub fn epsilon_hat(l: &Lattice, sd: &SigmaData, lv: &Level, f: &Fq) -> i64 {
    epsilon(&alpha(l, sd, f), sd, lv, f)
}

/// Largest `n` with `varpi^{-n - epsilon_hat} L~ ⊆ L`, so that `G_n(L) = L`.
pub fn absorption_threshold(l: &Lattice, sd: &SigmaData, lv: &Level, f: &Fq) -> i64 {
    let inv = l.basis().inverse(f).expect("invertible");
    let v = inv.mul(&sd.ltilde_in_w(f), f).min_valuation();
    let Valuation::Finite(v) = v else {
        unreachable!("L~ is nonzero")
    };
    v - epsilon_hat(l, sd, lv, f)
}

/// `G_n(L) = L + varpi^{-n - epsilon_hat(L)} L~`, defined on lattices whose
/// class lies in `B(W)_sigma`.
pub fn g_map(l: &Lattice, n: i64, sd: &SigmaData, lv: &Level, f: &Fq) -> Result<Lattice> {
    if !in_b_sigma(&[l.class(f)], sd, lv, f) {
        return Err(Error::Domain(
            "lattice is not in B(W)_sigma at this level".into(),
        ));
    }
    let e = epsilon_hat(l, sd, lv, f);
    let extra = sd.ltilde_in_w(f).mul_varpi(-n - e, f);
    Lattice::from_basis(&l.basis().hstack(&extra), f)
}

/// Every `h` killing `W_1` and stabilizing `L` also stabilizes `G_n(L)`.
pub fn g_map_keeps_stabilizers(l: &Lattice, n: i64, sd: &SigmaData, lv: &Level, f: &Fq) -> Result<bool> {
    let g = g_map(l, n, sd, lv, f)?;
    let src = sigma_stab_space(&[l.class(f)], sd, lv, f);
    let tgt = sigma_problem(&[g.class(f)], sd, lv, f);
    Ok(src.basis.iter().all(|h| tgt.satisfied_by(h, f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;

    fn setup() -> (Fq, Level, SigmaData) {
        let f = Fq::of_order(2).unwrap();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        let sd = SigmaData::new(SubspaceK::coordinate(2, &[0], &f), &f).unwrap();
        (f, lv, sd)
    }

    #[test]
    fn epsilon_and_shift() {
        let (f, lv, sd) = setup();
        let r1 = Lattice::standard(1);
        assert_eq!(epsilon(&r1, &sd, &lv, &f), 2);
        assert_eq!(epsilon(&r1.scale_varpi(-1, &f), &sd, &lv, &f), 3);
    }

    #[test]
    fn beta_alpha_g() {
        let (f, lv, sd) = setup();
        let r1 = Lattice::standard(1);
        let b = beta(&r1, &sd, &lv, &f);
        assert_eq!(b, Lattice::diagonal(&[-2, 0]));
        assert!(in_b_sigma(&[b.class(&f)], &sd, &lv, &f));
        assert_eq!(alpha(&Lattice::diagonal(&[-2, 0]), &sd, &f), r1);
        assert_eq!(alpha(&Lattice::standard(2), &sd, &f), r1);
        let l = Lattice::diagonal(&[-1, 0]);
        let g0 = g_map(&l, 0, &sd, &lv, &f).unwrap();
        assert_eq!(g0, Lattice::diagonal(&[-2, 0]));
        let ba = beta(&alpha(&l, &sd, &f), &sd, &lv, &f);
        assert_eq!(g_map(&ba, 0, &sd, &lv, &f).unwrap(), g0);
        assert!(g_map_keeps_stabilizers(&l, 0, &sd, &lv, &f).unwrap());
    }

    #[test]
    fn in_b_sigma_examples() {
        let (f, lv, sd) = setup();
        let v = [Lattice::diagonal(&[-1, 0]).class(&f)];
        assert!(in_b_sigma(&v, &sd, &lv, &f));
        let sd2 = SigmaData::new(SubspaceK::coordinate(2, &[1], &f), &f).unwrap();
        assert!(!in_b_sigma(&v, &sd2, &lv, &f));
        assert!(!in_b_sigma(&[LatticeClass::standard(2)], &sd, &lv, &f));
        assert!(g_map(&Lattice::standard(2), 0, &sd, &lv, &f).is_err());
    }

    #[test]
    fn absorbed_below_threshold() {
        let (f, lv, sd) = setup();
        let l = Lattice::diagonal(&[-3, 0]);
        let n = absorption_threshold(&l, &sd, &lv, &f);
        assert_eq!(g_map(&l, n, &sd, &lv, &f).unwrap(), l);
        assert_ne!(g_map(&l, n + 1, &sd, &lv, &f).unwrap(), l);
    }

    #[test]
    fn saturation_of_a_skew_line() {
        let f = Fq::of_order(3).unwrap();
        // W_1 = K (t, t^2 + 1): saturated generator is the vector itself
        let v = vec![
            RatK::t(),
            RatK::from_poly(Poly::from_indices(&[1, 0, 1], &f).unwrap()),
        ];
        let sd = SigmaData::new(SubspaceK::span(2, std::slice::from_ref(&v), &f), &f).unwrap();
        let p1 = sd.p1_basis();
        assert!(sd.splitting().det(&f).num().is_constant());
        assert!(sd.w1().contains(&p1.column(0), &f));
    }
}
