//! Full-rank `R`-lattices in `W = K^r` and their homothety classes.
//!
//! A [`Lattice`] is stored as its Hermite form, so equal lattices have equal
//! representations. A [`LatticeClass`] is the Hermite form shifted so that the
//! smallest diagonal exponent is zero.

pub mod hermite;
pub mod sections;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Fe, Fq, KMat, RatK};
use crate::error::{Error, Result};

pub use hermite::{elementary_divisors, hermite};
pub use sections::{global_sections, hom_sections, SectionSpace};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    exps: Vec<i64>,
    basis: KMat,
}

impl Lattice {
    /// The lattice spanned by the columns of `b` (`r x m`, rank `r`).
    pub fn from_basis(b: &KMat, f: &Fq) -> Result<Lattice> {
        let (exps, basis) = hermite(b, f)?;
        Ok(Lattice { exps, basis })
    }

    /// The standard lattice `R^r`.
    pub fn standard(r: usize) -> Lattice {
        Lattice {
            exps: vec![0; r],
            basis: KMat::identity(r),
        }
    }

    /// `diag(varpi^{a_1}, ..., varpi^{a_r}) R^r`.
    pub fn diagonal(exps: &[i64]) -> Lattice {
        Lattice {
            exps: exps.to_vec(),
            basis: KMat::varpi_diag(exps),
        }
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    pub fn basis(&self) -> &KMat {
        &self.basis
    }

    pub fn diag_exponents(&self) -> &[i64] {
        &self.exps
    }

    /// `v_inf` of the determinant of the basis.
    pub fn det_valuation(&self) -> i64 {
        self.exps.iter().sum()
    }

    /// `varpi^k L`.
    pub fn scale_varpi(&self, k: i64, f: &Fq) -> Lattice {
        Lattice {
            exps: self.exps.iter().map(|a| a + k).collect(),
            basis: self.basis.mul_varpi(k, f),
        }
    }

    /// `g L` for an invertible matrix `g`.
    pub fn transform(&self, g: &KMat, f: &Fq) -> Result<Lattice> {
        Lattice::from_basis(&g.mul(&self.basis, f), f)
    }

    /// `L + M`.
    pub fn sum(&self, o: &Lattice, f: &Fq) -> Result<Lattice> {
        Lattice::from_basis(&self.basis.hstack(&o.basis), f)
    }

    /// `o ⊆ self`.
    pub fn contains(&self, o: &Lattice, f: &Fq) -> bool {
        let inv = self.basis.inverse(f).expect("lattice bases are invertible");
        inv.mul(&o.basis, f).is_integral_at_inf()
    }

    /// Membership of a vector of `W`.
    pub fn contains_vector(&self, v: &[RatK], f: &Fq) -> bool {
        let inv = self.basis.inverse(f).expect("lattice bases are invertible");
        inv.mul_vec(v, f).iter().all(RatK::is_integral_at_inf)
    }

    pub fn class(&self, f: &Fq) -> LatticeClass {
        let m = *self.exps.iter().min().expect("rank at least one");
        LatticeClass {
            lat: self.scale_varpi(-m, f),
        }
    }
}

/// A building vertex: a homothety class of lattices, normalized so `min a_i = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClass {
    lat: Lattice,
}

impl LatticeClass {
    pub fn standard(r: usize) -> LatticeClass {
        LatticeClass {
            lat: Lattice::standard(r),
        }
    }

    /// The normalized representative lattice.
    pub fn lattice(&self) -> &Lattice {
        &self.lat
    }

    pub fn basis(&self) -> &KMat {
        &self.lat.basis
    }

    pub fn rank(&self) -> usize {
        self.lat.rank()
    }

    pub fn diag_exponents(&self) -> &[i64] {
        &self.lat.exps
    }

    pub fn vertex_type(&self) -> usize {
        vertex_type(&self.lat)
    }

    pub fn to_repr(&self, f: &Fq) -> LatticeClassRepr {
        let r = self.rank();
        let exps = &self.lat.exps;
        let subdiagonal = (0..r)
            .map(|i| {
                (0..i)
                    .map(|j| {
                        let e = &self.lat.basis[(i, j)];
                        let (low, c) = e.laurent(exps[i], f);
                        if c.is_empty() {
                            return Vec::new();
                        }
                        // index k <-> exponent a_i - 1 - k
                        let len = (exps[i] - low) as usize;
                        let mut out = vec![0u32; len];
                        for (idx, ci) in c.iter().enumerate() {
                            let e = low + idx as i64;
                            out[(exps[i] - 1 - e) as usize] = ci.index() as u32;
                        }
                        while out.last() == Some(&0) {
                            out.pop();
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        LatticeClassRepr {
            diag_exponents: exps.clone(),
            subdiagonal,
        }
    }

    /// Rebuilds a class from its JSON form, validating normalization.
    pub fn from_repr(repr: &LatticeClassRepr, f: &Fq) -> Result<LatticeClass> {
        let r = repr.diag_exponents.len();
        if r == 0 || repr.subdiagonal.len() != r {
            return Err(Error::Parse(
                "subdiagonal must have one row per exponent".into(),
            ));
        }
        if repr.diag_exponents.iter().min() != Some(&0) {
            return Err(Error::Parse("diag_exponents must have minimum 0".into()));
        }
        let mut m = KMat::varpi_diag(&repr.diag_exponents);
        for (i, row) in repr.subdiagonal.iter().enumerate() {
            if row.len() != i {
                return Err(Error::Parse(format!(
                    "subdiagonal row {i} must have {i} entries"
                )));
            }
            let a = repr.diag_exponents[i];
            for (j, coeffs) in row.iter().enumerate() {
                let mut c: Vec<Fe> = coeffs
                    .iter()
                    .map(|&x| {
                        f.elem(x)
                            .ok_or_else(|| Error::Parse(format!("{x} is not a field element")))
                    })
                    .collect::<Result<_>>()?;
                // stored high exponent first; from_laurent wants ascending exponents
                c.reverse();
                let low = a - c.len() as i64;
                m[(i, j)] = RatK::from_laurent(low, &c, f);
            }
        }
        let lat = Lattice::from_basis(&m, f)?;
        let class = lat.class(f);
        if class.lat.basis != m {
            return Err(Error::Parse(
                "lattice class is not in canonical form".into(),
            ));
        }
        Ok(class)
    }
}

/// JSON form of a [`LatticeClass`]. Entry `(i, j)` of `subdiagonal` lists the
/// coefficients of `varpi^{a_i - 1}, varpi^{a_i - 2}, ...` as field element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeClassRepr {
    pub diag_exponents: Vec<i64>,
    pub subdiagonal: Vec<Vec<Vec<u32>>>,
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lat.basis)
    }
}

/// Relative position of `M` with respect to `L`: `M = ⊕ varpi^{a_i} f_i R` for a basis `f_i` of `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelPos(pub Vec<i64>);

impl RelPos {
    pub fn spread(&self) -> u64 {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => (b - a) as u64,
            _ => 0,
        }
    }
}

pub fn canonical_class(b: &KMat, f: &Fq) -> Result<LatticeClass> {
    if !b.is_square() {
        return Err(Error::DimensionMismatch(
            "a lattice basis must be square".into(),
        ));
    }
    Ok(Lattice::from_basis(b, f)?.class(f))
}

pub fn rel_position(l: &Lattice, m: &Lattice, f: &Fq) -> RelPos {
    let inv = l.basis.inverse(f).expect("lattice bases are invertible");
    RelPos(elementary_divisors(&inv.mul(&m.basis, f), f).expect("nonsingular"))
}

pub fn distance(l: &LatticeClass, m: &LatticeClass, f: &Fq) -> u64 {
    rel_position(&l.lat, &m.lat, f).spread()
}

/// `(-v_inf(det)) mod r`.
pub fn vertex_type(l: &Lattice) -> usize {
    (-l.det_valuation()).rem_euclid(l.rank() as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;

    fn f2() -> Fq {
        Fq::of_order(2).unwrap()
    }

    #[test]
    fn identity_is_standard_type_zero() {
        let f = f2();
        let c = canonical_class(&KMat::identity(3), &f).unwrap();
        assert_eq!(c, LatticeClass::standard(3));
        assert_eq!(c.vertex_type(), 0);
    }

    #[test]
    fn homothety_identifies() {
        let f = f2();
        let a = canonical_class(&KMat::varpi_diag(&[0, 1]), &f).unwrap();
        let b = canonical_class(&KMat::varpi_diag(&[-1, 0]), &f).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.vertex_type(), 1);
    }

    #[test]
    fn rel_position_diag() {
        let f = f2();
        let l0 = Lattice::standard(2);
        let m = Lattice::diagonal(&[-2, 0]);
        assert_eq!(rel_position(&l0, &m, &f), RelPos(vec![-2, 0]));
        assert_eq!(rel_position(&m, &l0, &f), RelPos(vec![0, 2]));
        assert_eq!(distance(&l0.class(&f), &m.class(&f), &f), 2);
    }

    #[test]
    fn repr_roundtrip_with_subdiagonal() {
        let f = Fq::of_order(3).unwrap();
        let mut b = KMat::varpi_diag(&[0, 2]);
        b[(1, 0)] = RatK::varpi_pow(1).add(&RatK::from_poly(Poly::t()), &f);
        let c = canonical_class(&b, &f).unwrap();
        let repr = c.to_repr(&f);
        let json = serde_json::to_string(&repr).unwrap();
        let back: LatticeClassRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(LatticeClass::from_repr(&back, &f).unwrap(), c);
        // exponents 1 and -1 below a_1 = 2: indices 0 and 2
        assert_eq!(repr.subdiagonal[1][0], vec![1, 0, 1]);
    }

    #[test]
    fn unnormalized_repr_rejected() {
        let f = f2();
        let repr = LatticeClassRepr {
            diag_exponents: vec![1, 2],
            subdiagonal: vec![vec![], vec![vec![1]]],
        };
        assert!(LatticeClass::from_repr(&repr, &f).is_err());
    }
}
