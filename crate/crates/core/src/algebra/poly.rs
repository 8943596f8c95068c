//! Polynomials in `A = F_q[t]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{Fe, Fq};

/// A polynomial over `F_q`, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    c: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Fe::ONE] }
    }

    pub fn constant(a: Fe) -> Poly {
        Poly::from_coeffs(vec![a])
    }

    /// `a t^k`.
    pub fn monomial(a: Fe, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fe::ZERO; k + 1];
        c[k] = a;
        Poly { c }
    }

    /// The variable `t`.
    pub fn t() -> Poly {
        Poly::monomial(Fe::ONE, 1)
    }

    pub fn from_coeffs(mut c: Vec<Fe>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }

    /// Coefficient of `t^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Fe {
        self.c.get(k).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == Fe::ONE
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree as a signed integer, `-1` for zero. Convenient in bound arithmetic.
    pub fn deg_i64(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lead(&self) -> Fe {
        self.c.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn add(&self, o: &Poly, f: &Fq) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        Poly::from_coeffs(c)
    }

    pub fn sub(&self, o: &Poly, f: &Fq) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::from_coeffs(c)
    }

    pub fn neg(&self, f: &Fq) -> Poly {
        Poly {
            c: self.c.iter().map(|&x| f.neg(x)).collect(),
        }
    }

    pub fn scale(&self, a: Fe, f: &Fq) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        Poly {
            c: self.c.iter().map(|&x| f.mul(x, a)).collect(),
        }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fe::ZERO; k];
        c.extend_from_slice(&self.c);
        Poly { c }
    }

    pub fn mul(&self, o: &Poly, f: &Fq) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fe::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn pow(&self, e: u32, f: &Fq) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    /// Euclidean division. Panics when dividing by zero.
    pub fn divrem(&self, d: &Poly, f: &Fq) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.c.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let dl = d.c.len();
        let inv = f.inv(d.lead());
        let mut r = self.c.clone();
        let mut qc = vec![Fe::ZERO; r.len() - dl + 1];
        for k in (0..qc.len()).rev() {
            let coef = f.mul(r[k + dl - 1], inv);
            if coef.is_zero() {
                continue;
            }
            qc[k] = coef;
            for (j, &dj) in d.c.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(coef, dj));
            }
        }
        (Poly::from_coeffs(qc), Poly::from_coeffs(r))
    }

    pub fn rem(&self, d: &Poly, f: &Fq) -> Poly {
        self.divrem(d, f).1
    }

    pub fn divides(&self, other: &Poly, f: &Fq) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self, f).is_zero()
    }

    pub fn monic(&self, f: &Fq) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.lead()), f)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Poly, f: &Fq) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Coefficients in reversed order, `t^deg p(1/t)`.
    pub fn reversed(&self) -> Poly {
        let mut c = self.c.clone();
        c.reverse();
        Poly::from_coeffs(c)
    }

    /// Index encoding of the coefficients, as used in JSON payloads.
    pub fn to_indices(&self) -> Vec<u32> {
        self.c.iter().map(|x| x.0 as u32).collect()
    }

    pub fn from_indices(v: &[u32], f: &Fq) -> Option<Poly> {
        let c = v.iter().map(|&i| f.elem(i)).collect::<Option<Vec<_>>>()?;
        Some(Poly::from_coeffs(c))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c.0) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}t")?,
                (_, 1) => write!(f, "t^{k}")?,
                _ => write!(f, "{c}t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u16]) -> Poly {
        Poly::from_coeffs(v.iter().map(|&x| Fe(x)).collect())
    }

    #[test]
    fn zero_degree_is_sentinel() {
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::one().degree(), Some(0));
        assert_eq!(p(&[0, 0, 0]), Poly::zero());
    }

    #[test]
    fn divrem_reconstructs() {
        let f = Fq::of_order(3).unwrap();
        let a = p(&[1, 2, 0, 1, 2]);
        let d = p(&[2, 1, 1]);
        let (q, r) = a.divrem(&d, &f);
        assert!(r.degree() < d.degree());
        assert_eq!(q.mul(&d, &f).add(&r, &f), a);
    }

    #[test]
    fn gcd_is_monic_common_divisor() {
        let f = Fq::of_order(5).unwrap();
        let g = p(&[1, 1]);
        let a = g.mul(&p(&[2, 0, 3]), &f);
        let b = g.mul(&p(&[4, 1]), &f);
        let h = a.gcd(&b, &f);
        assert_eq!(h.lead(), Fe::ONE);
        assert!(h.divides(&a, &f) && h.divides(&b, &f));
        assert!(g.divides(&h, &f));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, 1]).to_string(), "t + 1");
        assert_eq!(p(&[0, 0, 2]).to_string(), "2t^2");
    }
}
