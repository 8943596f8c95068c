//! The rational function field `K = F_q(t)` with the degree valuation at infinity.
//!
//! The uniformizer at infinity is `1/t`; [`RatK::laurent`] expands elements in
//! powers of it.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{Fe, Fq};
use super::poly::Poly;

/// Value of `v_inf`, with `Infinity` for zero. `Finite(_) < Infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, _) => Ordering::Greater,
            (_, Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, o: Valuation) -> Valuation {
        match (self, o) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// An element `num/den` of `F_q(t)` in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatK {
    num: Poly,
    den: Poly,
}

impl Default for RatK {
    fn default() -> Self {
        RatK::zero()
    }
}

impl RatK {
    pub fn zero() -> RatK {
        RatK {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> RatK {
        RatK {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> RatK {
        RatK {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(a: Fe) -> RatK {
        RatK::from_poly(Poly::constant(a))
    }

    pub fn t() -> RatK {
        RatK::from_poly(Poly::t())
    }

    /// `varpi^k = t^{-k}`.
    pub fn varpi_pow(k: i64) -> RatK {
        if k >= 0 {
            RatK {
                num: Poly::one(),
                den: Poly::monomial(Fe::ONE, k as usize),
            }
        } else {
            RatK::from_poly(Poly::monomial(Fe::ONE, (-k) as usize))
        }
    }

    /// `num/den` reduced. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly, f: &Fq) -> RatK {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatK::zero();
        }
        if den.is_one() {
            return RatK { num, den };
        }
        let g = num.gcd(&den, f);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.divrem(&g, f).0, den.divrem(&g, f).0)
        };
        let lead = d.lead();
        if lead != Fe::ONE {
            let inv = f.inv(lead);
            n = n.scale(inv, f);
            d = d.scale(inv, f);
        }
        RatK { num: n, den: d }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the element lies in `A = F_q[t]`.
    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    /// `v_inf(x) = deg(den) - deg(num)`.
    pub fn valuation(&self) -> Valuation {
        match self.num.degree() {
            None => Valuation::Infinity,
            Some(dn) => Valuation::Finite(self.den.deg_i64() - dn as i64),
        }
    }

    /// Membership in the valuation ring `R` at infinity.
    pub fn is_integral_at_inf(&self) -> bool {
        self.valuation() >= Valuation::Finite(0)
    }

    pub fn add(&self, o: &RatK, f: &Fq) -> RatK {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatK::new(self.num.add(&o.num, f), self.den.clone(), f);
        }
        let n = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        RatK::new(n, self.den.mul(&o.den, f), f)
    }

    pub fn neg(&self, f: &Fq) -> RatK {
        RatK {
            num: self.num.neg(f),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatK, f: &Fq) -> RatK {
        self.add(&o.neg(f), f)
    }

    pub fn mul(&self, o: &RatK, f: &Fq) -> RatK {
        if self.is_zero() || o.is_zero() {
            return RatK::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatK::from_poly(self.num.mul(&o.num, f));
        }
        RatK::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f)
    }

    pub fn scale(&self, a: Fe, f: &Fq) -> RatK {
        if a.is_zero() {
            return RatK::zero();
        }
        RatK {
            num: self.num.scale(a, f),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, f: &Fq) -> RatK {
        assert!(!self.is_zero(), "inverse of zero in K");
        RatK::new(self.den.clone(), self.num.clone(), f)
    }

    pub fn div(&self, o: &RatK, f: &Fq) -> RatK {
        self.mul(&o.inv(f), f)
    }

    /// Multiplication by `varpi^k`.
    pub fn mul_varpi(&self, k: i64, f: &Fq) -> RatK {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        self.mul(&RatK::varpi_pow(k), f)
    }

    /// Laurent expansion in `varpi = 1/t`: returns `(v, c)` with
    /// `x = sum_i c[i] varpi^(v+i) + O(varpi^hi)`, `v = v_inf(x)`.
    /// Empty when `x = 0` or `v_inf(x) >= hi`.
    pub fn laurent(&self, hi: i64, f: &Fq) -> (i64, Vec<Fe>) {
        let v = match self.valuation() {
            Valuation::Infinity => return (hi, Vec::new()),
            Valuation::Finite(v) => v,
        };
        if v >= hi {
            return (hi, Vec::new());
        }
        let len = (hi - v) as usize;
        // x = varpi^v * N(varpi) / D(varpi), with N, D the reversed polynomials
        let nr = self.num.reversed();
        let dr = self.den.reversed();
        let d0inv = f.inv(dr.coeff(0));
        let mut s: Vec<Fe> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = nr.coeff(k);
            for j in 1..=k.min(dr.coeffs().len().saturating_sub(1)) {
                acc = f.sub(acc, f.mul(dr.coeff(j), s[k - j]));
            }
            s.push(f.mul(acc, d0inv));
        }
        (v, s)
    }

    /// Sum `sum_i c[i] varpi^(low+i)`.
    pub fn from_laurent(low: i64, c: &[Fe], f: &Fq) -> RatK {
        let Some(last) = c.iter().rposition(|x| !x.is_zero()) else {
            return RatK::zero();
        };
        let hi = low + last as i64;
        // multiply through by t^hi: exponent of t for c[i] becomes hi - low - i
        let mut pc = vec![Fe::ZERO; last + 1];
        for (i, &ci) in c[..=last].iter().enumerate() {
            pc[last - i] = ci;
        }
        let p = Poly::from_coeffs(pc);
        if hi >= 0 {
            RatK::new(p, Poly::monomial(Fe::ONE, hi as usize), f)
        } else {
            RatK::from_poly(p.shift((-hi) as usize))
        }
    }

    /// The part of the Laurent expansion with exponents below `a`; the
    /// canonical representative of `x` modulo `varpi^a R`.
    pub fn truncate_below(&self, a: i64, f: &Fq) -> RatK {
        let (low, c) = self.laurent(a, f);
        RatK::from_laurent(low, &c, f)
    }
}

impl fmt::Display for RatK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> Fq {
        Fq::of_order(2).unwrap()
    }

    fn poly(v: &[u16]) -> Poly {
        Poly::from_coeffs(v.iter().map(|&x| Fe(x)).collect())
    }

    #[test]
    fn valuation_examples() {
        let f = f2();
        assert_eq!(RatK::varpi_pow(1).valuation(), Valuation::Finite(1));
        assert_eq!(RatK::zero().valuation(), Valuation::Infinity);
        let x = RatK::new(poly(&[1, 1]), poly(&[0, 0, 0, 1]), &f);
        assert_eq!(x.valuation(), Valuation::Finite(2));
    }

    #[test]
    fn laurent_of_one_over_one_plus_t() {
        // 1/(1+t) = varpi/(1+varpi) = varpi - varpi^2 + ...
        let f = Fq::of_order(3).unwrap();
        let x = RatK::new(Poly::one(), poly(&[1, 1]), &f);
        let (v, c) = x.laurent(4, &f);
        assert_eq!(v, 1);
        assert_eq!(c, vec![Fe(1), Fe(2), Fe(1)]);
    }

    #[test]
    fn truncate_is_congruent() {
        let f = Fq::of_order(3).unwrap();
        let x = RatK::new(poly(&[2, 0, 1, 1]), poly(&[1, 2]), &f);
        for a in -3..3 {
            let y = x.truncate_below(a, &f);
            let diff = x.sub(&y, &f);
            assert!(diff.valuation() >= Valuation::Finite(a));
        }
    }

    fn arb_ratk() -> impl Strategy<Value = (Vec<u16>, Vec<u16>)> {
        (
            proptest::collection::vec(0u16..3, 0..5),
            proptest::collection::vec(0u16..3, 1..5),
        )
    }

    fn build(n: &[u16], d: &[u16], f: &Fq) -> Option<RatK> {
        let d = poly(d);
        (!d.is_zero()).then(|| RatK::new(poly(n), d, f))
    }

    proptest! {
        #[test]
        fn valuation_is_multiplicative_and_ultrametric(a in arb_ratk(), b in arb_ratk()) {
            let f = Fq::of_order(3).unwrap();
            let (Some(x), Some(y)) = (build(&a.0, &a.1, &f), build(&b.0, &b.1, &f)) else {
                return Ok(());
            };
            prop_assert_eq!(x.mul(&y, &f).valuation(), x.valuation() + y.valuation());
            let s = x.add(&y, &f).valuation();
            prop_assert!(s >= x.valuation().min(y.valuation()));
            if x.valuation() != y.valuation() {
                prop_assert_eq!(s, x.valuation().min(y.valuation()));
            }
        }

        #[test]
        fn laurent_roundtrip(a in arb_ratk()) {
            let f = Fq::of_order(3).unwrap();
            let Some(x) = build(&a.0, &a.1, &f) else { return Ok(()) };
            let (low, c) = x.laurent(6, &f);
            let y = RatK::from_laurent(low, &c, &f);
            prop_assert!(x.sub(&y, &f).valuation() >= Valuation::Finite(6));
        }
    }
}
