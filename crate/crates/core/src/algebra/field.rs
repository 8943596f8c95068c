//! Finite fields `F_q = F_p[x]/(m(x))`, table driven.
//!
//! Elements are stored as their index `sum c_k p^k` where `c_k` are the
//! coefficients of the residue polynomial in `x`. For `q = p` this is the
//! usual representative in `[0, p)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which addition and multiplication tables are built.
pub const MAX_ORDER: u32 = 256;

/// An element of a finite field, by index. Meaningless without its [`Fq`].
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
}

/// A finite field of order `q = p^n`. Cloning is cheap.
#[derive(Clone)]
pub struct Fq {
    t: Arc<Tables>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.t.q)?;
        if self.t.n > 1 {
            write!(f, " (modulus {:?})", self.t.modulus)?;
        }
        Ok(())
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.modulus == other.t.modulus
    }
}

impl Eq for Fq {}

/// Conway polynomials for the non-prime orders up to 64, coefficients low to high.
fn builtin_modulus(p: u32, n: u32) -> Option<Vec<u32>> {
    let m: &[u32] = match (p, n) {
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (2, 5) => &[1, 0, 1, 0, 0, 1],
        (2, 6) => &[1, 1, 0, 1, 1, 0, 1],
        (3, 2) => &[2, 2, 1],
        (3, 3) => &[1, 2, 0, 1],
        (5, 2) => &[2, 4, 1],
        (7, 2) => &[3, 6, 1],
        _ => return None,
    };
    Some(m.to_vec())
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, n)` with `q = p^n`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut n) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

// Dense polynomial helpers over F_p with u32 coefficients, used only to build tables.
fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem_p(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - c * mi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut res = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            res = res * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    res as u32
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let n = m.len() - 1;
    if n == 0 || m[n] == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    // trial division by every monic polynomial of degree 1..=n/2
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                g.push((x % p as u64) as u32);
                x /= p as u64;
            }
            g.push(1);
            if poly_rem_p(m, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn search_modulus(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for idx in 0..count {
        let mut m = Vec::with_capacity(n as usize + 1);
        let mut x = idx;
        for _ in 0..n {
            m.push((x % p as u64) as u32);
            x /= p as u64;
        }
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Fq {
    /// The field of order `p^n` with the built-in modulus.
    pub fn new(p: u32, n: u32) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidField("degree must be at least 1".into()));
        }
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            builtin_modulus(p, n).unwrap_or_else(|| search_modulus(p, n))
        };
        Fq::with_modulus(p, &modulus)
    }

    /// The prime-power order `q`, with the built-in modulus.
    pub fn of_order(q: u32) -> Result<Fq> {
        let (p, n) = prime_power(q)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Fq::new(p, n)
    }

    /// `F_p[x]/(m)` for a user-supplied monic irreducible `m` (coefficients low to high).
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let mut m: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        trim(&mut m);
        if m.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        if *m.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if !is_irreducible(&m, p) {
            return Err(Error::InvalidField(format!(
                "modulus {m:?} is reducible over F_{p}"
            )));
        }
        let n = (m.len() - 1) as u32;
        let q64 = (p as u64).pow(n);
        if q64 > MAX_ORDER as u64 {
            return Err(Error::InvalidField(format!(
                "field order {q64} exceeds supported maximum {MAX_ORDER}"
            )));
        }
        let q = q64 as u32;
        let digits = |e: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(n as usize);
            let mut x = e;
            for _ in 0..n {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let index = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };

        let qs = q as usize;
        let mut add = vec![Fe(0); qs * qs];
        let mut mul = vec![Fe(0); qs * qs];
        let mut neg = vec![Fe(0); qs];
        let mut inv = vec![Fe(0); qs];
        for a in 0..q {
            let da = digits(a);
            neg[a as usize] =
                Fe(index(&da.iter().map(|&c| (p - c) % p).collect::<Vec<_>>()) as u16);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = Fe(index(&s) as u16);
                let mut prod = vec![0u32; 2 * n as usize];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem_p(&prod, &m, p);
                r.resize(n as usize, 0);
                mul[a as usize * qs + b as usize] = Fe(index(&r) as u16);
            }
        }
        for a in 1..qs {
            let b = (1..qs)
                .find(|&b| mul[a * qs + b] == Fe(1))
                .expect("field has inverses");
            inv[a] = Fe(b as u16);
        }
        Ok(Fq {
            t: Arc::new(Tables {
                p,
                n,
                q,
                modulus: m,
                add,
                mul,
                neg,
                inv,
            }),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.t.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.t.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.t.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.t.add[a.index() * self.t.q as usize + b.index()]
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.t.neg[a.index()]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.t.mul[a.index() * self.t.q as usize + b.index()]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero in {self:?}");
        self.t.inv[a.index()]
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let (mut base, mut acc) = (a, Fe::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.t.p as i64) as u16)
    }

    /// Element from its index, if in range.
    pub fn elem(&self, idx: u32) -> Option<Fe> {
        (idx < self.t.q).then_some(Fe(idx as u16))
    }

    /// Coefficient vector (length `n`, low to high) of the residue polynomial.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.t.n as usize);
        let mut x = a.0 as u32;
        for _ in 0..self.t.n {
            v.push(x % self.t.p);
            x /= self.t.p;
        }
        v
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<Fe> {
        if c.len() > self.t.n as usize || c.iter().any(|&x| x >= self.t.p) {
            return Err(Error::InvalidField(format!("bad coefficient vector {c:?}")));
        }
        Ok(Fe(
            c.iter().rev().fold(0u32, |acc, &x| acc * self.t.p + x) as u16
        ))
    }

    /// All elements, zero first.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.t.q).map(|i| Fe(i as u16))
    }

    /// Nonzero elements.
    pub fn units(&self) -> impl Iterator<Item = Fe> {
        (1..self.t.q).map(|i| Fe(i as u16))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for q in [4u32, 8, 16, 32, 64, 9, 27, 25, 49] {
            let (p, n) = prime_power(q).unwrap();
            assert!(
                is_irreducible(&builtin_modulus(p, n).unwrap(), p),
                "q = {q}"
            );
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(Fq::with_modulus(2, &[1, 0, 1]).is_err());
        assert!(Fq::new(4, 1).is_err());
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2u32, 3, 4, 5] {
            let f = Fq::of_order(q).unwrap();
            for _ in 0..1000 {
                let mut pick = || Fe(rng.gen_range(0..q) as u16);
                let (a, b, c) = (pick(), pick(), pick());
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a)), Fe::ONE);
                }
            }
        }
    }

    #[test]
    fn frobenius_order() {
        let f = Fq::of_order(16).unwrap();
        for a in f.elements() {
            assert_eq!(f.pow(a, 16), a);
        }
    }

    #[test]
    fn coeff_roundtrip() {
        let f = Fq::of_order(9).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_coeffs(&f.coeffs(a)).unwrap(), a);
        }
    }
}
