//! Column Hermite form and elementary divisors over the valuation ring `R` at infinity.

use crate::algebra::{Fq, KMat, RatK, Valuation};
use crate::error::{Error, Result};

/// Reduces the generators (columns of `b`, an `r x m` matrix of rank `r`) of an
/// `R`-lattice to the lower-triangular Hermite form.
///
/// The result has diagonal `varpi^{a_i}` and entry `(i, j)`, `j < i`, equal to its
/// own Laurent truncation below `a_i`. Returns `(a, H)`.
pub fn hermite(b: &KMat, f: &Fq) -> Result<(Vec<i64>, KMat)> {
    let r = b.rows();
    if b.cols() < r {
        return Err(Error::SingularMatrix);
    }
    let mut m = b.clone();
    let mut exps = Vec::with_capacity(r);
    for i in 0..r {
        let mut best: Option<(usize, i64)> = None;
        for j in i..m.cols() {
            if let Valuation::Finite(v) = m[(i, j)].valuation() {
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((j, v));
                }
            }
        }
        let Some((pj, a)) = best else {
            return Err(Error::SingularMatrix);
        };
        m.swap_cols(i, pj);
        let unit = RatK::varpi_pow(a).div(&m[(i, i)], f);
        m.scale_col(i, &unit, f);
        for j in i + 1..m.cols() {
            if m[(i, j)].is_zero() {
                continue;
            }
            let c = m[(i, j)].mul_varpi(-a, f);
            m.col_axpy(j, &c, i, f);
        }
        exps.push(a);
    }
    let mut h = m.block(0..r, 0..r);
    for i in 1..r {
        let a = exps[i];
        for j in 0..i {
            let e = h[(i, j)].clone();
            let excess = e.sub(&e.truncate_below(a, f), f);
            if excess.is_zero() {
                continue;
            }
            let c = excess.mul_varpi(-a, f);
            h.col_axpy(j, &c, i, f);
        }
    }
    Ok((exps, h))
}

/// Valuations of the elementary divisors of a nonsingular square matrix over
/// `R`, ascending: `m = U diag(varpi^{a_1}, ...) V` with `U, V` in `GL_r(R)`.
pub fn elementary_divisors(m: &KMat, f: &Fq) -> Result<Vec<i64>> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "elementary divisors of a non-square matrix".into(),
        ));
    }
    let mut a = m.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..n {
            for j in k..n {
                if let Valuation::Finite(v) = a[(i, j)].valuation() {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else {
            return Err(Error::SingularMatrix);
        };
        a.swap_rows(k, pi);
        a.swap_cols(k, pj);
        let inv = a[(k, k)].inv(f);
        for i in k + 1..n {
            let c = a[(i, k)].mul(&inv, f);
            a.row_axpy(i, &c, k, f);
        }
        for j in k + 1..n {
            let c = a[(k, j)].mul(&inv, f);
            a.col_axpy(j, &c, k, f);
        }
        out.push(v);
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Fe, Poly};

    #[test]
    fn unipotent_column_is_absorbed() {
        let f = Fq::of_order(2).unwrap();
        // diag(t, 1) * [[1, 1], [0, 1]]
        let b = KMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (0, 1) => RatK::t(),
            (1, 1) => RatK::one(),
            _ => RatK::zero(),
        });
        let (a, h) = hermite(&b, &f).unwrap();
        assert_eq!(a, vec![-1, 0]);
        assert_eq!(h, KMat::varpi_diag(&[-1, 0]));
    }

    #[test]
    fn subdiagonal_reduced() {
        let f = Fq::of_order(3).unwrap();
        // columns (1, t^2 + 1/t) and (0, 1/t): entry (1,0) reduces mod varpi
        let x = RatK::from_poly(Poly::monomial(Fe::ONE, 2)).add(&RatK::varpi_pow(1), &f);
        let b = KMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => RatK::one(),
            (1, 0) => x.clone(),
            (1, 1) => RatK::varpi_pow(1),
            _ => RatK::zero(),
        });
        let (a, h) = hermite(&b, &f).unwrap();
        assert_eq!(a, vec![0, 1]);
        assert_eq!(h[(1, 0)], RatK::from_poly(Poly::monomial(Fe::ONE, 2)));
    }

    #[test]
    fn rank_deficient_rejected() {
        let f = Fq::of_order(2).unwrap();
        let b = KMat::from_fn(2, 3, |i, _| if i == 0 { RatK::one() } else { RatK::zero() });
        assert_eq!(hermite(&b, &f), Err(Error::SingularMatrix));
    }

    #[test]
    fn divisors_of_diag() {
        let f = Fq::of_order(2).unwrap();
        let m = KMat::varpi_diag(&[0, -2]);
        assert_eq!(elementary_divisors(&m, &f).unwrap(), vec![-2, 0]);
    }
}
