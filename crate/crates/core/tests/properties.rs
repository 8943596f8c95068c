use ffbt_core::algebra::{Fe, Fq, KMat, Poly, RatK};
use ffbt_core::lattice::{canonical_class, distance, rel_position, Lattice};
use proptest::prelude::*;

fn poly(c: &[u16]) -> Poly {
    Poly::from_coeffs(c.iter().map(|&x| Fe(x)).collect())
}

fn mat(f: &Fq, entries: &[Vec<u16>], shift: i64) -> KMat {
    KMat::from_fn(2, 2, |i, j| RatK::from_poly(poly(&entries[2 * i + j]))).mul_varpi(shift, f)
}

fn entries() -> impl Strategy<Value = Vec<Vec<u16>>> {
    prop::collection::vec(prop::collection::vec(0u16..3, 0..4), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // R-unimodular column operations and scaling leave the class unchanged
    #[test]
    fn class_invariance(e in entries(), u in prop::collection::vec(0u16..3, 0..3), k in -2i64..3) {
        let f = Fq::of_order(3).unwrap();
        let b = mat(&f, &e, 0);
        prop_assume!(!b.det(&f).is_zero());
        let c = canonical_class(&b, &f).unwrap();
        // upper unitriangular with an entry in R
        let x = RatK::from_poly(poly(&u)).mul_varpi(poly(&u).deg_i64().max(0), &f);
        let unit = KMat::identity(2).add(&KMat::unit(2, 0, 1, x), &f);
        prop_assert_eq!(&canonical_class(&b.mul(&unit, &f), &f).unwrap(), &c);
        prop_assert_eq!(&canonical_class(&b.mul_varpi(k, &f), &f).unwrap(), &c);
    }

    #[test]
    fn distance_symmetric(e1 in entries(), e2 in entries()) {
        let f = Fq::of_order(3).unwrap();
        let (b1, b2) = (mat(&f, &e1, 0), mat(&f, &e2, 1));
        prop_assume!(!b1.det(&f).is_zero() && !b2.det(&f).is_zero());
        let (l1, l2) = (Lattice::from_basis(&b1, &f).unwrap(), Lattice::from_basis(&b2, &f).unwrap());
        let (c1, c2) = (l1.class(&f), l2.class(&f));
        prop_assert_eq!(distance(&c1, &c2, &f), distance(&c2, &c1, &f));
        let rp = rel_position(&l1, &l2, &f);
        prop_assert_eq!(rp.0.iter().sum::<i64>(), l2.det_valuation() - l1.det_valuation());
    }
}
