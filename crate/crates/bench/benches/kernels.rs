use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ffbt_core::algebra::{snf, Fq, IntMatrix, KMat, Poly, RatK};
use ffbt_core::building::ball;
use ffbt_core::congruence::{stab_space, Level};
use ffbt_core::homology::full_complex;
use ffbt_core::lattice::{canonical_class, LatticeClass};

fn canonicalization(c: &mut Criterion) {
    let f = Fq::of_order(3).unwrap();
    let p = |v: &[u32]| RatK::from_poly(Poly::from_indices(v, &f).unwrap());
    // upper triangular with nonzero diagonal, so invertible
    let b = KMat::from_fn(3, 3, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => p(&[(i + 2 * j) as u32 % 3, 1, 2]),
        std::cmp::Ordering::Equal => p(&[1, (i as u32) % 3, 1]),
        std::cmp::Ordering::Greater => RatK::zero(),
    });
    c.bench_function("canonical_class 3x3 q=3", |bn| {
        bn.iter(|| canonical_class(black_box(&b), &f).unwrap())
    });
}

fn ball_build(c: &mut Criterion) {
    let f = Fq::of_order(2).unwrap();
    c.bench_function("ball r=3 q=2 N=2", |bn| {
        bn.iter(|| ball(&LatticeClass::standard(3), black_box(2), &f).unwrap())
    });
}

fn stabilizers(c: &mut Criterion) {
    let f = Fq::of_order(2).unwrap();
    let b = ball(&LatticeClass::standard(3), 1, &f).unwrap();
    let lv = Level::new(Poly::t(), 3, &f).unwrap();
    c.bench_function("stab_space chambers r=3 q=2", |bn| {
        bn.iter(|| {
            for s in b.simplices(2) {
                black_box(stab_space(&b.simplex_classes(s), &lv, &f));
            }
        })
    });
}

fn smith(c: &mut Criterion) {
    let f = Fq::of_order(2).unwrap();
    let b = ball(&LatticeClass::standard(3), 2, &f).unwrap();
    let m: IntMatrix = full_complex(&b, false).unwrap().boundaries[2].clone();
    c.bench_function("snf boundary_2 r=3 q=2 N=2", |bn| {
        bn.iter(|| snf(black_box(&m)).unwrap())
    });
}

criterion_group!(kernels, canonicalization, ball_build, stabilizers, smith);
criterion_main!(kernels);
