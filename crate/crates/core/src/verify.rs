//! The verification suite: twelve named checks, each with a time limit.
//!
//! Every check compares a computed object against an independent oracle
//! (exhaustive search, BFS, direct lattice action, a second construction).

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Fe, Fq, KMat, Poly, RatK};
use crate::building::{ball, bfs_distance, gaussian_binomial, neighbors, Ball, Simplex};
use crate::congruence::sigma::{absorption_threshold, g_map_keeps_stabilizers};
use crate::congruence::{
    beta, brute_stab, enumerate_stab, epsilon, fixed_space, g_map, in_b_sigma, stab_space, Budgets,
    Level, SigmaData, StabilizerSpace, SubspaceK,
};
use crate::error::Error;
use crate::homology::{
    components, full_complex, homology, restriction_map, stable_complex, unstable_complex,
    LevelData,
};
use crate::lattice::{canonical_class, distance, Lattice, LatticeClass};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub budgets: Budgets,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            budgets: Budgets::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A budget stopped the check before it could decide.
    Budget,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "id": self.id,
            "name": self.name,
            "status": match self.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Budget => "budget",
            },
            "detail": self.detail,
            "limit_secs": self.limit.as_secs(),
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Budget => "BUDGET",
        };
        write!(
            out,
            "[{tag}] {:02} {} ({:.2}s / {}s): {}",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

enum Failure {
    Check(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            e => Failure::Check(e.to_string()),
        }
    }
}

type Check = std::result::Result<String, Failure>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(Failure::Check(format!($($arg)*)));
        }
    };
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Duration,
    run: fn(&VerifyOptions, &mut ChaCha8Rng) -> Check,
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, secs, run| Criterion {
        id,
        name,
        limit: Duration::from_secs(secs),
        run,
    };
    vec![
        c(
            1,
            "stabilizer-oracle-equality",
            120,
            stabilizer_oracle as fn(&_, &mut _) -> Check,
        ),
        c(2, "p-group-law", 120, p_group_law),
        c(3, "distance-equivalence", 60, distance_equivalence),
        c(4, "no-displacement-by-one", 60, no_displacement),
        c(5, "vertexwise-stabilizers", 60, vertexwise_stabilizers),
        c(6, "fixed-space-properness", 30, fixed_space_properness),
        c(7, "contraction-map-laws", 120, contraction_laws),
        c(8, "complex-integrity", 120, complex_integrity),
        c(9, "ball-contractibility", 120, ball_contractibility),
        c(10, "rank-2-forest", 180, rank2_forest),
        c(11, "restriction-chain-map", 30, restriction_chain_map),
        c(12, "enumeration-census", 30, enumeration_census),
    ]
}

impl Criterion {
    pub fn run(&self, opts: &VerifyOptions) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(self.id as u64));
        let start = Instant::now();
        let res = (self.run)(opts, &mut rng);
        let elapsed = start.elapsed();
        let (mut status, mut detail) = match res {
            Ok(d) => (Status::Pass, d),
            Err(Failure::Check(d)) => (Status::Fail, d),
            Err(Failure::Budget(d)) => (Status::Budget, d),
        };
        if status == Status::Pass && elapsed > self.limit {
            status = Status::Fail;
            detail = format!("exceeded time limit; {detail}");
        }
        Outcome {
            id: self.id,
            name: self.name,
            status,
            detail,
            elapsed,
            limit: self.limit,
        }
    }
}

/// Runs the checks whose names or ids are listed, or all of them.
pub fn run_suite(opts: &VerifyOptions, only: &[String]) -> Vec<Outcome> {
    criteria()
        .into_iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o == c.name || *o == c.id.to_string()))
        .map(|c| c.run(opts))
        .collect()
}

// ---- configurations ----

fn field(q: u32) -> Fq {
    Fq::of_order(q).expect("prime power")
}

fn level(coeffs: &[u32], r: usize, f: &Fq) -> Level {
    Level::new(Poly::from_indices(coeffs, f).expect("valid"), r, f).expect("nonconstant")
}

const T: &[u32] = &[0, 1];
const T_PLUS_1: &[u32] = &[1, 1];
const T_SQUARED: &[u32] = &[0, 0, 1];

/// `(q, r, radius)` with the levels swept over it.
struct Sweep {
    q: u32,
    r: usize,
    radius: u32,
    levels: &'static [&'static [u32]],
}

const SWEEPS: [Sweep; 2] = [
    Sweep {
        q: 2,
        r: 2,
        radius: 2,
        levels: &[T, T_PLUS_1, T_SQUARED],
    },
    Sweep {
        q: 2,
        r: 3,
        radius: 1,
        levels: &[T, T_PLUS_1, T_SQUARED],
    },
];

fn all_simplices(b: &Ball) -> impl Iterator<Item = &Simplex> {
    (0..b.rank()).flat_map(move |d| b.simplices(d).iter())
}

fn poly_label(c: &[u32], f: &Fq) -> String {
    Poly::from_indices(c, f).expect("valid").to_string()
}

// ---- criterion 1 ----

fn stabilizer_oracle(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let sw = &SWEEPS[0];
    let f = field(sw.q);
    let b = ball(&LatticeClass::standard(sw.r), sw.radius, &f)?;
    let mut checked = 0;
    let mut max_bound = i64::MIN;
    for lc in sw.levels {
        let lv = level(lc, sw.r, &f);
        for s in all_simplices(&b) {
            let cls = b.simplex_classes(s);
            let h = stab_space(&cls, &lv, &f);
            let solved: BTreeSet<KMat> = enumerate_stab(&h, &f, opts.budgets.enum_cap)?
                .into_iter()
                .map(|g| g.matrix().clone())
                .collect();
            ensure!(
                solved.len() as u128 == crate::congruence::stab_order(&h),
                "duplicate stabilizer elements for {:?}",
                s.0
            );
            let bound = h.max_degree_bound();
            max_bound = max_bound.max(bound);
            // the recorded bound and one beyond it
            for db in [bound, bound + 1] {
                let brute: BTreeSet<KMat> =
                    brute_stab(&cls, &lv, db, &f, opts.budgets.brute_budget)?
                        .into_iter()
                        .map(|g| g.matrix().clone())
                        .collect();
                ensure!(
                    brute == solved,
                    "simplex {:?} at ({}): solver {} elements, brute force (degree {db}) {}",
                    s.0,
                    poly_label(lc, &f),
                    solved.len(),
                    brute.len()
                );
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} simplex/level pairs agree; largest recorded degree bound {max_bound}"
    ))
}

// ---- criterion 2 ----

fn is_power_of(mut n: usize, p: usize) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

fn stabilizer_set(
    cls: &[LatticeClass],
    h: &StabilizerSpace,
    lv: &Level,
    f: &Fq,
    opts: &VerifyOptions,
) -> std::result::Result<(BTreeSet<KMat>, bool), Failure> {
    // brute force when affordable, otherwise the solver's enumeration
    match brute_stab(
        cls,
        lv,
        h.max_degree_bound(),
        f,
        opts.budgets.brute_budget.min(1 << 14),
    ) {
        Ok(v) => Ok((v.into_iter().map(|g| g.matrix().clone()).collect(), true)),
        Err(Error::BudgetExceeded { .. }) => Ok((
            enumerate_stab(h, f, opts.budgets.enum_cap)?
                .into_iter()
                .map(|g| g.matrix().clone())
                .collect(),
            false,
        )),
        Err(e) => Err(e.into()),
    }
}

fn p_group_law(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Check {
    let (mut groups, mut brute_count, mut largest) = (0, 0, 0);
    for sw in &SWEEPS {
        let f = field(sw.q);
        let b = ball(&LatticeClass::standard(sw.r), sw.radius, &f)?;
        for lc in sw.levels {
            let lv = level(lc, sw.r, &f);
            for s in all_simplices(&b) {
                let cls = b.simplex_classes(s);
                let h = stab_space(&cls, &lv, &f);
                let (set, by_brute) = stabilizer_set(&cls, &h, &lv, &f, opts)?;
                brute_count += by_brute as usize;
                let n = set.len();
                largest = largest.max(n);
                ensure!(
                    is_power_of(n, f.p() as usize),
                    "order {n} of {:?} is not a power of {}",
                    s.0,
                    f.p()
                );
                ensure!(
                    set.contains(&KMat::identity(sw.r)),
                    "identity missing for {:?}",
                    s.0
                );
                let elems: Vec<&KMat> = set.iter().collect();
                let pairs: Vec<(usize, usize)> = if n * n <= 4096 {
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
                } else {
                    (0..4096)
                        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                        .collect()
                };
                for (i, j) in pairs {
                    ensure!(
                        set.contains(&elems[i].mul(elems[j], &f)),
                        "stabilizer of {:?} is not closed",
                        s.0
                    );
                }
                groups += 1;
            }
        }
    }
    Ok(format!("{groups} stabilizers are p-groups ({brute_count} by exhaustive search); largest order {largest}"))
}

// ---- criterion 3 ----

fn distance_equivalence(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let mut pairs = 0usize;
    for (q, r) in [(2u32, 2usize), (2, 3)] {
        let f = field(q);
        for n in [3u32, 4] {
            let b = Ball::build(
                &LatticeClass::standard(r),
                n,
                &f,
                opts.budgets.vertex_budget,
            )?;
            let inner: Vec<usize> = (0..b.len()).filter(|&v| b.depth(v) <= n / 2).collect();
            for (i, &v) in inner.iter().enumerate() {
                for &w in &inner[i..] {
                    let d_ed = distance(b.class(v), b.class(w), &f);
                    let d_bfs = bfs_distance(&b, v, w)?;
                    ensure!(d_ed == d_bfs, "(r,q)=({r},{q}) N={n}: vertices {v},{w} have distance {d_ed} vs BFS {d_bfs}");
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} vertex pairs agree"))
}

// ---- criterion 4 ----

fn random_poly(rng: &mut ChaCha8Rng, f: &Fq, max_deg: usize) -> Poly {
    Poly::from_coeffs(
        (0..=max_deg)
            .map(|_| Fe(rng.gen_range(0..f.q()) as u16))
            .collect(),
    )
}

fn random_nonzero_poly(rng: &mut ChaCha8Rng, f: &Fq, max_deg: usize) -> Poly {
    loop {
        let p = random_poly(rng, f, max_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A nontrivial product of elementary matrices `1 + f a E_ij`.
fn random_level_element(rng: &mut ChaCha8Rng, lv: &Level, f: &Fq) -> KMat {
    let r = lv.rank();
    loop {
        let mut g = KMat::identity(r);
        for _ in 0..rng.gen_range(1..=4) {
            let i = rng.gen_range(0..r);
            let mut j = rng.gen_range(0..r - 1);
            if j >= i {
                j += 1;
            }
            let a = random_nonzero_poly(rng, f, 2).mul(lv.ideal(), f);
            let e = KMat::identity(r).add(&KMat::unit(r, i, j, RatK::from_poly(a)), f);
            g = e.mul(&g, f);
        }
        if !g.is_identity() {
            return g;
        }
    }
}

fn no_displacement(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Check {
    let mut moves = 0usize;
    let mut fixed = 0usize;
    for sw in &SWEEPS {
        let f = field(sw.q);
        let b = ball(&LatticeClass::standard(sw.r), sw.radius, &f)?;
        for lc in sw.levels {
            let lv = level(lc, sw.r, &f);
            for _ in 0..100 {
                let g = random_level_element(rng, &lv, &f);
                for v in 0..b.len() {
                    let c = b.class(v);
                    let img = canonical_class(&g.mul(c.basis(), &f), &f)?;
                    let d = distance(c, &img, &f);
                    ensure!(
                        d != 1,
                        "an element of level ({}) moves vertex {v} to a neighbor",
                        poly_label(lc, &f)
                    );
                    ensure!(
                        img.vertex_type() == c.vertex_type(),
                        "type of vertex {v} changed"
                    );
                    if d == 0 {
                        fixed += 1;
                    }
                    moves += 1;
                }
            }
        }
    }
    Ok(format!("{moves} vertex images checked ({fixed} fixed)"))
}

// ---- criterion 5 ----

fn fixes(g: &KMat, c: &LatticeClass, f: &Fq) -> bool {
    canonical_class(&g.mul(c.basis(), f), f).is_ok_and(|img| &img == c)
}

fn vertexwise_stabilizers(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let mut checked = 0usize;
    for sw in &SWEEPS {
        let f = field(sw.q);
        let b = ball(&LatticeClass::standard(sw.r), sw.radius, &f)?;
        for lc in sw.levels {
            let lv = level(lc, sw.r, &f);
            for d in 1..b.rank() {
                for s in b.simplices(d) {
                    let cls = b.simplex_classes(s);
                    let hs = stab_space(&cls, &lv, &f);
                    let one = KMat::identity(sw.r);
                    for h in hs.basis() {
                        let g = one.add(h, &f);
                        ensure!(
                            cls.iter().all(|c| fixes(&g, c, &f)),
                            "basis element of H_{:?} moves a vertex",
                            s.0
                        );
                    }
                    // elements of the smallest vertex stabilizer fixing every vertex
                    let hv: Vec<StabilizerSpace> = cls
                        .iter()
                        .map(|c| stab_space(std::slice::from_ref(c), &lv, &f))
                        .collect();
                    let smallest = hv.iter().min_by_key(|h| h.dim()).expect("nonempty");
                    let common = enumerate_stab(smallest, &f, opts.budgets.enum_cap)?
                        .into_iter()
                        .filter(|g| cls.iter().all(|c| fixes(g.matrix(), c, &f)))
                        .count();
                    ensure!(
                        common as u128 == crate::congruence::stab_order(&hs),
                        "simplex {:?}: intersection has {common} elements, H_s has {}",
                        s.0,
                        crate::congruence::stab_order(&hs)
                    );
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} simplex stabilizers equal the intersection over their vertices"
    ))
}

// ---- criterion 6 ----

fn fixed_space_properness(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let (mut unstable, mut total) = (0usize, 0usize);
    for sw in &SWEEPS {
        let f = field(sw.q);
        let b = ball(&LatticeClass::standard(sw.r), sw.radius, &f)?;
        for lc in sw.levels {
            let lv = level(lc, sw.r, &f);
            for s in all_simplices(&b) {
                total += 1;
                let h = stab_space(&b.simplex_classes(s), &lv, &f);
                if h.dim() == 0 {
                    continue;
                }
                unstable += 1;
                let w = fixed_space(&h, &f);
                ensure!(
                    w.dim() > 0 && w.dim() < sw.r,
                    "fixed space of {:?} has dimension {}",
                    s.0,
                    w.dim()
                );
            }
        }
    }
    ensure!(unstable > 0, "no unstable simplices in the sweep");
    Ok(format!(
        "{unstable} of {total} simplices unstable, all with proper nonzero fixed spaces"
    ))
}

// ---- criterion 7 ----

fn random_w1(rng: &mut ChaCha8Rng, r: usize, k: usize, f: &Fq) -> SubspaceK {
    loop {
        let vs: Vec<Vec<RatK>> = (0..k)
            .map(|_| {
                (0..r)
                    .map(|_| RatK::from_poly(random_poly(rng, f, 1)))
                    .collect()
            })
            .collect();
        let w = SubspaceK::span(r, &vs, f);
        if w.dim() == k {
            return w;
        }
    }
}

fn random_lattice(rng: &mut ChaCha8Rng, r: usize, f: &Fq) -> Lattice {
    loop {
        let m = KMat::from_fn(r, r, |_, _| RatK::from_poly(random_poly(rng, f, 2)));
        if !m.det(f).is_zero() {
            let m = m.mul_varpi(rng.gen_range(-1..=1), f);
            return Lattice::from_basis(&m, f).expect("invertible");
        }
    }
}

fn contraction_laws(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Check {
    let mut absorbed = 0usize;
    let mut inputs = 0usize;
    for (q, r) in [(2u32, 2usize), (2, 3)] {
        let f = field(q);
        let lv = level(T, r, &f);
        for k in 1..r {
            let sd = SigmaData::new(random_w1(rng, r, k, &f), &f)?;
            for _ in 0..100 {
                let lq = random_lattice(rng, r - k, &f);
                let e = epsilon(&lq, &sd, &lv, &f);
                let e_shift = epsilon(&lq.scale_varpi(-1, &f), &sd, &lv, &f);
                ensure!(e_shift == e + 1, "epsilon shift law: {e} then {e_shift}");
                let l = beta(&lq, &sd, &lv, &f);
                ensure!(
                    in_b_sigma(&[l.class(&f)], &sd, &lv, &f),
                    "beta(L') is not in B(W)_sigma"
                );
                let thr = absorption_threshold(&l, &sd, &lv, &f);
                let n = thr + rng.gen_range(-2..=3);
                ensure!(
                    g_map_keeps_stabilizers(&l, n, &sd, &lv, &f)?,
                    "stabilizer inclusion fails for G_{n}"
                );
                let g = g_map(&l, n, &sd, &lv, &f)?;
                ensure!(g.contains(&l, &f), "G_n(L) does not contain L");
                if n <= thr {
                    ensure!(g == l, "G_{n}(L) differs from L below the threshold {thr}");
                    absorbed += 1;
                } else {
                    ensure!(g != l, "G_{n}(L) equals L above the threshold {thr}");
                }
                inputs += 1;
            }
        }
    }
    Ok(format!(
        "{inputs} random inputs; {absorbed} below the absorption threshold"
    ))
}

// ---- criteria 8 and 9 ----

fn integrity_configs() -> Vec<(u32, usize, u32, &'static [u32])> {
    let mut v = Vec::new();
    for sw in &SWEEPS {
        for lc in sw.levels {
            v.push((sw.q, sw.r, sw.radius, *lc));
        }
    }
    v.push((2, 2, 3, T));
    v.push((2, 2, 4, T_PLUS_1));
    v.push((2, 3, 3, T));
    v
}

fn complex_integrity(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let mut n = 0;
    for (q, r, radius, lc) in integrity_configs() {
        let f = field(q);
        let b = ball(&LatticeClass::standard(r), radius, &f)?;
        let lv = level(lc, r, &f);
        let data = LevelData::compute(&b, &lv, &f)?;
        let full = full_complex(&b, false)?;
        let un = unstable_complex(&b, &data, false)?;
        unstable_complex(&b, &data, true)?;
        full_complex(&b, true)?;
        // cokernel and direct constructions are compared inside
        let st = stable_complex(&b, &data)?;
        let (cf, cu, cs) = (
            full.euler_characteristic(),
            un.euler_characteristic(),
            st.complex.euler_characteristic(),
        );
        ensure!(
            cf == cu + cs,
            "chi additivity fails for (r,q)=({r},{q}) N={radius}: {cf} != {cu} + {cs}"
        );
        let hs = homology(&st.complex)?;
        let hu = homology(&un)?;
        let hf = homology(&full)?;
        ensure!(
            hf.euler_characteristic() == hu.euler_characteristic() + hs.euler_characteristic(),
            "homological chi additivity fails"
        );
        n += 1;
    }
    Ok(format!(
        "{n} configurations: d^2 = 0, both stable constructions agree, chi additive"
    ))
}

fn ball_contractibility(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let mut n = 0;
    for (q, r, radius) in [
        (2u32, 2usize, 1u32),
        (2, 2, 2),
        (2, 2, 3),
        (2, 2, 4),
        (3, 2, 4),
        (2, 3, 1),
        (2, 3, 2),
        (2, 3, 3),
    ] {
        let f = field(q);
        let b = Ball::build(
            &LatticeClass::standard(r),
            radius,
            &f,
            opts.budgets.vertex_budget,
        )?;
        let h = homology(&full_complex(&b, true)?)?;
        ensure!(
            h.is_acyclic(),
            "reduced homology of the (r,q)=({r},{q}) N={radius} ball is nonzero: {:?}",
            h.degree
        );
        n += 1;
    }
    Ok(format!("{n} balls have vanishing reduced homology"))
}

// ---- criterion 10 ----

fn rank2_forest(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let mut comps = 0usize;
    for q in [2u32, 3] {
        let f = field(q);
        let b = ball(&LatticeClass::standard(2), 4, &f)?;
        for lc in [T, T_PLUS_1] {
            let lv = level(lc, 2, &f);
            let data = LevelData::compute(&b, &lv, &f)?;
            let rep = components(&b, &data, &f)?;
            ensure!(
                rep.forest == Some(true),
                "unstable subgraph has a cycle at q={q}, ({})",
                poly_label(lc, &f)
            );
            let h = homology(&unstable_complex(&b, &data, false)?)?;
            ensure!(
                h.betti(1) == 0,
                "unstable subgraph has first betti number {}",
                h.betti(1)
            );
            ensure!(
                h.betti(0) as usize == rep.components.len(),
                "component count disagrees with H_0"
            );
            for c in &rep.components {
                ensure!(
                    c.fixed_space.dim() == 1,
                    "component at {:?} has fixed space of dimension {}",
                    c.vertices,
                    c.fixed_space.dim()
                );
            }
            comps += rep.components.len();
        }
    }
    Ok(format!(
        "{comps} components, all trees with a common fixed line"
    ))
}

// ---- criterion 11 ----

fn restriction_chain_map(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    let f = field(2);
    let b = ball(&LatticeClass::standard(2), 2, &f)?;
    let fine_lv = level(T_SQUARED, 2, &f);
    let coarse_lv = level(T, 2, &f);
    let fine_data = LevelData::compute(&b, &fine_lv, &f)?;
    let coarse_data = LevelData::compute(&b, &coarse_lv, &f)?;
    let fine = stable_complex(&b, &fine_data)?;
    let coarse = stable_complex(&b, &coarse_data)?;
    let map = restriction_map(&fine, &fine_lv, &coarse, &coarse_lv, &f)?;
    let mut killed = 0usize;
    for d in 0..b.rank() {
        let m = &map.matrices[d];
        let mut hit = vec![false; m.rows()];
        for (j, s) in fine.complex.generators[d].iter().enumerate() {
            let k = b
                .simplices(d)
                .iter()
                .position(|x| x == s)
                .expect("ball simplex");
            let col = m.column(j);
            if coarse_data.is_unstable(d, k) {
                ensure!(col.is_empty(), "coarse-unstable {:?} is not killed", s.0);
                killed += 1;
            } else {
                ensure!(
                    col.len() == 1 && col[0].1 == 1,
                    "coarse-stable {:?} is not sent to itself",
                    s.0
                );
                ensure!(
                    coarse.complex.generators[d][col[0].0] == *s,
                    "label mismatch for {:?}",
                    s.0
                );
                hit[col[0].0] = true;
            }
        }
        ensure!(
            hit.iter().all(|&h| h),
            "restriction misses coarse generators in degree {d}"
        );
    }
    // the vertex diag(t, 1)
    let v = b
        .id_of(&Lattice::diagonal(&[-1, 0]).class(&f))
        .expect("in ball");
    let k = b
        .simplices(0)
        .iter()
        .position(|s| s.0 == vec![v])
        .expect("vertex");
    ensure!(
        !fine_data.is_unstable(0, k) && coarse_data.is_unstable(0, k),
        "diag(t,1) stability differs from expectation"
    );
    let wrong_way = restriction_map(&coarse, &coarse_lv, &fine, &fine_lv, &f);
    ensure!(
        matches!(wrong_way, Err(Error::LevelContainment(_))),
        "restriction from a coarser level was accepted"
    );
    Ok(format!("chain map verified; {killed} generators killed"))
}

// ---- criterion 12 ----

fn enumeration_census(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Check {
    for (q, r, expected) in [(2u32, 2usize, 3usize), (3, 2, 4), (2, 3, 14)] {
        let f = field(q);
        let gauss: u64 = (1..r as u32)
            .map(|k| gaussian_binomial(r as u32, k, q as u64))
            .sum();
        let n = neighbors(&LatticeClass::standard(r), &f).len();
        ensure!(
            n == expected && n as u64 == gauss,
            "(r,q)=({r},{q}): {n} neighbors, expected {expected} = {gauss}"
        );
    }
    let f = field(2);
    let b = ball(&LatticeClass::standard(3), 2, &f)?;
    let chambers = b.simplices(2);
    for v in (0..b.len()).filter(|&v| b.depth(v) <= 1) {
        let through = chambers.iter().filter(|s| s.0.contains(&v)).count();
        ensure!(through == 21, "{through} chambers through vertex {v}");
    }
    for s in chambers {
        let types: BTreeSet<usize> = s.0.iter().map(|&v| b.vertex_type(v)).collect();
        ensure!(types.len() == 3, "chamber {:?} misses a type", s.0);
    }
    Ok(format!(
        "neighbor counts 3/4/14; 21 chambers per inner vertex; {} chambers carry all types",
        chambers.len()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers() {
        assert!(is_power_of(1, 2) && is_power_of(8, 2) && is_power_of(27, 3));
        assert!(!is_power_of(6, 2) && !is_power_of(0, 2));
    }

    #[test]
    fn names_are_unique() {
        let cs = criteria();
        let names: BTreeSet<_> = cs.iter().map(|c| c.name).collect();
        assert_eq!(names.len(), 12);
    }
}
