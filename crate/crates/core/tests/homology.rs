use ffbt_core::algebra::{Fq, Poly};
use ffbt_core::building::{ball, Ball};
use ffbt_core::congruence::{Level, SubspaceK};
use ffbt_core::homology::{
    components, full_complex, homology, restriction_map, stable_complex, unstable_complex,
    HomologyResult, LevelData,
};
use ffbt_core::lattice::{Lattice, LatticeClass};

fn setup(q: u32, r: usize, radius: u32) -> (Fq, Ball) {
    let f = Fq::of_order(q).unwrap();
    let b = ball(&LatticeClass::standard(r), radius, &f).unwrap();
    (f, b)
}

fn lv(c: &[u32], r: usize, f: &Fq) -> Level {
    Level::new(Poly::from_indices(c, f).unwrap(), r, f).unwrap()
}

fn vertex(b: &Ball, exps: &[i64], f: &Fq) -> usize {
    b.id_of(&Lattice::diagonal(exps).class(f)).unwrap()
}

#[test]
fn n1_ranks() {
    let (_, b) = setup(2, 2, 1);
    assert_eq!(full_complex(&b, false).unwrap().ranks(), vec![4, 3]);
}

#[test]
fn d_squared_rank3() {
    let (_, b) = setup(2, 3, 2);
    let c = full_complex(&b, true).unwrap();
    c.check_d_squared().unwrap();
    assert!(homology(&c).unwrap().is_acyclic());
}

#[test]
fn unstable_empty_at_t_cubed() {
    let (f, b) = setup(2, 2, 1);
    let data = LevelData::compute(&b, &lv(&[0, 0, 0, 1], 2, &f), &f).unwrap();
    let c = unstable_complex(&b, &data, false).unwrap();
    assert!(c.ranks().iter().all(|&n| n == 0));
    let rep = components(&b, &data, &f).unwrap();
    assert!(rep.components.is_empty());
}

#[test]
fn unstable_at_t_contains_diagonal_chain() {
    let (f, b) = setup(2, 2, 2);
    let data = LevelData::compute(&b, &lv(&[0, 1], 2, &f), &f).unwrap();
    let c = unstable_complex(&b, &data, false).unwrap();
    let (v1, v2) = (vertex(&b, &[-1, 0], &f), vertex(&b, &[-2, 0], &f));
    assert!(c.generators[0].iter().any(|s| s.0 == vec![v1]));
    assert!(c.generators[0].iter().any(|s| s.0 == vec![v2]));
    assert!(c.generators[1]
        .iter()
        .any(|s| s.0.contains(&v1) && s.0.contains(&v2)));
    let dims: Vec<usize> = [vec![v1], vec![v2]]
        .iter()
        .map(|s| {
            let k = b.simplices(0).iter().position(|x| &x.0 == s).unwrap();
            data.stabilizers[0][k].dim()
        })
        .collect();
    assert_eq!(dims, vec![1, 2]);
}

#[test]
fn stable_edge_at_l0() {
    let (f, b) = setup(2, 2, 2);
    let data = LevelData::compute(&b, &lv(&[0, 1], 2, &f), &f).unwrap();
    let st = stable_complex(&b, &data).unwrap();
    let l0 = b.id_of(&LatticeClass::standard(2)).unwrap();
    let v1 = vertex(&b, &[-1, 0], &f);
    let c = &st.complex;
    let e = c.generators[1]
        .iter()
        .position(|s| s.0 == vec![l0, v1])
        .unwrap();
    let row = c.generators[0]
        .iter()
        .position(|s| s.0 == vec![l0])
        .unwrap();
    assert_eq!(c.boundaries[1].column(e), &[(row, -1)]);
}

#[test]
fn fully_stable_matches_full_boundary() {
    // level t^3 on the radius-1 ball: nothing is unstable
    let (f, b) = setup(2, 2, 1);
    let data = LevelData::compute(&b, &lv(&[0, 0, 0, 1], 2, &f), &f).unwrap();
    let st = stable_complex(&b, &data).unwrap();
    let full = full_complex(&b, false).unwrap();
    assert_eq!(st.complex.boundaries, full.boundaries);
}

#[test]
fn chi_additivity_and_json_schema() {
    let (f, b) = setup(2, 2, 2);
    let data = LevelData::compute(&b, &lv(&[0, 1], 2, &f), &f).unwrap();
    let full = full_complex(&b, false).unwrap();
    let un = unstable_complex(&b, &data, false).unwrap();
    let st = stable_complex(&b, &data).unwrap();
    assert_eq!(
        full.euler_characteristic(),
        un.euler_characteristic() + st.complex.euler_characteristic()
    );
    let h = homology(&full_complex(&b, true).unwrap()).unwrap();
    assert!(h.is_acyclic());
    let j = serde_json::to_value(&h).unwrap();
    assert_eq!(j["degree"]["-1"]["betti"], 0);
    assert_eq!(j["degree"]["0"]["torsion"], serde_json::json!([]));
    assert_eq!(j["meta"]["radius"], 2);
    assert_eq!(j["meta"]["augmented"], true);
    let back: HomologyResult = serde_json::from_value(j).unwrap();
    assert_eq!(back, h);
}

#[test]
fn component_fixed_line() {
    let (f, b) = setup(2, 2, 2);
    let data = LevelData::compute(&b, &lv(&[0, 1], 2, &f), &f).unwrap();
    let rep = components(&b, &data, &f).unwrap();
    let (v1, v2) = (vertex(&b, &[-1, 0], &f), vertex(&b, &[-2, 0], &f));
    let c = rep
        .components
        .iter()
        .find(|c| c.vertices.contains(&v1))
        .unwrap();
    assert!(c.vertices.contains(&v2));
    assert_eq!(c.fixed_space, SubspaceK::coordinate(2, &[0], &f));
    assert_eq!(rep.forest, Some(true));
    let j = rep.to_json();
    assert!(j["caption"].as_str().unwrap().contains("truncation"));
}

#[test]
fn restriction_kills_diag_t() {
    let (f, b) = setup(2, 2, 2);
    let (fine_lv, coarse_lv) = (lv(&[0, 0, 1], 2, &f), lv(&[0, 1], 2, &f));
    let fine = stable_complex(&b, &LevelData::compute(&b, &fine_lv, &f).unwrap()).unwrap();
    let coarse = stable_complex(&b, &LevelData::compute(&b, &coarse_lv, &f).unwrap()).unwrap();
    let map = restriction_map(&fine, &fine_lv, &coarse, &coarse_lv, &f).unwrap();
    let v1 = vertex(&b, &[-1, 0], &f);
    let j = fine.complex.generators[0]
        .iter()
        .position(|s| s.0 == vec![v1])
        .unwrap();
    assert!(map.matrices[0].column(j).is_empty());
    let l0 = b.id_of(&LatticeClass::standard(2)).unwrap();
    let j0 = fine.complex.generators[0]
        .iter()
        .position(|s| s.0 == vec![l0])
        .unwrap();
    assert_eq!(map.matrices[0].column(j0).len(), 1);
    assert!(restriction_map(&coarse, &coarse_lv, &fine, &fine_lv, &f).is_err());
}

// frozen after first computation; radius-truncated values
#[test]
fn stable_betti_fixtures() {
    for (q, coeffs, table) in [
        (2u32, &[0u32, 1][..], [2u64, 2, 8, 8]),
        (2, &[1, 1][..], [2, 2, 8, 8]),
        (3, &[0, 1][..], [3, 3, 27, 27]),
    ] {
        for (radius, &b1) in (1u32..).zip(table.iter()) {
            let (f, b) = setup(q, 2, radius);
            let data = LevelData::compute(&b, &lv(coeffs, 2, &f), &f).unwrap();
            let h = homology(&stable_complex(&b, &data).unwrap().complex).unwrap();
            assert_eq!(h.betti(0), 0);
            assert_eq!(h.betti(1), b1, "q={q} N={radius}");
            // long exact sequence with a contractible ball
            let comps = components(&b, &data, &f).unwrap().components.len() as u64;
            assert_eq!(b1 + 1, comps);
        }
    }
}
