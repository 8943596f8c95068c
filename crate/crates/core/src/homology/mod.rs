//! Integer chain complexes of truncated balls, the unstable subcomplex, the
//! stable quotient, homology and level-restriction maps.
//!
//! All values computed here are for finite balls. They are truncations of the
//! corresponding infinite objects and are labeled with the ball radius.

pub mod components;

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{snf, Fq, IntMatrix};
use crate::building::{Ball, Simplex};
use crate::congruence::{stab_space, Level, StabilizerSpace};
use crate::error::{Error, Result};

pub use components::{components, Component, ComponentReport};

/// Caption attached to every reported quantity computed on a finite ball.
pub const TRUNCATION_CAPTION: &str =
    "values are computed on a finite ball and are truncations of the infinite complex";

/// Free chain complex with generators `C_d` for `d = 0..=top`.
///
/// `boundaries[d]` is `∂_d : C_d -> C_{d-1}`; `boundaries[0]` is the
/// augmentation `C_0 -> Z` when `augmented`, otherwise a `0 x n_0` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub generators: Vec<Vec<Simplex>>,
    pub boundaries: Vec<IntMatrix>,
    pub augmented: bool,
    pub radius: u32,
    pub level: Option<Vec<u32>>,
}

impl ChainComplex {
    pub fn rank(&self, d: usize) -> usize {
        self.generators.get(d).map_or(0, Vec::len)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.generators.iter().map(Vec::len).collect()
    }

    /// `sum (-1)^d rank C_d`, counting `C_{-1} = Z` when augmented.
    pub fn euler_characteristic(&self) -> i64 {
        let mut chi: i64 = self
            .generators
            .iter()
            .enumerate()
            .map(|(d, g)| {
                if d % 2 == 0 {
                    g.len() as i64
                } else {
                    -(g.len() as i64)
                }
            })
            .sum();
        if self.augmented {
            chi -= 1;
        }
        chi
    }

    /// Checks `∂_d ∘ ∂_{d+1} = 0` for all `d`.
    pub fn check_d_squared(&self) -> Result<()> {
        for d in 0..self.boundaries.len().saturating_sub(1) {
            let prod = self.boundaries[d].mul(&self.boundaries[d + 1])?;
            if !prod.is_zero() {
                return Err(Error::Internal(format!(
                    "boundary squared is nonzero in degree {}",
                    d + 1
                )));
            }
        }
        Ok(())
    }

    fn index(&self, d: usize) -> HashMap<&Simplex, usize> {
        self.generators[d]
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect()
    }
}

/// Boundary matrices for the given generator lists. Faces missing from the
/// previous list contribute zero. Signs follow the type order of vertices.
fn boundaries_for(generators: &[Vec<Simplex>], augmented: bool) -> Vec<IntMatrix> {
    let mut out = Vec::with_capacity(generators.len());
    let n0 = generators.first().map_or(0, Vec::len);
    out.push(if augmented {
        IntMatrix::from_triples(1, n0, (0..n0).map(|j| (0, j, 1))).expect("in range")
    } else {
        IntMatrix::zeros(0, n0)
    });
    for d in 1..generators.len() {
        let idx: HashMap<&Simplex, usize> = generators[d - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut triples = Vec::new();
        for (c, s) in generators[d].iter().enumerate() {
            for (j, face) in s.faces().iter().enumerate() {
                if let Some(&row) = idx.get(face) {
                    triples.push((row, c, if j % 2 == 0 { 1 } else { -1 }));
                }
            }
        }
        out.push(
            IntMatrix::from_triples(generators[d - 1].len(), generators[d].len(), triples)
                .expect("in range"),
        );
    }
    out
}

/// The complex of all simplices of the ball.
pub fn full_complex(b: &Ball, augmented: bool) -> Result<ChainComplex> {
    let generators: Vec<Vec<Simplex>> = (0..b.rank()).map(|d| b.simplices(d).to_vec()).collect();
    let c = ChainComplex {
        boundaries: boundaries_for(&generators, augmented),
        generators,
        augmented,
        radius: b.radius(),
        level: None,
    };
    c.check_d_squared()?;
    Ok(c)
}

/// Stabilizer spaces of every simplex of the ball at one level.
#[derive(Clone, Debug)]
pub struct LevelData {
    pub level: Level,
    pub stabilizers: Vec<Vec<StabilizerSpace>>,
}

impl LevelData {
    /// Computes all stabilizers (in parallel, order preserving) and checks that
    /// faces of unstable simplices are unstable.
    pub fn compute(b: &Ball, lv: &Level, f: &Fq) -> Result<LevelData> {
        let stabilizers: Vec<Vec<StabilizerSpace>> = (0..b.rank())
            .map(|d| {
                b.simplices(d)
                    .par_iter()
                    .map(|s| stab_space(&b.simplex_classes(s), lv, f))
                    .collect()
            })
            .collect();
        let data = LevelData {
            level: lv.clone(),
            stabilizers,
        };
        for d in 1..b.rank() {
            let prev: HashMap<&Simplex, usize> = b
                .simplices(d - 1)
                .iter()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();
            for (k, s) in b.simplices(d).iter().enumerate() {
                if !data.is_unstable(d, k) {
                    continue;
                }
                for face in s.faces() {
                    if !data.is_unstable(d - 1, prev[&face]) {
                        return Err(Error::Internal(format!(
                            "face {:?} of unstable simplex {:?} is stable",
                            face.0, s.0
                        )));
                    }
                }
            }
        }
        Ok(data)
    }

    pub fn is_unstable(&self, d: usize, k: usize) -> bool {
        self.stabilizers[d][k].dim() > 0
    }

    pub fn unstable_flags(&self) -> Vec<Vec<bool>> {
        self.stabilizers
            .iter()
            .map(|v| v.iter().map(|h| h.dim() > 0).collect())
            .collect()
    }
}

fn select_generators(b: &Ball, keep: &[Vec<bool>]) -> Vec<Vec<Simplex>> {
    (0..b.rank())
        .map(|d| {
            b.simplices(d)
                .iter()
                .zip(&keep[d])
                .filter(|(_, k)| **k)
                .map(|(s, _)| s.clone())
                .collect()
        })
        .collect()
}

/// The subcomplex of unstable simplices.
pub fn unstable_complex(b: &Ball, data: &LevelData, augmented: bool) -> Result<ChainComplex> {
    let generators = select_generators(b, &data.unstable_flags());
    let c = ChainComplex {
        boundaries: boundaries_for(&generators, augmented),
        generators,
        augmented,
        radius: b.radius(),
        level: Some(data.level.ideal().to_indices()),
    };
    c.check_d_squared()?;
    Ok(c)
}

/// The quotient of the full complex by the unstable subcomplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableComplex {
    pub complex: ChainComplex,
}

/// Builds the stable complex twice, as the cokernel of the inclusion of the
/// unstable subcomplex and directly with unstable faces set to zero, and
/// checks that the two agree.
pub fn stable_complex(b: &Ball, data: &LevelData) -> Result<StableComplex> {
    let flags = data.unstable_flags();
    let full = full_complex(b, false)?;
    let stable_idx: Vec<Vec<usize>> = flags
        .iter()
        .map(|v| (0..v.len()).filter(|&k| !v[k]).collect())
        .collect();
    let unstable_idx: Vec<Vec<usize>> = flags
        .iter()
        .map(|v| (0..v.len()).filter(|&k| v[k]).collect())
        .collect();

    // (a) cokernel presentation: keep stable rows and columns of the full boundary
    let mut coker = vec![IntMatrix::zeros(0, stable_idx[0].len())];
    for d in 1..b.rank() {
        let m = &full.boundaries[d];
        // inclusion is a chain map: boundaries of unstable simplices avoid stable faces
        let leak = m.select(&stable_idx[d - 1], &unstable_idx[d]);
        if !leak.is_zero() {
            return Err(Error::Internal(format!(
                "unstable boundary reaches stable faces in degree {d}"
            )));
        }
        coker.push(m.select(&stable_idx[d - 1], &stable_idx[d]));
    }

    // (b) direct construction from the face formula
    let generators = select_generators(
        b,
        &flags
            .iter()
            .map(|v| v.iter().map(|u| !u).collect())
            .collect::<Vec<_>>(),
    );
    let direct = boundaries_for(&generators, false);
    if direct != coker {
        return Err(Error::Internal(
            "cokernel and direct stable complexes differ".into(),
        ));
    }
    let c = ChainComplex {
        generators,
        boundaries: direct,
        augmented: false,
        radius: b.radius(),
        level: Some(data.level.ideal().to_indices()),
    };
    c.check_d_squared()?;
    // projection is a chain map: pi ∘ ∂_full = ∂_st ∘ pi
    for d in 1..b.rank() {
        let n_full_prev = full.rank(d - 1);
        let n_full = full.rank(d);
        let pi_prev = projection(&stable_idx[d - 1], n_full_prev);
        let pi = projection(&stable_idx[d], n_full);
        let lhs = pi_prev.mul(&full.boundaries[d])?;
        let rhs = c.boundaries[d].mul(&pi)?;
        if lhs != rhs {
            return Err(Error::Internal(format!(
                "projection is not a chain map in degree {d}"
            )));
        }
    }
    Ok(StableComplex { complex: c })
}

fn projection(keep: &[usize], n: usize) -> IntMatrix {
    IntMatrix::from_triples(
        keep.len(),
        n,
        keep.iter().enumerate().map(|(i, &k)| (i, k, 1)),
    )
    .expect("in range")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHomology {
    pub betti: u64,
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyMeta {
    pub radius: u32,
    pub level: Option<Vec<u32>>,
    pub augmented: bool,
    pub caption: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    /// Keyed by degree; degree `-1` appears for augmented complexes.
    pub degree: BTreeMap<i64, DegreeHomology>,
    pub meta: HomologyMeta,
}

impl HomologyResult {
    pub fn betti(&self, d: i64) -> u64 {
        self.degree.get(&d).map_or(0, |h| h.betti)
    }

    pub fn is_acyclic(&self) -> bool {
        self.degree
            .values()
            .all(|h| h.betti == 0 && h.torsion.is_empty())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degree
            .iter()
            .map(|(d, h)| {
                if d.rem_euclid(2) == 0 {
                    h.betti as i64
                } else {
                    -(h.betti as i64)
                }
            })
            .sum()
    }
}

/// Homology over `Z` via Smith normal forms of the boundary maps.
pub fn homology(c: &ChainComplex) -> Result<HomologyResult> {
    let snfs: Vec<crate::algebra::Snf> = c
        .boundaries
        .par_iter()
        .map(snf)
        .collect::<Result<Vec<_>>>()?;
    let top = c.generators.len();
    let mut degree = BTreeMap::new();
    let to_u64 = |x: &num_bigint::BigInt| x.to_u64().ok_or(Error::Overflow("torsion coefficient"));
    if c.augmented {
        degree.insert(
            -1,
            DegreeHomology {
                betti: 1 - snfs[0].rank as u64,
                torsion: snfs[0].torsion.iter().map(to_u64).collect::<Result<_>>()?,
            },
        );
    }
    for d in 0..top {
        let rank_out = snfs[d].rank;
        let (rank_in, torsion) = match snfs.get(d + 1) {
            Some(s) => (
                s.rank,
                s.torsion.iter().map(to_u64).collect::<Result<Vec<_>>>()?,
            ),
            None => (0, Vec::new()),
        };
        degree.insert(
            d as i64,
            DegreeHomology {
                betti: (c.rank(d) - rank_out - rank_in) as u64,
                torsion,
            },
        );
    }
    let res = HomologyResult {
        degree,
        meta: HomologyMeta {
            radius: c.radius,
            level: c.level.clone(),
            augmented: c.augmented,
            caption: TRUNCATION_CAPTION.to_string(),
        },
    };
    if res.euler_characteristic() != c.euler_characteristic() {
        return Err(Error::Internal("Euler characteristic mismatch".into()));
    }
    Ok(res)
}

/// Per-degree matrices of the restriction from a finer level's stable complex
/// to a coarser one's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub matrices: Vec<IntMatrix>,
}

/// Sends a fine-stable simplex to itself when it is also coarse-stable and to
/// zero otherwise; checks commutation with the boundaries.
pub fn restriction_map(
    fine: &StableComplex,
    fine_level: &Level,
    coarse: &StableComplex,
    coarse_level: &Level,
    f: &Fq,
) -> Result<ChainMap> {
    if !fine_level.contained_in(coarse_level, f) {
        return Err(Error::LevelContainment(format!(
            "({}) is not contained in ({})",
            fine_level.ideal(),
            coarse_level.ideal()
        )));
    }
    let (fc, cc) = (&fine.complex, &coarse.complex);
    if fc.radius != cc.radius || fc.generators.len() != cc.generators.len() {
        return Err(Error::Domain("complexes come from different balls".into()));
    }
    let mut matrices = Vec::with_capacity(fc.generators.len());
    for d in 0..fc.generators.len() {
        let idx = cc.index(d);
        let triples = fc.generators[d]
            .iter()
            .enumerate()
            .filter_map(|(j, s)| idx.get(s).map(|&i| (i, j, 1)));
        matrices.push(IntMatrix::from_triples(cc.rank(d), fc.rank(d), triples)?);
    }
    for d in 1..matrices.len() {
        let lhs = cc.boundaries[d].mul(&matrices[d])?;
        let rhs = matrices[d - 1].mul(&fc.boundaries[d])?;
        if lhs != rhs {
            return Err(Error::Internal(format!(
                "restriction is not a chain map in degree {d}"
            )));
        }
    }
    Ok(ChainMap { matrices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::building::ball;
    use crate::lattice::LatticeClass;

    #[test]
    fn three_cycle_homology() {
        let gens = vec![
            vec![Simplex(vec![0]), Simplex(vec![1]), Simplex(vec![2])],
            vec![
                Simplex(vec![0, 1]),
                Simplex(vec![1, 2]),
                Simplex(vec![0, 2]),
            ],
        ];
        let c = ChainComplex {
            boundaries: boundaries_for(&gens, false),
            generators: gens,
            augmented: false,
            radius: 0,
            level: None,
        };
        c.check_d_squared().unwrap();
        let h = homology(&c).unwrap();
        assert_eq!((h.betti(0), h.betti(1)), (1, 1));
    }

    #[test]
    fn small_tree_counts_and_signs() {
        let f = Fq::of_order(2).unwrap();
        let b = ball(&LatticeClass::standard(2), 1, &f).unwrap();
        let c = full_complex(&b, true).unwrap();
        assert_eq!(c.ranks(), vec![4, 3]);
        let e = &b.simplices(1)[0];
        let col: Vec<(usize, i64)> = c.boundaries[1].column(0).to_vec();
        let row_of = |v: usize| b.simplices(0).iter().position(|s| s.0 == vec![v]).unwrap();
        let mut expect = vec![(row_of(e.0[1]), 1), (row_of(e.0[0]), -1)];
        expect.sort();
        assert_eq!(col, expect);
        assert!(homology(&c).unwrap().is_acyclic());
    }

    #[test]
    fn stable_edges_with_one_unstable_end() {
        let f = Fq::of_order(2).unwrap();
        let b = ball(&LatticeClass::standard(2), 2, &f).unwrap();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        let data = LevelData::compute(&b, &lv, &f).unwrap();
        let st = stable_complex(&b, &data).unwrap();
        let c = &st.complex;
        let mut seen = 0;
        for (k, e) in c.generators[1].iter().enumerate() {
            let stable_ends: Vec<usize> = (0..2)
                .filter(|&j| c.generators[0].contains(&Simplex(vec![e.0[1 - j]])))
                .collect();
            let col = c.boundaries[1].column(k);
            assert_eq!(col.len(), stable_ends.len());
            if stable_ends.len() == 1 {
                seen += 1;
                let j = stable_ends[0];
                assert_eq!(col[0].1, if j == 0 { 1 } else { -1 });
            }
        }
        assert!(seen > 0);
    }
}
