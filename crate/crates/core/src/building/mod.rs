//! Finite windows onto the building: neighbors, balls, simplices.

pub mod export;
pub mod subspace;

use std::collections::{BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Fq, KMat, RatK};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeClass};

pub use export::{export, BallJson, BallParams, ExportFormat};
pub use subspace::{gaussian_binomial, proper_subspaces, Subspace};

/// Vertex ids of a simplex, sorted by vertex type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(pub Vec<usize>);

impl Simplex {
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Faces obtained by deleting one vertex, `j`-th face omits position `j`.
    pub fn faces(&self) -> Vec<Simplex> {
        (0..self.0.len())
            .map(|j| {
                let mut v = self.0.clone();
                v.remove(j);
                Simplex(v)
            })
            .collect()
    }
}

/// The lattice `varpi L + B V` for a subspace `V` of `L / varpi L`.
fn sublattice(l: &Lattice, v: &Subspace, f: &Fq) -> Lattice {
    let r = l.rank();
    let b = l.basis();
    let lifted: Vec<Vec<RatK>> = v
        .rows
        .iter()
        .map(|row| {
            let coeffs: Vec<RatK> = row.iter().map(|&c| RatK::constant(c)).collect();
            b.mul_vec(&coeffs, f)
        })
        .collect();
    let gens = KMat::from_columns(r, &lifted).hstack(&b.mul_varpi(1, f));
    Lattice::from_basis(&gens, f).expect("sublattice has full rank")
}

/// Neighbor classes of `v`, one per proper nonzero subspace of `L / varpi L`
/// in [`proper_subspaces`] order.
pub fn neighbors(v: &LatticeClass, f: &Fq) -> Vec<LatticeClass> {
    let subs = proper_subspaces(v.rank(), f);
    neighbors_with(v, &subs, f)
}

fn neighbors_with(v: &LatticeClass, subs: &[Subspace], f: &Fq) -> Vec<LatticeClass> {
    subs.iter()
        .map(|s| sublattice(v.lattice(), s, f).class(f))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    r: usize,
    radius: u32,
    classes: Vec<LatticeClass>,
    types: Vec<usize>,
    depth: Vec<u32>,
    index: HashMap<LatticeClass, usize>,
    adjacency: Vec<Vec<usize>>,
    simplices: Vec<Vec<Simplex>>,
}

pub const DEFAULT_VERTEX_BUDGET: usize = 200_000;

impl Ball {
    /// BFS closure of radius `radius` around `center`. Vertex ids follow BFS
    /// layers; each layer is sorted by canonical form.
    pub fn build(center: &LatticeClass, radius: u32, f: &Fq, vertex_budget: usize) -> Result<Ball> {
        let r = center.rank();
        let subs = proper_subspaces(r, f);
        let mut classes = vec![center.clone()];
        let mut depth = vec![0u32];
        let mut index: HashMap<LatticeClass, usize> = HashMap::from([(center.clone(), 0)]);
        // neighbor lists by subspace index, filled for every vertex
        let mut nbr_classes: Vec<Vec<LatticeClass>> = Vec::new();
        let mut layer: Vec<usize> = vec![0];
        for d in 0..=radius {
            let computed: Vec<Vec<LatticeClass>> = layer
                .par_iter()
                .map(|&v| neighbors_with(&classes[v], &subs, f))
                .collect();
            nbr_classes.extend(computed);
            if d == radius {
                break;
            }
            let start = nbr_classes.len() - layer.len();
            let fresh: BTreeSet<&LatticeClass> = nbr_classes[start..]
                .iter()
                .flatten()
                .filter(|c| !index.contains_key(*c))
                .collect();
            let fresh: Vec<LatticeClass> = fresh.into_iter().cloned().collect();
            if classes.len() + fresh.len() > vertex_budget {
                return Err(Error::BudgetExceeded {
                    what: "ball vertices",
                    value: (classes.len() + fresh.len()) as u128,
                    limit: vertex_budget as u128,
                });
            }
            layer = Vec::with_capacity(fresh.len());
            for c in fresh {
                let id = classes.len();
                index.insert(c.clone(), id);
                classes.push(c);
                depth.push(d + 1);
                layer.push(id);
            }
        }
        let nbr_ids: Vec<Vec<Option<usize>>> = nbr_classes
            .iter()
            .map(|ns| ns.iter().map(|c| index.get(c).copied()).collect())
            .collect();
        let adjacency: Vec<Vec<usize>> = nbr_ids
            .iter()
            .map(|ns| {
                let mut a: Vec<usize> = ns.iter().flatten().copied().collect();
                a.sort_unstable();
                a
            })
            .collect();
        let types: Vec<usize> = classes.iter().map(LatticeClass::vertex_type).collect();
        let simplices = enumerate_simplices(r, &subs, &nbr_ids, &types, f);
        Ok(Ball {
            r,
            radius,
            classes,
            types,
            depth,
            index,
            adjacency,
            simplices,
        })
    }

    /// Reassembles a ball from stored parts, validating the simplex tables.
    pub(crate) fn from_parts(
        r: usize,
        radius: u32,
        classes: Vec<LatticeClass>,
        simplices: Vec<Vec<Simplex>>,
    ) -> Result<Ball> {
        let index: HashMap<LatticeClass, usize> = classes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        if index.len() != classes.len() {
            return Err(Error::Parse("duplicate vertex classes".into()));
        }
        let mut adjacency = vec![Vec::new(); classes.len()];
        for e in simplices.get(1).into_iter().flatten() {
            let (a, b) = (e.0[0], e.0[1]);
            if a >= classes.len() || b >= classes.len() {
                return Err(Error::Parse("edge endpoint out of range".into()));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        let types = classes.iter().map(LatticeClass::vertex_type).collect();
        // depth from vertex 0 through the stored edges
        let mut depth = vec![u32::MAX; classes.len()];
        let mut queue = VecDeque::from([0usize]);
        if !classes.is_empty() {
            depth[0] = 0;
        }
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if depth[w] == u32::MAX {
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let ball = Ball {
            r,
            radius,
            classes,
            types,
            depth,
            index,
            adjacency,
            simplices,
        };
        for d in 0..ball.simplices.len() {
            for s in &ball.simplices[d] {
                ball.validate_simplex(s)?;
            }
        }
        Ok(ball)
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn center(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, v: usize) -> &LatticeClass {
        &self.classes[v]
    }

    pub fn classes(&self) -> &[LatticeClass] {
        &self.classes
    }

    pub fn vertex_type(&self, v: usize) -> usize {
        self.types[v]
    }

    /// BFS layer of `v`, i.e. its distance from the center.
    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn id_of(&self, c: &LatticeClass) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn adjacent(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn are_adjacent(&self, v: usize, w: usize) -> bool {
        self.adjacency[v].binary_search(&w).is_ok()
    }

    /// Stored `d`-simplices; empty for `d >= r`.
    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.simplices.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn simplex_classes(&self, s: &Simplex) -> Vec<LatticeClass> {
        s.0.iter().map(|&v| self.classes[v].clone()).collect()
    }

    /// Simplex on the given classes if all of them lie in the ball.
    pub fn find_simplex(&self, classes: &[LatticeClass]) -> Option<Simplex> {
        let mut ids: Vec<usize> = classes
            .iter()
            .map(|c| self.id_of(c))
            .collect::<Option<_>>()?;
        ids.sort_by_key(|&v| self.types[v]);
        let s = Simplex(ids);
        self.simplices(s.dim())
            .binary_search_by(|x| sort_key(x).cmp(&sort_key(&s)))
            .ok()?;
        Some(s)
    }

    pub fn validate_simplex(&self, s: &Simplex) -> Result<()> {
        let v = &s.0;
        if v.is_empty() || v.len() > self.r {
            return Err(Error::Parse(format!(
                "simplex of size {} in rank {}",
                v.len(),
                self.r
            )));
        }
        for (k, &a) in v.iter().enumerate() {
            if a >= self.classes.len() {
                return Err(Error::Parse(format!("vertex {a} out of range")));
            }
            for &b in &v[k + 1..] {
                if b >= self.classes.len()
                    || self.types[a] >= self.types[b]
                    || !self.are_adjacent(a, b)
                {
                    return Err(Error::Parse(format!("invalid simplex {v:?}")));
                }
            }
        }
        Ok(())
    }
}

/// Key ordering the simplex tables: the sorted vertex ids.
fn sort_key(s: &Simplex) -> Vec<usize> {
    let mut k = s.0.clone();
    k.sort_unstable();
    k
}

fn enumerate_simplices(
    r: usize,
    subs: &[Subspace],
    nbr_ids: &[Vec<Option<usize>>],
    types: &[usize],
    f: &Fq,
) -> Vec<Vec<Simplex>> {
    // strict containments between subspaces
    let above: Vec<Vec<usize>> = subs
        .iter()
        .map(|s| {
            (0..subs.len())
                .filter(|&t| subs[t].dim() > s.dim() && s.is_subspace_of(&subs[t], f))
                .collect()
        })
        .collect();
    let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); r];
    for (v, ns) in nbr_ids.iter().enumerate() {
        sets[0].insert(vec![v]);
        let mut stack: Vec<Vec<usize>> = (0..subs.len()).map(|s| vec![s]).collect();
        while let Some(chain) = stack.pop() {
            let ids: Option<Vec<usize>> = chain.iter().map(|&s| ns[s]).collect();
            let Some(mut ids) = ids else { continue };
            ids.push(v);
            ids.sort_unstable();
            sets[chain.len()].insert(ids);
            let last = *chain.last().expect("nonempty");
            for &t in &above[last] {
                let mut c = chain.clone();
                c.push(t);
                stack.push(c);
            }
        }
    }
    sets.into_iter()
        .map(|set| {
            set.into_iter()
                .map(|mut ids| {
                    ids.sort_by_key(|&v| types[v]);
                    Simplex(ids)
                })
                .collect()
        })
        .collect()
}

pub fn ball(center: &LatticeClass, radius: u32, f: &Fq) -> Result<Ball> {
    Ball::build(center, radius, f, DEFAULT_VERTEX_BUDGET)
}

pub fn simplices(b: &Ball, d: usize) -> &[Simplex] {
    b.simplices(d)
}

/// Shortest path length in the 1-skeleton of the ball.
pub fn bfs_distance(b: &Ball, v: usize, w: usize) -> Result<u64> {
    if v >= b.len() || w >= b.len() {
        return Err(Error::Domain("vertex not in ball".into()));
    }
    let mut dist = vec![u64::MAX; b.len()];
    dist[v] = 0;
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        if x == w {
            return Ok(dist[x]);
        }
        for &y in b.adjacent(x) {
            if dist[y] == u64::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    Err(Error::Unreachable)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbor_counts() {
        for (r, q, n) in [(2, 2, 3), (2, 3, 4), (3, 2, 14)] {
            let f = Fq::of_order(q).unwrap();
            let ns = neighbors(&LatticeClass::standard(r), &f);
            assert_eq!(ns.len(), n);
            let distinct: BTreeSet<_> = ns.iter().collect();
            assert_eq!(distinct.len(), n);
        }
    }

    #[test]
    fn small_tree_balls() {
        let f = Fq::of_order(2).unwrap();
        let l0 = LatticeClass::standard(2);
        let b0 = ball(&l0, 0, &f).unwrap();
        assert_eq!((b0.len(), b0.simplices(1).len()), (1, 0));
        let b1 = ball(&l0, 1, &f).unwrap();
        assert_eq!((b1.len(), b1.simplices(1).len()), (4, 3));
        let b2 = ball(&l0, 2, &f).unwrap();
        assert_eq!((b2.len(), b2.simplices(1).len()), (10, 9));
        assert!(b2.simplices(2).is_empty());
    }

    #[test]
    fn budget_enforced() {
        let f = Fq::of_order(2).unwrap();
        let err = Ball::build(&LatticeClass::standard(2), 3, &f, 5).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn chambers_at_a_vertex_rank_three() {
        let f = Fq::of_order(2).unwrap();
        let b = ball(&LatticeClass::standard(3), 1, &f).unwrap();
        let through_center = b.simplices(2).iter().filter(|s| s.0.contains(&0)).count();
        assert_eq!(through_center, 21);
        for s in b.simplices(2) {
            let types: Vec<usize> = s.0.iter().map(|&v| b.vertex_type(v)).collect();
            assert_eq!(types, vec![0, 1, 2]);
        }
    }

    #[test]
    fn bfs_distance_basics() {
        let f = Fq::of_order(2).unwrap();
        let b = ball(&LatticeClass::standard(2), 2, &f).unwrap();
        assert_eq!(bfs_distance(&b, 0, 0).unwrap(), 0);
        let n = b.adjacent(0)[0];
        assert_eq!(bfs_distance(&b, 0, n).unwrap(), 1);
        let far = Lattice::diagonal(&[-2, 0]).class(&f);
        assert_eq!(bfs_distance(&b, 0, b.id_of(&far).unwrap()).unwrap(), 2);
    }
}
