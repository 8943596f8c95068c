//! Connected components of the unstable subcomplex.

use serde_json::json;

use super::{LevelData, TRUNCATION_CAPTION};
use crate::algebra::{Fq, KMat};
use crate::building::{Ball, Simplex};
use crate::congruence::{common_kernel, SubspaceK};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<Simplex>,
    /// Number of unstable simplices per dimension.
    pub simplex_counts: Vec<usize>,
    /// Intersection of the fixed spaces of all its simplices.
    pub fixed_space: SubspaceK,
    /// Some vertex lies on the outer sphere of the ball, so the component may
    /// continue outside it.
    pub touches_boundary: bool,
}

impl Component {
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }
}

#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub radius: u32,
    pub components: Vec<Component>,
    /// Only decided for rank 2, where the unstable subcomplex is a graph.
    pub forest: Option<bool>,
}

impl ComponentReport {
    pub fn to_json(&self) -> serde_json::Value {
        let comps: Vec<_> = self
            .components
            .iter()
            .map(|c| {
                json!({
                    "vertices": c.vertices,
                    "edges": c.edges,
                    "simplex_counts": c.simplex_counts,
                    "fixed_space": c.fixed_space.to_json(),
                    "touches_boundary": c.touches_boundary,
                })
            })
            .collect();
        json!({
            "radius": self.radius,
            "count": self.components.len(),
            "forest": self.forest,
            "components": comps,
            "caption": TRUNCATION_CAPTION,
        })
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Components of the unstable 1-skeleton, listed by smallest vertex id.
pub fn components(b: &Ball, data: &LevelData, f: &Fq) -> Result<ComponentReport> {
    let r = b.rank();
    let mut parent: Vec<usize> = (0..b.len()).collect();
    let unstable_vertex: Vec<bool> = {
        let mut u = vec![false; b.len()];
        for (k, s) in b.simplices(0).iter().enumerate() {
            u[s.0[0]] = data.is_unstable(0, k);
        }
        u
    };
    if r > 1 {
        for (k, e) in b.simplices(1).iter().enumerate() {
            if data.is_unstable(1, k) {
                let (a, c) = (find(&mut parent, e.0[0]), find(&mut parent, e.0[1]));
                if a != c {
                    parent[a.max(c)] = a.min(c);
                }
            }
        }
    }
    let mut comp_of = vec![usize::MAX; b.len()];
    let mut comps: Vec<(Vec<usize>, Vec<Simplex>, Vec<usize>, Vec<KMat>)> = Vec::new();
    for v in 0..b.len() {
        if !unstable_vertex[v] {
            continue;
        }
        let root = find(&mut parent, v);
        if comp_of[root] == usize::MAX {
            comp_of[root] = comps.len();
            comps.push((Vec::new(), Vec::new(), vec![0; r], Vec::new()));
        }
        comps[comp_of[root]].0.push(v);
    }
    for d in 0..r {
        for (k, s) in b.simplices(d).iter().enumerate() {
            if !data.is_unstable(d, k) {
                continue;
            }
            let c = &mut comps[comp_of[find(&mut parent, s.0[0])]];
            c.2[d] += 1;
            if d == 1 {
                c.1.push(s.clone());
            }
            c.3.extend(data.stabilizers[d][k].basis().iter().cloned());
        }
    }
    let components: Vec<Component> = comps
        .into_iter()
        .map(|(vertices, edges, simplex_counts, mats)| Component {
            touches_boundary: vertices.iter().any(|&v| b.depth(v) == b.radius()),
            fixed_space: common_kernel(r, &mats, f),
            vertices,
            edges,
            simplex_counts,
        })
        .collect();
    let forest = (r == 2).then(|| components.iter().all(Component::is_tree));
    Ok(ComponentReport {
        radius: b.radius(),
        components,
        forest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::building::ball;
    use crate::congruence::Level;
    use crate::lattice::LatticeClass;

    #[test]
    fn tree_components_have_fixed_lines() {
        let f = Fq::of_order(2).unwrap();
        let b = ball(&LatticeClass::standard(2), 3, &f).unwrap();
        let lv = Level::new(Poly::t(), 2, &f).unwrap();
        let data = LevelData::compute(&b, &lv, &f).unwrap();
        let rep = components(&b, &data, &f).unwrap();
        assert_eq!(rep.forest, Some(true));
        assert!(!rep.components.is_empty());
        for c in &rep.components {
            assert!(c.fixed_space.dim() >= 1);
        }
    }
}
