//! DOT and JSON serialization of balls.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{sort_key, Ball, Simplex};
use crate::algebra::Fq;
use crate::error::{Error, Result};
use crate::lattice::{LatticeClass, LatticeClassRepr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallParams {
    pub p: u32,
    pub n: u32,
    pub r: usize,
    pub ideal: Option<Vec<u32>>,
    pub radius: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub class: LatticeClassRepr,
    #[serde(rename = "type")]
    pub vtype: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallJson {
    pub params: BallParams,
    pub vertices: Vec<VertexJson>,
    pub simplices: BTreeMap<String, Vec<Simplex>>,
}

impl Ball {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph ball {\n");
        for v in 0..self.len() {
            let _ = writeln!(s, "  {v} [label=\"{v}:{}\"];", self.vertex_type(v));
        }
        for e in self.simplices(1) {
            let _ = writeln!(s, "  {} -- {};", e.0[0], e.0[1]);
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, f: &Fq, ideal: Option<Vec<u32>>) -> BallJson {
        BallJson {
            params: BallParams {
                p: f.p(),
                n: f.n(),
                r: self.rank(),
                ideal,
                radius: self.radius(),
            },
            vertices: (0..self.len())
                .map(|v| VertexJson {
                    id: v,
                    class: self.class(v).to_repr(f),
                    vtype: self.vertex_type(v),
                })
                .collect(),
            simplices: (0..self.rank())
                .map(|d| (d.to_string(), self.simplices(d).to_vec()))
                .collect(),
        }
    }

    pub fn from_json(j: &BallJson, f: &Fq) -> Result<Ball> {
        if (j.params.p, j.params.n) != (f.p(), f.n()) {
            return Err(Error::Parse("field parameters do not match".into()));
        }
        let mut classes = Vec::with_capacity(j.vertices.len());
        for (k, v) in j.vertices.iter().enumerate() {
            if v.id != k {
                return Err(Error::Parse(format!(
                    "vertex ids must be dense, found {} at {k}",
                    v.id
                )));
            }
            let c = LatticeClass::from_repr(&v.class, f)?;
            if c.rank() != j.params.r || c.vertex_type() != v.vtype {
                return Err(Error::Parse(format!(
                    "vertex {k} disagrees with its rank or type"
                )));
            }
            classes.push(c);
        }
        let mut simplices = Vec::with_capacity(j.params.r);
        for d in 0..j.params.r {
            let mut list = j.simplices.get(&d.to_string()).cloned().unwrap_or_default();
            if list.iter().any(|s| s.0.len() != d + 1) {
                return Err(Error::Parse(format!("wrong simplex size in dimension {d}")));
            }
            list.sort_by_key(sort_key);
            simplices.push(list);
        }
        Ball::from_parts(j.params.r, j.params.radius, classes, simplices)
    }
}

/// Serialized ball as bytes in the requested format.
pub fn export(b: &Ball, format: ExportFormat, f: &Fq, ideal: Option<Vec<u32>>) -> Vec<u8> {
    match format {
        ExportFormat::Dot => b.to_dot().into_bytes(),
        ExportFormat::Json => {
            let mut v = serde_json::to_vec_pretty(&b.to_json(f, ideal)).expect("serializable");
            v.push(b'\n');
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::ball;

    #[test]
    fn dot_counts() {
        let f = Fq::of_order(2).unwrap();
        let b = ball(&LatticeClass::standard(2), 1, &f).unwrap();
        let dot = b.to_dot();
        assert_eq!(dot.matches("label=").count(), 4);
        assert_eq!(dot.matches(" -- ").count(), 3);
        let b0 = ball(&LatticeClass::standard(2), 0, &f).unwrap();
        assert_eq!(b0.to_dot().matches(" -- ").count(), 0);
    }

    #[test]
    fn json_roundtrip() {
        let f = Fq::of_order(3).unwrap();
        let b = ball(&LatticeClass::standard(2), 2, &f).unwrap();
        let bytes = export(&b, ExportFormat::Json, &f, Some(vec![0, 1]));
        let j: BallJson = serde_json::from_slice(&bytes).unwrap();
        let back = Ball::from_json(&j, &f).unwrap();
        assert_eq!(back, b);
    }
}
