//! Exact arithmetic: `F_q`, `A = F_q[t]`, `K = F_q(t)`, linear algebra over
//! `F_q` and `K`, and Smith normal form over `Z`.

pub mod field;
pub mod fqmat;
pub mod intmat;
pub mod kmat;
pub mod poly;
pub mod ratfunc;
pub mod snf;

pub use field::{Fe, Fq};
pub use fqmat::{solve_affine, solve_fq, FqMatrix};
pub use intmat::IntMatrix;
pub use kmat::KMat;
pub use poly::Poly;
pub use ratfunc::{RatK, Valuation};
pub use snf::{snf, Snf};

/// Valuation at infinity, `deg den - deg num`.
pub fn v_inf(x: &RatK) -> Valuation {
    x.valuation()
}
