//! Sparse symmetric matrices and the Jacobi-preconditioned conjugate
//! gradient solver used by the capacity and Hardy problems.

mod cg;
mod csr;

pub use cg::{conjugate_gradient, write_trace, CgOptions, CgOutcome};
pub use csr::{CsrBuilder, CsrMatrix};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
