use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{ball_cells, clamped_power, WeightField};
use crate::geomfield::DistanceField;
use crate::linalg::{conjugate_gradient, dot, CgOptions, CsrBuilder, CsrMatrix};

const MAX_OUTER: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyResult {
    /// Smallest generalized Rayleigh quotient.
    pub quotient: f64,
    pub iterations: usize,
    /// Cell indices of the support region.
    pub cells: Vec<usize>,
    /// Eigenvector on `cells`, normalized to unit mass.
    pub vector: Vec<f64>,
}

impl HardyResult {
    /// Rayleigh quotient of `vector` recomputed from scratch.
    pub fn rayleigh(&self, df: &DistanceField, delta: f64) -> Result<f64> {
        let (k, m) = hardy_operators(df, delta, &self.cells)?;
        Ok(k.quadratic(&self.vector) / weighted_norm(&m, &self.vector))
    }
}

/// Local Hardy constant `inf ∫ c|∇φ|² / ∫ d^{δ−2} φ²` over φ supported in
/// the Ω cells of the ball `B(z, r)`.
///
/// Cells outside the support act as Dirichlet ghosts.
pub fn hardy_quotient(df: &DistanceField, delta: f64, z: &[f64], r: f64, tol: f64) -> Result<HardyResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    let cells = ball_cells(df, z, r)?;
    if cells.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let (k, m) = hardy_operators(df, delta, &cells)?;
    let n = cells.len();
    let dim = df.dim();
    let opts = CgOptions {
        tol,
        ..Default::default()
    };

    let mut v = vec![1.0; n];
    normalize(&m, &mut v);
    let mut lambda = k.quadratic(&v);
    let mut x = v.clone();
    let mut rhs = vec![0.0; n];
    let mut iterations = 0;
    for it in 1..=MAX_OUTER {
        iterations = it;
        for i in 0..n {
            rhs[i] = m[i] * v[i];
        }
        // warm start: K⁻¹Mv ≈ v / λ
        for i in 0..n {
            x[i] = v[i] / lambda;
        }
        if dim == 1 {
            solve_tridiagonal(&k, &rhs, &mut x);
        } else {
            conjugate_gradient(&k, &rhs, &mut x, &opts)?;
        }
        v.copy_from_slice(&x);
        normalize(&m, &mut v);
        let next = k.quadratic(&v);
        let change = (next - lambda).abs();
        lambda = next;
        if change <= tol * lambda.abs() {
            break;
        }
    }
    Ok(HardyResult {
        quotient: lambda,
        iterations,
        cells,
        vector: v,
    })
}

/// Stiffness matrix restricted to `cells` and the diagonal mass
/// `h^d max(d, h/2)^{δ−2}`.
fn hardy_operators(df: &DistanceField, delta: f64, cells: &[usize]) -> Result<(CsrMatrix, Vec<f64>)> {
    let grid = df.grid();
    let dim = grid.dim();
    let h = grid.spacing();
    let scale = h.powi(dim as i32 - 2);
    let vol = grid.cell_volume();
    let c = WeightField::new(df, delta)?;
    let c = c.values();
    let mut local = vec![u32::MAX; grid.len()];
    for (k, &i) in cells.iter().enumerate() {
        local[i] = k as u32;
    }
    let mut a = CsrBuilder::with_capacity(cells.len(), cells.len() * (2 * dim + 1));
    for (row, &i) in cells.iter().enumerate() {
        let nb = grid.axis_neighbors(i);
        let mut diag = 0.0;
        for slot in &nb[..2 * dim] {
            match slot.map(|j| (j, local[j])) {
                Some((j, lj)) if lj != u32::MAX => {
                    let w = scale * 0.5 * (c[i] + c[j]);
                    diag += w;
                    a.push(lj as usize, -w);
                }
                _ => diag += scale * c[i],
            }
        }
        a.push(row, diag);
        a.finish_row();
    }
    let mass = cells
        .iter()
        .map(|&i| vol * clamped_power(df.value(i), h, delta - 2.0))
        .collect();
    Ok((a.build(), mass))
}

/// Thomas algorithm for a symmetric matrix whose rows couple only to
/// adjacent indices (the 1D stiffness matrix).
fn solve_tridiagonal(a: &CsrMatrix, rhs: &[f64], x: &mut [f64]) {
    let n = a.n();
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 0..n {
        for (j, v) in a.row(i) {
            if j == i {
                diag[i] = v;
            } else if j == i + 1 {
                upper[i] = v;
            }
        }
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let lower = if i > 0 { upper[i - 1] } else { 0.0 };
        let denom = diag[i] - if i > 0 { lower * c[i - 1] } else { 0.0 };
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - if i > 0 { lower * d[i - 1] } else { 0.0 }) / denom;
    }
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
}

fn weighted_norm(m: &[f64], v: &[f64]) -> f64 {
    v.iter().zip(m).map(|(x, w)| w * x * x).sum()
}

fn normalize(m: &[f64], v: &mut [f64]) {
    let s = weighted_norm(m, v).sqrt();
    let sign = if dot(v, m) < 0.0 { -1.0 } else { 1.0 };
    for x in v.iter_mut() {
        *x *= sign / s;
    }
}
