//! The weighted form `h(φ) = ∫ c(x) |∇φ|²` with `c = min(d_Γ, 1)^δ`, its
//! capacity problems, Hardy quotients and collar integrals.

mod capacity;
mod collar;
mod hardy;
mod target;

pub use capacity::{capacity_relaxed, capacity_relaxed_with, CapacityResult};
pub use collar::{collar_integral, truncated_singular_integral};
pub use hardy::{hardy_quotient, HardyResult};
pub use target::{capacity_upper_eta, eta_rn, EtaBound, Target};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geomfield::DistanceField;
use crate::MAX_DIM;

/// Cell weights `c(x) = max(min(d_Γ, 1), h/2)^δ` on Ω, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    delta: f64,
    values: Vec<f64>,
}

impl WeightField {
    pub fn new(df: &DistanceField, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        let floor = 0.5 * df.spacing();
        let grid = df.grid();
        let values = df
            .values()
            .par_iter()
            .zip(grid.mask().par_iter())
            .map(|(&d, &m)| if m { d.min(1.0).max(floor).powf(delta) } else { 0.0 })
            .collect();
        Ok(Self { delta, values })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `max(d_Γ, h/2)^p`, the clamped singular weight.
#[inline]
pub(crate) fn clamped_power(d: f64, h: f64, p: f64) -> f64 {
    d.max(0.5 * h).powf(p)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta >= 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::invalid(format!("delta {delta} must be a finite nonnegative number")))
    }
}

/// How the weight of an edge is formed from its two cell weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMean {
    #[default]
    Arithmetic,
    Harmonic,
}

impl EdgeMean {
    #[inline]
    fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            EdgeMean::Arithmetic => 0.5 * (a + b),
            EdgeMean::Harmonic => 2.0 * a * b / (a + b),
        }
    }
}

/// Symmetric nearest-neighbor form on the Ω cells of a grid.
///
/// Each unordered pair appears once in `edges` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseForm {
    dim: usize,
    spacing: f64,
    n_cells: usize,
    mask: Vec<bool>,
    weights: WeightField,
    edges: Vec<(u32, u32, f64)>,
}

impl SparseForm {
    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `h^d`
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn weights(&self) -> &WeightField {
        &self.weights
    }

    pub fn delta(&self) -> f64 {
        self.weights.delta
    }

    /// `h(φ) = Σ w_ij (φ_i − φ_j)²`
    pub fn energy(&self, phi: &[f64]) -> f64 {
        assert_eq!(phi.len(), self.n_cells);
        self.edges
            .par_iter()
            .map(|&(i, j, w)| {
                let g = phi[i as usize] - phi[j as usize];
                w * g * g
            })
            .sum()
    }

    /// Polarized bilinear form `h(φ, ψ)`.
    pub fn bilinear(&self, phi: &[f64], psi: &[f64]) -> f64 {
        self.edges
            .par_iter()
            .map(|&(i, j, w)| w * (phi[i as usize] - phi[j as usize]) * (psi[i as usize] - psi[j as usize]))
            .sum()
    }

    /// `h^d Σ_Ω φ²`
    pub fn mass(&self, phi: &[f64]) -> f64 {
        let s: f64 = phi
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v * v)
            .sum();
        self.cell_volume() * s
    }

    /// Graph-norm squared `h(φ) + ‖φ‖²`.
    pub fn graph_norm_sq(&self, phi: &[f64]) -> f64 {
        self.energy(phi) + self.mass(phi)
    }

    /// Per-cell neighbor lists `(offsets, (neighbor, weight))`.
    pub fn adjacency(&self) -> (Vec<usize>, Vec<(u32, f64)>) {
        let mut degree = vec![0usize; self.n_cells + 1];
        for &(i, j, _) in &self.edges {
            degree[i as usize + 1] += 1;
            degree[j as usize + 1] += 1;
        }
        for k in 1..degree.len() {
            degree[k] += degree[k - 1];
        }
        let offsets = degree.clone();
        let mut fill = degree;
        let mut nbrs = vec![(0u32, 0.0); offsets[self.n_cells]];
        for &(i, j, w) in &self.edges {
            nbrs[fill[i as usize]] = (j, w);
            fill[i as usize] += 1;
            nbrs[fill[j as usize]] = (i, w);
            fill[j as usize] += 1;
        }
        (offsets, nbrs)
    }
}

/// Assembles the form with arithmetic-mean edge weights.
pub fn assemble_form(df: &DistanceField, delta: f64) -> Result<SparseForm> {
    assemble_form_with(df, delta, EdgeMean::Arithmetic)
}

/// `w_ij = h^{d−2} · mean(c_i, c_j)` for every axis-neighbor pair in Ω.
pub fn assemble_form_with(df: &DistanceField, delta: f64, mean: EdgeMean) -> Result<SparseForm> {
    let weights = WeightField::new(df, delta)?;
    let grid = df.grid();
    let dim = grid.dim();
    let h = grid.spacing();
    let scale = h.powi(dim as i32 - 2);
    let c = weights.values();
    let edges: Vec<(u32, u32, f64)> = (0..grid.len())
        .into_par_iter()
        .filter(|&i| grid.in_omega(i))
        .flat_map_iter(|i| {
            let nb = grid.axis_neighbors(i);
            (0..dim).filter_map(move |k| {
                let j = nb[2 * k + 1]?;
                grid.in_omega(j)
                    .then(|| (i as u32, j as u32, scale * mean.combine(c[i], c[j])))
            })
        })
        .collect();
    Ok(SparseForm {
        dim,
        spacing: h,
        n_cells: grid.len(),
        mask: grid.mask().to_vec(),
        weights,
        edges,
    })
}

/// Ω cells whose centers lie in the open ball `|x − z| < r`.
pub(crate) fn ball_cells(df: &DistanceField, z: &[f64], r: f64) -> Result<Vec<usize>> {
    let grid = df.grid();
    let dim = grid.dim();
    if z.len() != dim {
        return Err(crate::Error::invalid(format!("center has {} coordinates, expected {dim}", z.len())));
    }
    let mut zc = [0.0; MAX_DIM];
    zc[..dim].copy_from_slice(z);
    let r2 = r * r;
    Ok((0..grid.len())
        .into_par_iter()
        .filter(|&i| {
            grid.in_omega(i) && {
                let c = grid.center(i);
                (0..dim).map(|k| (c[k] - zc[k]).powi(2)).sum::<f64>() < r2
            }
        })
        .collect())
}
