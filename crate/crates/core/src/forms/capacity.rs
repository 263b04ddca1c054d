use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{SparseForm, Target};
use crate::linalg::{conjugate_gradient, CgOptions, CsrBuilder};

const BOX_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// `h(ψ) + ‖ψ‖²` at the minimizer.
    pub value: f64,
    pub collar_eps: f64,
    pub collar_cells: usize,
    pub free_cells: usize,
    pub solver_iters: usize,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<(usize, f64)>,
}

/// Minimizes `h(ψ) + ‖ψ‖²` with `ψ = 1` on the collar `{d_A < eps}`.
pub fn capacity_relaxed(form: &SparseForm, target: &Target, eps: f64, cg_tol: f64) -> Result<CapacityResult> {
    capacity_relaxed_with(
        form,
        target,
        eps,
        &CgOptions {
            tol: cg_tol,
            ..Default::default()
        },
    )
}

pub fn capacity_relaxed_with(form: &SparseForm, target: &Target, eps: f64, opts: &CgOptions) -> Result<CapacityResult> {
    let h = form.spacing();
    if !(eps >= 2.0 * h * (1.0 - 1e-12)) {
        return Err(Error::invalid(format!("collar width {eps} below 2h = {}", 2.0 * h)));
    }
    let n = form.n_cells();
    let d_a = target.distances();
    if d_a.len() != n {
        return Err(Error::invalid("target and form disagree on cell count"));
    }
    let mask = form.mask();
    let collar: Vec<bool> = (0..n).map(|i| mask[i] && d_a[i] < eps).collect();
    let collar_cells = collar.iter().filter(|&&c| c).count();
    if collar_cells == 0 {
        return Err(Error::EmptyRegion);
    }

    const NONE: u32 = u32::MAX;
    let mut free_id = vec![NONE; n];
    let mut free: Vec<usize> = Vec::new();
    for i in 0..n {
        if mask[i] && !collar[i] {
            free_id[i] = free.len() as u32;
            free.push(i);
        }
    }

    let mut psi: Vec<f64> = collar.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
    let mut out = CapacityResult {
        value: 0.0,
        collar_eps: eps,
        collar_cells,
        free_cells: free.len(),
        solver_iters: 0,
        residual: 0.0,
        trace: Vec::new(),
    };

    if !free.is_empty() {
        let (offsets, nbrs) = form.adjacency();
        let vol = form.cell_volume();
        let mut a = CsrBuilder::with_capacity(free.len(), free.len() * (2 * form.dim() + 1));
        let mut rhs = vec![0.0; free.len()];
        for (row, &i) in free.iter().enumerate() {
            let mut diag = vol;
            for &(j, w) in &nbrs[offsets[i]..offsets[i + 1]] {
                diag += w;
                let fj = free_id[j as usize];
                if fj != NONE {
                    a.push(fj as usize, -w);
                } else if collar[j as usize] {
                    rhs[row] += w;
                }
            }
            a.push(row, diag);
            a.finish_row();
        }
        let a = a.build();
        let mut x = vec![0.0; free.len()];
        let cg = conjugate_gradient(&a, &rhs, &mut x, opts)?;
        out.solver_iters = cg.iterations;
        out.residual = cg.residual;
        out.trace = cg.trace;
        let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &v| (l.min(v), u.max(v)));
        if lo < -BOX_SLACK || hi > 1.0 + BOX_SLACK {
            return Err(Error::MaximumPrinciple { min: lo, max: hi });
        }
        for (&i, &v) in free.iter().zip(&x) {
            psi[i] = v;
        }
    }
    out.value = form.graph_norm_sq(&psi);
    Ok(out)
}
