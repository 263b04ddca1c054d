//! Continuous-time random walks generated by the discrete form.
//!
//! The jump rate from cell `i` to `j` is `w_ij / h^d`. A walk is absorbed
//! when it enters the collar `{d_Γ < absorb_eps}` before the horizon `T`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::SparseForm;
use crate::geomfield::DistanceField;

/// Upper bound on the holding-time rate.
pub const MAX_RATE: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub start: usize,
    pub horizon: f64,
    pub trials: u64,
    pub seed: u64,
    pub absorb_eps: f64,
}

impl WalkConfig {
    pub fn validate(&self, df: &DistanceField) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial is required"));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::invalid(format!("horizon {} must be positive", self.horizon)));
        }
        if !(self.absorb_eps >= 2.0 * df.spacing() * (1.0 - 1e-12)) {
            return Err(Error::invalid(format!("absorb_eps {} below 2h", self.absorb_eps)));
        }
        let grid = df.grid();
        if self.start >= grid.len() || !grid.in_omega(self.start) {
            return Err(Error::invalid(format!("start cell {} is not in the domain", self.start)));
        }
        if df.value(self.start) < self.absorb_eps {
            return Err(Error::invalid("start cell lies inside the absorbing collar"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkResult {
    pub p_hat: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
    /// Holding steps whose rate was clamped at [`MAX_RATE`].
    pub clamp_events: u64,
}

/// Fraction of walks from `cfg.start` that reach the collar before `cfg.horizon`.
///
/// Trial `k` draws from the ChaCha stream `k` of `cfg.seed`, so results are
/// independent of scheduling.
pub fn walk_absorption(form: &SparseForm, df: &DistanceField, cfg: &WalkConfig) -> Result<WalkResult> {
    cfg.validate(df)?;
    if form.n_cells() != df.grid().len() {
        return Err(Error::invalid("form and distance field disagree on cell count"));
    }
    let (offsets, nbrs) = form.adjacency();
    let inv_vol = 1.0 / form.cell_volume();
    let rates: Vec<f64> = (0..form.n_cells())
        .map(|i| nbrs[offsets[i]..offsets[i + 1]].iter().map(|e| e.1).sum::<f64>() * inv_vol)
        .collect();
    let absorbing: Vec<bool> = df.values().iter().map(|&d| d < cfg.absorb_eps).collect();

    let (hits, clamps) = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial);
            let mut cell = cfg.start;
            let mut t = 0.0;
            let mut clamps = 0u64;
            loop {
                let total = rates[cell];
                if total <= 0.0 {
                    return (0u64, clamps);
                }
                let rate = if total > MAX_RATE {
                    clamps += 1;
                    MAX_RATE
                } else {
                    total
                };
                let u: f64 = rng.gen();
                t += -(1.0 - u).ln() / rate;
                let pick: f64 = rng.gen::<f64>() * total * form.cell_volume();
                if t > cfg.horizon {
                    return (0, clamps);
                }
                let row = &nbrs[offsets[cell]..offsets[cell + 1]];
                let mut acc = 0.0;
                let mut next = row[row.len() - 1].0;
                for &(j, w) in row {
                    acc += w;
                    if pick < acc {
                        next = j;
                        break;
                    }
                }
                cell = next as usize;
                if absorbing[cell] {
                    return (1, clamps);
                }
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let p = hits as f64 / cfg.trials as f64;
    Ok(WalkResult {
        p_hat: p,
        stderr: (p * (1.0 - p) / cfg.trials as f64).sqrt(),
        hits,
        trials: cfg.trials,
        clamp_events: clamps,
    })
}
