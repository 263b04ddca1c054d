use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::SparseForm;
use crate::geomfield::{distance_field, DistanceField, Grid};
use crate::simsys::BoundaryGeometry;

/// Distance `d_A` from every cell to the target set `A ⊆ Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    distances: Vec<f64>,
}

impl Target {
    /// `A = Γ`.
    pub fn whole(df: &DistanceField) -> Self {
        Self {
            distances: df.values().to_vec(),
        }
    }

    /// `A` realized by its own (sub-)geometry.
    pub fn from_geometry(sub: &BoundaryGeometry, grid: &Grid) -> Self {
        Self {
            distances: distance_field(sub, grid).values().to_vec(),
        }
    }

    /// `A = ∅`; every cell is infinitely far.
    pub fn empty(n_cells: usize) -> Self {
        Self {
            distances: vec![f64::INFINITY; n_cells],
        }
    }

    pub fn from_distances(distances: Vec<f64>) -> Self {
        Self { distances }
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn is_empty(&self) -> bool {
        self.distances.iter().all(|d| d.is_infinite())
    }
}

/// The logarithmic cutoff `η_{r,n}` evaluated at every cell.
pub fn eta_rn(target: &Target, r: f64, n: u32) -> Result<Vec<f64>> {
    if n < 2 || !(r > 0.0) {
        return Err(Error::invalid(format!("eta needs n >= 2 and r > 0 (got n={n}, r={r})")));
    }
    let inner = r / n as f64;
    let log_n = (n as f64).ln();
    Ok(target
        .distances
        .par_iter()
        .map(|&d| {
            if d <= inner {
                1.0
            } else if d <= r {
                -(d / r).ln() / log_n
            } else {
                0.0
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaBound {
    pub value: f64,
    pub r: f64,
    pub n: u32,
}

/// `min_{r,n} h(η_{r,n}) + ‖η_{r,n}‖²`, preferring smaller `r`, then larger `n`.
pub fn capacity_upper_eta(form: &SparseForm, target: &Target, r_list: &[f64], n_list: &[u32]) -> Result<EtaBound> {
    if r_list.is_empty() || n_list.is_empty() {
        return Err(Error::invalid("candidate lists must be nonempty"));
    }
    if target.distances.len() != form.n_cells() {
        return Err(Error::invalid("target and form disagree on cell count"));
    }
    let mut rs = r_list.to_vec();
    rs.sort_by(f64::total_cmp);
    let mut ns = n_list.to_vec();
    ns.sort_unstable_by(|a, b| b.cmp(a));
    let mut best: Option<EtaBound> = None;
    for &r in &rs {
        for &n in &ns {
            let eta = eta_rn(target, r, n)?;
            let value = form.graph_norm_sq(&eta);
            if best.is_none_or(|b| value < b.value) {
                best = Some(EtaBound { value, r, n });
            }
        }
    }
    Ok(best.expect("lists are nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::assemble_form;
    use crate::geomfield::build_grid;
    use crate::simsys::koch_snowflake;

    #[test]
    fn eta_examples() {
        let r = 0.2;
        let n = 100;
        let t = Target::from_distances(vec![r / (2.0 * n as f64), r, 0.1 * r, 2.0 * r]);
        let eta = eta_rn(&t, r, n).unwrap();
        assert_eq!(eta[0], 1.0);
        assert_eq!(eta[1], 0.0);
        assert!((eta[2] - 0.5).abs() < 1e-15);
        assert_eq!(eta[3], 0.0);
        assert!(eta_rn(&t, r, 1).is_err());
    }

    #[test]
    fn empty_target_has_zero_bound() {
        let geom = koch_snowflake(1.0 / 3.0, 2).unwrap();
        let df = crate::geomfield::field_for(&geom, 32, 0.05).unwrap();
        let form = assemble_form(&df, 1.0).unwrap();
        let b = capacity_upper_eta(&form, &Target::empty(df.grid().len()), &[0.1], &[4]).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn ties_prefer_small_r_then_large_n() {
        let geom = koch_snowflake(1.0 / 3.0, 2).unwrap();
        let grid = build_grid(&geom, 32, 0.05).unwrap();
        let n = grid.len();
        let df = distance_field(&geom, &grid);
        let form = assemble_form(&df, 1.0).unwrap();
        let b = capacity_upper_eta(&form, &Target::empty(n), &[0.3, 0.1, 0.2], &[4, 16, 8]).unwrap();
        assert_eq!((b.r, b.n), (0.1, 16));
    }

    #[test]
    fn energy_decreases_with_n_above_critical_delta() {
        let geom = koch_snowflake(1.0 / 3.0, 6).unwrap();
        let df = crate::geomfield::field_for(&geom, 256, 0.02).unwrap();
        let form = assemble_form(&df, 2.0).unwrap();
        let target = Target::whole(&df);
        let mut last = f64::INFINITY;
        for n in [4, 8, 16, 32] {
            let e = form.energy(&eta_rn(&target, 0.1, n).unwrap());
            assert!(e < last, "n={n}: {e} vs {last}");
            last = e;
        }
    }
}
