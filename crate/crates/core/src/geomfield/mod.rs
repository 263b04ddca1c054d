//! Grids over Ω, distance fields to the boundary, and the geometric
//! estimators built on them.

mod ahlfors;
mod distance;
pub mod export;
mod grid;
mod index;
mod scaling;
mod uniformity;

pub use ahlfors::{ahlfors_check, AhlforsBounds};
pub use distance::{distance_field, DistanceField};
pub use grid::{build_grid, Grid};
pub use scaling::{
    default_fit_range, fit_log_log, geometric_radii, minkowski_dimension, neighborhood_volume,
    volume_scaling, ScalingFit,
};
pub use uniformity::uniformity_estimate;

use crate::simsys::{BoundaryGeometry, SimilaritySystem};

/// Smallest depth whose realization is within `spacing / 10` of the limit
/// set, clipped to `max_depth`.
pub fn depth_for_spacing(system: &SimilaritySystem, spacing: f64, max_depth: usize) -> usize {
    let lead = if matches!(system.family(), crate::simsys::Family::Koch(_)) {
        1.0
    } else {
        (system.ambient_dim() as f64).sqrt()
    };
    let ratio = system.max_ratio();
    (0..=max_depth)
        .find(|&k| lead * ratio.powi(k as i32) <= spacing / 10.0)
        .unwrap_or(max_depth)
}

/// Convenience: geometry's own bounding box plus `margin`, distance field at
/// `resolution`.
pub fn field_for(geometry: &BoundaryGeometry, resolution: usize, margin: f64) -> crate::Result<DistanceField> {
    let grid = build_grid(geometry, resolution, margin)?;
    Ok(distance_field(geometry, &grid))
}
