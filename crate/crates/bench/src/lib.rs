//! Fixtures shared by the benchmark targets.

use fractform_core::geomfield::{build_grid, distance_field};
use fractform_core::simsys::{cantor_dust, koch_snowflake};
use fractform_core::{BoundaryGeometry, DistanceField, Grid};

/// Koch snowflake (λ = 1/3) with a grid of `resolution` cells per axis.
pub fn koch_setup(depth: usize, resolution: usize) -> (BoundaryGeometry, Grid) {
    let geom = koch_snowflake(1.0 / 3.0, depth).expect("koch geometry");
    let grid = build_grid(&geom, resolution, 0.02).expect("koch grid");
    (geom, grid)
}

/// Planar Cantor dust (λ = 1/4) with a grid of `resolution` cells per axis.
pub fn cantor_setup(depth: usize, resolution: usize) -> (BoundaryGeometry, Grid) {
    let geom = cantor_dust(0.25, 2, depth).expect("cantor geometry");
    let grid = build_grid(&geom, resolution, 0.1).expect("cantor grid");
    (geom, grid)
}

pub fn koch_field(resolution: usize) -> DistanceField {
    let (geom, grid) = koch_setup(6, resolution);
    distance_field(&geom, &grid)
}
