use rayon::prelude::*;

use crate::geomfield::index::Bvh;
use crate::geomfield::Grid;
use crate::simsys::BoundaryGeometry;
use crate::MAX_DIM;

/// Distance to the depth-`K` boundary at every cell center.
#[derive(Debug, Clone)]
pub struct DistanceField {
    grid: Grid,
    values: Vec<f64>,
    depth_error: f64,
    boundary_diameter: f64,
    /// Ω-cell distances in ascending order, for volume queries.
    sorted_omega: Vec<f64>,
}

impl DistanceField {
    /// Wraps precomputed values (e.g. an analytic distance).
    pub fn from_values(grid: Grid, values: Vec<f64>, depth_error: f64, boundary_diameter: f64) -> Self {
        assert_eq!(values.len(), grid.len(), "one value per cell");
        let mut sorted_omega: Vec<f64> = values
            .iter()
            .zip(grid.mask())
            .filter_map(|(&v, &m)| m.then_some(v))
            .collect();
        sorted_omega.par_sort_unstable_by(f64::total_cmp);
        Self {
            grid,
            values,
            depth_error,
            boundary_diameter,
            sorted_omega,
        }
    }

    /// The interval `(0, 1)` split into `cells` cells, with distance measured
    /// to the given boundary points.
    pub fn interval(cells: usize, boundary: &[f64]) -> crate::Result<Self> {
        if cells < 2 || boundary.is_empty() {
            return Err(crate::Error::invalid("interval needs two cells and a boundary point"));
        }
        let h = 1.0 / cells as f64;
        let grid = Grid::new(1, &[0.0], h, &[cells])?.with_mask(vec![true; cells])?;
        let values = (0..cells)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                boundary.iter().map(|b| (x - b).abs()).fold(f64::INFINITY, f64::min)
            })
            .collect();
        let lo = boundary.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = boundary.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self::from_values(grid, values, 0.0, hi - lo))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Hausdorff bound inherited from the geometry realization.
    pub fn depth_error(&self) -> f64 {
        self.depth_error
    }

    pub fn boundary_diameter(&self) -> f64 {
        self.boundary_diameter
    }

    /// Ω-cell distances, ascending.
    pub fn sorted_omega_distances(&self) -> &[f64] {
        &self.sorted_omega
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }
}

/// Exact Euclidean distance from every cell center to the nearest primitive.
///
/// Rows along axis 0 are processed in parallel; within a row the previous
/// cell's distance plus `h` seeds the search bound (distance is 1-Lipschitz).
pub fn distance_field(geometry: &BoundaryGeometry, grid: &Grid) -> DistanceField {
    let bvh = Bvh::new(geometry.primitives(), geometry.dim());
    let nx = grid.dims()[0];
    let h = grid.spacing();
    let mut values = vec![0.0; grid.len()];
    values.par_chunks_mut(nx).enumerate().for_each(|(row, chunk)| {
        let mut prev = f64::INFINITY;
        for (i, v) in chunk.iter_mut().enumerate() {
            let c: [f64; MAX_DIM] = grid.center(row * nx + i);
            let bound = if prev.is_finite() { (prev + h) * (1.0 + 1e-12) + 1e-300 } else { prev };
            let d = bvh.nearest(&c, bound);
            *v = d;
            prev = d;
        }
    });
    DistanceField::from_values(
        grid.clone(),
        values,
        geometry.approx_error(),
        geometry.diameter(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomfield::build_grid;
    use crate::geomfield::index::brute_nearest;
    use crate::simsys::{koch_snowflake, AaBox, DomainRule, Segment};

    #[test]
    fn perpendicular_distance_to_segment() {
        let geom = BoundaryGeometry::from_segments(
            vec![Segment::new([0.0, 0.0], [1.0, 0.0])],
            DomainRule::ComplementOfPrimitives,
        )
        .unwrap();
        let grid = Grid::over_box(&geom, &[0.0, 0.0], &[1.0, 1.0], 10).unwrap();
        let df = distance_field(&geom, &grid);
        let idx = grid.locate(&[0.5, 0.32]).unwrap();
        let c = grid.center(idx);
        assert!((df.value(idx) - c[1]).abs() < 1e-15);
        assert!((c[1] - 0.35).abs() < 1e-12);
    }

    #[test]
    fn box_interior_distance_is_to_faces() {
        let geom = BoundaryGeometry::from_boxes(2, vec![AaBox::new(&[0.0, 0.0], &[1.0, 1.0])]).unwrap();
        let grid = Grid::over_box(&geom, &[-1.0, -1.0], &[2.0, 2.0], 30).unwrap();
        let df = distance_field(&geom, &grid);
        let idx = grid.locate(&[0.5, 0.5]).unwrap();
        let c = grid.center(idx);
        assert!((c[0] - 0.55).abs() < 1e-12);
        assert!((df.value(idx) - 0.45).abs() < 1e-12);
        assert!(!grid.in_omega(idx));
    }

    #[test]
    fn field_matches_brute_force_and_is_lipschitz() {
        let geom = koch_snowflake(0.3, 3).unwrap();
        let grid = build_grid(&geom, 64, 0.1).unwrap();
        let df = distance_field(&geom, &grid);
        let h = grid.spacing();
        for idx in 0..grid.len() {
            let c = grid.center(idx);
            assert!((df.value(idx) - brute_nearest(geom.primitives(), 2, &c)).abs() < 1e-14);
            for n in grid.axis_neighbors(idx).into_iter().flatten() {
                assert!((df.value(idx) - df.value(n)).abs() <= h * (1.0 + 1e-12));
            }
        }
        assert!(df.values().iter().all(|&v| v >= 0.0 && v <= grid.diameter()));
    }

    #[test]
    fn refinement_changes_values_by_at_most_the_depth_error() {
        let grid_geom = koch_snowflake(1.0 / 3.0, 2).unwrap();
        let grid = build_grid(&grid_geom, 128, 0.05).unwrap();
        for depth in 2..5 {
            let coarse = koch_snowflake(1.0 / 3.0, depth).unwrap();
            let fine = koch_snowflake(1.0 / 3.0, depth + 2).unwrap();
            let a = distance_field(&coarse, &grid);
            let b = distance_field(&fine, &grid);
            let worst = a
                .values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(worst <= coarse.approx_error(), "depth {depth}: {worst}");
        }
    }
}
