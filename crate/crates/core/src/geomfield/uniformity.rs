//! Heuristic witness for the local uniformity (cigar) condition.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geomfield::DistanceField;
use crate::MAX_DIM;

/// Paths may leave `Ω_{z,R}` but are confined to `Ω ∩ B(z, SEARCH_FACTOR·R)`.
const SEARCH_FACTOR: f64 = 2.0;
const BISECTION_STEPS: usize = 12;

#[derive(Clone, Copy, PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Region<'a> {
    df: &'a DistanceField,
    cells: Vec<usize>,
    centers: Vec<[f64; MAX_DIM]>,
    /// (neighbor local index, step length)
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl<'a> Region<'a> {
    fn new(df: &'a DistanceField, z: &[f64], radius: f64) -> Self {
        let grid = df.grid();
        let dim = grid.dim();
        let dist = |c: &[f64; MAX_DIM]| -> f64 {
            (0..dim).map(|k| (c[k] - z[k]).powi(2)).sum::<f64>().sqrt()
        };
        let cells: Vec<usize> = (0..grid.len())
            .filter(|&i| grid.in_omega(i) && dist(&grid.center(i)) < radius)
            .collect();
        let local: HashMap<usize, usize> = cells.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let centers: Vec<[f64; MAX_DIM]> = cells.iter().map(|&i| grid.center(i)).collect();
        let h = grid.spacing();
        let dims = grid.dims();
        let adjacency = cells
            .iter()
            .map(|&g| {
                let m = grid.multi_index(g);
                let mut out = Vec::new();
                let span = |k: usize| if k < dim { -1i64..=1 } else { 0..=0 };
                for o2 in span(2) {
                    for o1 in span(1) {
                        for o0 in span(0) {
                            let off = [o0, o1, o2];
                            if off == [0, 0, 0] {
                                continue;
                            }
                            let mut n = [0usize; MAX_DIM];
                            let mut ok = true;
                            for k in 0..dim {
                                let v = m[k] as i64 + off[k];
                                if v < 0 || v >= dims[k] as i64 {
                                    ok = false;
                                    break;
                                }
                                n[k] = v as usize;
                            }
                            if !ok {
                                continue;
                            }
                            if let Some(&l) = local.get(&grid.linear_index(n)) {
                                let steps = off.iter().map(|o| o * o).sum::<i64>() as f64;
                                out.push((l, h * steps.sqrt()));
                            }
                        }
                    }
                }
                out
            })
            .collect();
        Self {
            df,
            cells,
            centers,
            adjacency,
        }
    }

    fn euclid(&self, a: usize, b: usize) -> f64 {
        let (p, q) = (&self.centers[a], &self.centers[b]);
        (0..MAX_DIM).map(|k| (p[k] - q[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Shortest grid path from `x` to `y` through cells `w` satisfying
    /// `min(|x−w|, |w−y|) ≤ σ d_Γ(w)`; `None` if unreachable.
    fn shortest(&self, x: usize, y: usize, sigma: f64) -> Option<f64> {
        let allowed = |w: usize| {
            let reach = self.euclid(x, w).min(self.euclid(w, y));
            reach <= sigma * self.df.value(self.cells[w])
        };
        let mut dist = vec![f64::INFINITY; self.cells.len()];
        let mut heap = BinaryHeap::new();
        dist[x] = 0.0;
        heap.push(Reverse((Key(0.0), x)));
        while let Some(Reverse((Key(d), u))) = heap.pop() {
            if u == y {
                return Some(d);
            }
            if d > dist[u] {
                continue;
            }
            for &(v, step) in &self.adjacency[u] {
                let nd = d + step;
                if nd < dist[v] && (v == y || allowed(v)) {
                    dist[v] = nd;
                    heap.push(Reverse((Key(nd), v)));
                }
            }
        }
        None
    }

    fn feasible(&self, x: usize, y: usize, sigma: f64) -> bool {
        self.shortest(x, y, sigma)
            .is_some_and(|len| len <= sigma * self.euclid(x, y))
    }
}

/// Upper-bound witness for the uniformity constant σ of `Ω_{z,R}`.
///
/// For each sampled pair of Ω cells in `B(z, R)`, bisects on σ for the
/// smallest value at which some grid path (8- or 26-neighbor) has length at
/// most `σ |x−y|` while every cell `w` on it keeps
/// `d_Γ(w) ≥ σ⁻¹ min(|x−w|, |w−y|)`. Returns the maximum over pairs. This
/// certifies nothing about uniformity of the continuum domain.
pub fn uniformity_estimate(df: &DistanceField, z: &[f64], radius: f64, n_pairs: usize, seed: u64) -> Result<f64> {
    let grid = df.grid();
    if z.len() != grid.dim() || !(radius > 0.0) || n_pairs == 0 {
        return Err(Error::invalid("need a point of the grid dimension, R > 0 and n_pairs > 0"));
    }
    let region = Region::new(df, z, SEARCH_FACTOR * radius);
    let inner: Vec<usize> = (0..region.cells.len())
        .filter(|&l| {
            let c = &region.centers[l];
            (0..grid.dim()).map(|k| (c[k] - z[k]).powi(2)).sum::<f64>().sqrt() < radius
        })
        .collect();
    if inner.len() < 2 {
        return Err(Error::EmptyRegion);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 1.0f64;
    for _ in 0..n_pairs {
        let pair: Vec<&usize> = inner.choose_multiple(&mut rng, 2).collect();
        let (x, y) = (*pair[0], *pair[1]);
        let direct = region.euclid(x, y);
        let Some(free_len) = region.shortest(x, y, f64::INFINITY) else {
            return Err(Error::Disconnected(region.cells[x], region.cells[y]));
        };
        let mut lo = 1.0f64.max(0.999 * free_len / direct);
        if region.feasible(x, y, lo) {
            worst = worst.max(lo);
            continue;
        }
        let mut hi = 2.0 * lo;
        while !region.feasible(x, y, hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                break;
            }
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if region.feasible(x, y, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        worst = worst.max(hi);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomfield::{build_grid, distance_field};
    use crate::simsys::{koch_snowflake, BoundaryGeometry};

    fn disk(n: usize) -> BoundaryGeometry {
        let v: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        BoundaryGeometry::polygon(&v).unwrap()
    }

    #[test]
    fn disk_chords_are_uniform() {
        let geom = disk(256);
        let grid = build_grid(&geom, 64, 0.05).unwrap();
        let df = distance_field(&geom, &grid);
        let sigma = uniformity_estimate(&df, &[1.0, 0.0], 0.8, 20, 1).unwrap();
        assert!(sigma <= 4.0, "{sigma}");
    }

    #[test]
    fn koch_vertex_neighbourhood_is_finite() {
        let geom = koch_snowflake(1.0 / 3.0, 5).unwrap();
        let grid = build_grid(&geom, 128, 0.05).unwrap();
        let df = distance_field(&geom, &grid);
        let sigma = uniformity_estimate(&df, &[0.0, 0.0], 0.2, 30, 2).unwrap();
        assert!(sigma.is_finite() && sigma < 20.0, "{sigma}");
    }

    #[test]
    fn split_region_is_disconnected() {
        // two squares touching nowhere
        let geom = BoundaryGeometry::from_segments(
            vec![
                crate::simsys::Segment::new([0.0, 0.0], [1.0, 0.0]),
                crate::simsys::Segment::new([1.0, 0.0], [1.0, 1.0]),
                crate::simsys::Segment::new([1.0, 1.0], [0.0, 1.0]),
                crate::simsys::Segment::new([0.0, 1.0], [0.0, 0.0]),
                crate::simsys::Segment::new([1.5, 0.0], [2.5, 0.0]),
                crate::simsys::Segment::new([2.5, 0.0], [2.5, 1.0]),
                crate::simsys::Segment::new([2.5, 1.0], [1.5, 1.0]),
                crate::simsys::Segment::new([1.5, 1.0], [1.5, 0.0]),
            ],
            crate::simsys::DomainRule::InteriorOfPolygon,
        )
        .unwrap();
        let grid = build_grid(&geom, 64, 0.1).unwrap();
        let df = distance_field(&geom, &grid);
        let mut saw_split = false;
        for seed in 0..10 {
            if let Err(Error::Disconnected(..)) = uniformity_estimate(&df, &[1.25, 0.5], 0.9, 5, seed) {
                saw_split = true;
            }
        }
        assert!(saw_split);
    }
}
