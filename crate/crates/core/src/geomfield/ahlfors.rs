use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomfield::index::Bvh;
use crate::geomfield::scaling::geometric_radii;
use crate::simsys::{BoundaryGeometry, Primitives};
use crate::MAX_DIM;

/// Empirical Ahlfors constants `min` and `max` of `μ(B(x, r)) / r^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhlforsBounds {
    pub c_lo: f64,
    pub c_hi: f64,
    pub samples: usize,
}

impl AhlforsBounds {
    pub fn spread(&self) -> f64 {
        self.c_hi / self.c_lo
    }
}

const RADII_PER_CENTER: usize = 8;

/// Samples the natural self-similar measure and reports the extreme ratios
/// `μ(B(x, r)) / r^s` over sampled centers and radii in `r_range`.
///
/// Each depth-`K` piece carries mass proportional to `scale^s`. Segment mass
/// is spread uniformly along the segment and clipped exactly by the ball; box
/// mass sits at the box center.
pub fn ahlfors_check(
    geometry: &BoundaryGeometry,
    s: f64,
    n_centers: usize,
    r_range: (f64, f64),
    seed: u64,
) -> Result<AhlforsBounds> {
    let (r_lo, r_hi) = r_range;
    if !(r_lo > 0.0 && r_lo <= r_hi) || n_centers == 0 {
        return Err(Error::invalid("need n_centers > 0 and 0 < r_min <= r_max"));
    }
    let masses: Vec<f64> = geometry.scales().iter().map(|sc| sc.powf(s)).collect();
    let total: f64 = masses.iter().sum();
    let cumulative: Vec<f64> = masses
        .iter()
        .scan(0.0, |acc, m| {
            *acc += m / total;
            Some(*acc)
        })
        .collect();

    let dim = geometry.dim();
    let bvh = Bvh::new(geometry.primitives(), dim);
    let radii = if r_lo == r_hi {
        vec![r_lo]
    } else {
        geometric_radii(r_lo, r_hi, RADII_PER_CENTER)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut c_lo, mut c_hi) = (f64::INFINITY, 0.0f64);
    let mut samples = 0;
    for _ in 0..n_centers {
        let u: f64 = rng.gen();
        let piece = cumulative.partition_point(|&c| c < u).min(masses.len() - 1);
        let center: [f64; MAX_DIM] = match geometry.primitives() {
            Primitives::Segments(segs) => {
                let p = segs[piece].point_at(rng.gen());
                [p[0], p[1], 0.0]
            }
            Primitives::Boxes(boxes) => boxes[piece].center(),
        };
        for &r in &radii {
            let mut mass = 0.0;
            bvh.for_each_near(&center, r, |i| match geometry.primitives() {
                Primitives::Segments(segs) => {
                    let seg = &segs[i];
                    let len = seg.length();
                    if len > 0.0 {
                        mass += masses[i] / total * seg.length_in_disk([center[0], center[1]], r) / len;
                    }
                }
                Primitives::Boxes(boxes) => {
                    let c = boxes[i].center();
                    let d2: f64 = (0..dim).map(|k| (c[k] - center[k]).powi(2)).sum();
                    if d2 <= r * r {
                        mass += masses[i] / total;
                    }
                }
            });
            if mass <= 0.0 {
                return Err(Error::InsufficientSamples);
            }
            let ratio = mass / r.powf(s);
            c_lo = c_lo.min(ratio);
            c_hi = c_hi.max(ratio);
            samples += 1;
        }
    }
    Ok(AhlforsBounds { c_lo, c_hi, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simsys::{cantor_dust, koch_snowflake, similarity_dimension, DomainRule, Segment, SimilaritySystem};

    #[test]
    fn unit_segment_length_measure() {
        let geom = BoundaryGeometry::from_segments(
            vec![Segment::new([0.0, 0.0], [1.0, 0.0])],
            DomainRule::ComplementOfPrimitives,
        )
        .unwrap();
        let b = ahlfors_check(&geom, 1.0, 200, (0.01, 0.5), 3).unwrap();
        assert!(b.c_lo >= 1.0 - 1e-12 && b.c_hi <= 2.0 + 1e-12, "{b:?}");
        assert!(b.c_hi > 1.9);
    }

    #[test]
    fn koch_spread_is_bounded() {
        let s = similarity_dimension(&SimilaritySystem::koch(1.0 / 3.0).unwrap(), 1e-13).unwrap();
        let geom = koch_snowflake(1.0 / 3.0, 6).unwrap();
        let b = ahlfors_check(&geom, s, 200, (0.01, 0.2), 11).unwrap();
        assert!(b.spread() <= 40.0, "{b:?}");
    }

    #[test]
    fn cantor_spread_is_bounded_and_depth_stable() {
        let s = 1.0;
        let a = ahlfors_check(&cantor_dust(0.25, 2, 5).unwrap(), s, 200, (0.01, 0.2), 5).unwrap();
        let b = ahlfors_check(&cantor_dust(0.25, 2, 6).unwrap(), s, 200, (0.01, 0.2), 5).unwrap();
        assert!(a.spread() <= 40.0 && b.spread() <= 40.0);
        let ratio = a.spread() / b.spread();
        assert!((0.5..2.0).contains(&ratio), "{ratio}");
    }
}
