use crate::error::{Error, Result};
use crate::simsys::{Family, SimilaritySystem};
use crate::MAX_DIM;

/// A planar line segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        (self.b[0] - self.a[0]).hypot(self.b[1] - self.a[1])
    }

    pub fn midpoint(&self) -> [f64; 2] {
        [0.5 * (self.a[0] + self.b[0]), 0.5 * (self.a[1] + self.b[1])]
    }

    pub fn point_at(&self, t: f64) -> [f64; 2] {
        [
            self.a[0] + t * (self.b[0] - self.a[0]),
            self.a[1] + t * (self.b[1] - self.a[1]),
        ]
    }

    /// Euclidean distance from `p` to the closed segment.
    #[inline]
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        let (dx, dy) = (self.b[0] - self.a[0], self.b[1] - self.a[1]);
        let (px, py) = (p[0] - self.a[0], p[1] - self.a[1]);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            ((px * dx + py * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (px - t * dx).hypot(py - t * dy)
    }

    /// Length of the part of the segment inside the closed disk `B(c, r)`.
    pub fn length_in_disk(&self, c: [f64; 2], r: f64) -> f64 {
        let (dx, dy) = (self.b[0] - self.a[0], self.b[1] - self.a[1]);
        let (fx, fy) = (self.a[0] - c[0], self.a[1] - c[1]);
        let a = dx * dx + dy * dy;
        if a == 0.0 {
            return 0.0;
        }
        let b = 2.0 * (fx * dx + fy * dy);
        let cc = fx * fx + fy * fy - r * r;
        let disc = b * b - 4.0 * a * cc;
        if disc <= 0.0 {
            return 0.0;
        }
        let sq = disc.sqrt();
        let t0 = ((-b - sq) / (2.0 * a)).max(0.0);
        let t1 = ((-b + sq) / (2.0 * a)).min(1.0);
        (t1 - t0).max(0.0) * a.sqrt()
    }
}

/// Axis-aligned box; coordinates beyond the ambient dimension are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AaBox {
    pub lo: [f64; MAX_DIM],
    pub hi: [f64; MAX_DIM],
}

impl AaBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Self {
        let mut b = AaBox {
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        b.lo[..lo.len()].copy_from_slice(lo);
        b.hi[..hi.len()].copy_from_slice(hi);
        b
    }

    pub fn center(&self) -> [f64; MAX_DIM] {
        std::array::from_fn(|k| 0.5 * (self.lo[k] + self.hi[k]))
    }

    /// Largest edge length over the first `dim` axes.
    pub fn side(&self, dim: usize) -> f64 {
        (0..dim).map(|k| self.hi[k] - self.lo[k]).fold(0.0, f64::max)
    }

    #[inline]
    pub fn contains(&self, p: &[f64; MAX_DIM], dim: usize) -> bool {
        (0..dim).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }

    /// Distance from `p` to the box boundary: distance to the box when
    /// outside, distance to the nearest face when inside.
    #[inline]
    pub fn boundary_distance(&self, p: &[f64; MAX_DIM], dim: usize) -> f64 {
        if self.contains(p, dim) {
            (0..dim)
                .map(|k| (p[k] - self.lo[k]).min(self.hi[k] - p[k]))
                .fold(f64::INFINITY, f64::min)
        } else {
            let mut acc = 0.0;
            for k in 0..dim {
                let e = (self.lo[k] - p[k]).max(p[k] - self.hi[k]).max(0.0);
                acc += e * e;
            }
            acc.sqrt()
        }
    }
}

/// The finite-depth primitives realizing a boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitives {
    Segments(Vec<Segment>),
    Boxes(Vec<AaBox>),
}

impl Primitives {
    pub fn len(&self) -> usize {
        match self {
            Primitives::Segments(s) => s.len(),
            Primitives::Boxes(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// How the domain Ω is derived from the primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainRule {
    /// Ω is the interior of a closed polygon (even-odd rule).
    InteriorOfPolygon,
    /// Ω is everything outside the union of the primitives.
    ComplementOfPrimitives,
}

/// Depth-`K` realization of a self-similar boundary Γ together with the
/// rule that carves the domain Ω out of space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGeometry {
    dim: usize,
    primitives: Primitives,
    /// Product of similarity ratios of the word generating each primitive.
    scales: Vec<f64>,
    depth: usize,
    approx_error: f64,
    domain_rule: DomainRule,
    family: Family,
}

impl BoundaryGeometry {
    /// A hand-built planar geometry; each segment's scale is its length.
    pub fn from_segments(segments: Vec<Segment>, domain_rule: DomainRule) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("geometry needs at least one segment"));
        }
        let scales = segments.iter().map(Segment::length).collect();
        Ok(Self {
            dim: 2,
            primitives: Primitives::Segments(segments),
            scales,
            depth: 0,
            approx_error: 0.0,
            domain_rule,
            family: Family::Custom,
        })
    }

    /// Closed polygon through `vertices` (last vertex joins the first).
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::invalid("polygon needs at least three vertices"));
        }
        let segments = (0..vertices.len())
            .map(|i| Segment::new(vertices[i], vertices[(i + 1) % vertices.len()]))
            .collect();
        Self::from_segments(segments, DomainRule::InteriorOfPolygon)
    }

    /// A hand-built box geometry with complement domain; scale is the box side.
    pub fn from_boxes(dim: usize, boxes: Vec<AaBox>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::invalid(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        if boxes.is_empty() {
            return Err(Error::invalid("geometry needs at least one box"));
        }
        let scales = boxes.iter().map(|b| b.side(dim)).collect();
        Ok(Self {
            dim,
            primitives: Primitives::Boxes(boxes),
            scales,
            depth: 0,
            approx_error: 0.0,
            domain_rule: DomainRule::ComplementOfPrimitives,
            family: Family::Custom,
        })
    }

    pub(crate) fn with_metadata(mut self, depth: usize, approx_error: f64, family: Family) -> Self {
        self.depth = depth;
        self.approx_error = approx_error;
        self.family = family;
        self
    }

    pub(crate) fn with_scales(mut self, scales: Vec<f64>) -> Self {
        debug_assert_eq!(scales.len(), self.primitives.len());
        self.scales = scales;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primitives(&self) -> &Primitives {
        &self.primitives
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Hausdorff-distance bound between this realization and the limit set.
    pub fn approx_error(&self) -> f64 {
        self.approx_error
    }

    pub fn domain_rule(&self) -> DomainRule {
        self.domain_rule
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    /// Axis-aligned bounding box of all primitives.
    pub fn bounding_box(&self) -> ([f64; MAX_DIM], [f64; MAX_DIM]) {
        let mut lo = [f64::INFINITY; MAX_DIM];
        let mut hi = [f64::NEG_INFINITY; MAX_DIM];
        match &self.primitives {
            Primitives::Segments(segs) => {
                for s in segs {
                    for p in [s.a, s.b] {
                        for k in 0..2 {
                            lo[k] = lo[k].min(p[k]);
                            hi[k] = hi[k].max(p[k]);
                        }
                    }
                }
            }
            Primitives::Boxes(boxes) => {
                for b in boxes {
                    for k in 0..self.dim {
                        lo[k] = lo[k].min(b.lo[k]);
                        hi[k] = hi[k].max(b.hi[k]);
                    }
                }
            }
        }
        for k in self.dim..MAX_DIM {
            lo[k] = 0.0;
            hi[k] = 0.0;
        }
        (lo, hi)
    }

    /// Diagonal of the bounding box; an upper bound on diam(Γ) up to `approx_error`.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (0..self.dim)
            .map(|k| (hi[k] - lo[k]).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Caps on generator output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorLimits {
    pub max_depth: usize,
    pub max_primitives: usize,
}

impl GeneratorLimits {
    pub const KOCH: Self = Self {
        max_depth: 10,
        max_primitives: 3 << 20,
    };

    /// Default caps for box families in dimension `dim`.
    pub fn boxes(dim: usize) -> Self {
        Self {
            max_depth: if dim >= 3 { 6 } else { 10 },
            max_primitives: 3 << 20,
        }
    }

    fn check(&self, depth: usize, branching: usize, roots: usize) -> Result<()> {
        let count = (roots as u128).saturating_mul((branching as u128).saturating_pow(depth as u32));
        if depth > self.max_depth || count > self.max_primitives as u128 {
            return Err(Error::DepthOverflow {
                depth,
                count,
                cap: self.max_primitives,
            });
        }
        Ok(())
    }
}

/// The modified Koch curve on the unit segment, built by leaf substitution.
///
/// Each segment `p → q` is replaced by `p → a → apex → b → q` with the apex
/// on the right of the direction of travel.
pub fn koch_curve(lambda: f64, depth: usize) -> Result<(Vec<Segment>, Vec<f64>)> {
    SimilaritySystem::koch(lambda)?;
    GeneratorLimits::KOCH.check(depth, 4, 1)?;
    Ok(substitute(
        vec![Segment::new([0.0, 0.0], [1.0, 0.0])],
        vec![1.0],
        lambda,
        depth,
    ))
}

fn substitute(mut segs: Vec<Segment>, mut scales: Vec<f64>, lambda: f64, depth: usize) -> (Vec<Segment>, Vec<f64>) {
    let outer = (1.0 - lambda) / 2.0;
    let height = lambda * 3f64.sqrt() / 2.0;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(segs.len() * 4);
        let mut next_scales = Vec::with_capacity(segs.len() * 4);
        for (s, &scale) in segs.iter().zip(&scales) {
            let v = [s.b[0] - s.a[0], s.b[1] - s.a[1]];
            // right-hand normal, same length as v
            let n = [v[1], -v[0]];
            let a = s.point_at(outer);
            let b = s.point_at(1.0 - outer);
            let apex = [
                s.a[0] + 0.5 * v[0] + height * n[0],
                s.a[1] + 0.5 * v[1] + height * n[1],
            ];
            next.extend([
                Segment::new(s.a, a),
                Segment::new(a, apex),
                Segment::new(apex, b),
                Segment::new(b, s.b),
            ]);
            next_scales.extend([scale * outer, scale * lambda, scale * lambda, scale * outer]);
        }
        segs = next;
        scales = next_scales;
    }
    (segs, scales)
}

/// Koch snowflake: the substitution applied to each side of the unit
/// equilateral triangle, traversed counterclockwise so curves point outward.
pub fn koch_snowflake(lambda: f64, depth: usize) -> Result<BoundaryGeometry> {
    koch_snowflake_with(lambda, depth, &GeneratorLimits::KOCH)
}

pub fn koch_snowflake_with(lambda: f64, depth: usize, limits: &GeneratorLimits) -> Result<BoundaryGeometry> {
    let system = SimilaritySystem::koch(lambda)?;
    limits.check(depth, 4, 3)?;
    let triangle = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
    let sides = (0..3)
        .map(|i| Segment::new(triangle[i], triangle[(i + 1) % 3]))
        .collect();
    let (segs, scales) = substitute(sides, vec![1.0; 3], lambda, depth);
    let approx = system.max_ratio().powi(depth as i32);
    Ok(BoundaryGeometry::from_segments(segs, DomainRule::InteriorOfPolygon)?
        .with_scales(scales)
        .with_metadata(depth, approx, Family::Koch(lambda)))
}

/// Refines every box into the images of the unit cell under the system's
/// maps, transported into the box (leaf substitution).
fn refine_boxes(system: &SimilaritySystem, cell_lo: f64, depth: usize) -> (Vec<AaBox>, Vec<f64>) {
    let dim = system.ambient_dim();
    let unit = AaBox::new(&vec![cell_lo; dim], &vec![cell_lo + 1.0; dim]);
    let children: Vec<(AaBox, f64)> = system
        .maps()
        .iter()
        .map(|m| {
            let lo = m.apply(&unit.lo[..dim]);
            let hi = m.apply(&unit.hi[..dim]);
            let (lo, hi): (Vec<f64>, Vec<f64>) =
                lo.iter().zip(&hi).map(|(&a, &b)| (a.min(b), a.max(b))).unzip();
            (AaBox::new(&lo, &hi), m.ratio())
        })
        .collect();

    let mut boxes = vec![unit];
    let mut scales = vec![1.0];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(boxes.len() * children.len());
        let mut next_scales = Vec::with_capacity(boxes.len() * children.len());
        for (parent, &scale) in boxes.iter().zip(&scales) {
            let side = parent.hi[0] - parent.lo[0];
            for (child, ratio) in &children {
                let mut b = *child;
                for k in 0..dim {
                    b.lo[k] = parent.lo[k] + (child.lo[k] - cell_lo) * side;
                    b.hi[k] = parent.lo[k] + (child.hi[k] - cell_lo) * side;
                }
                next.push(b);
                next_scales.push(scale * ratio);
            }
        }
        boxes = next;
        scales = next_scales;
    }
    (boxes, scales)
}

fn box_family(system: SimilaritySystem, cell_lo: f64, depth: usize, limits: &GeneratorLimits) -> Result<BoundaryGeometry> {
    let dim = system.ambient_dim();
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::invalid(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    limits.check(depth, system.maps().len(), 1)?;
    let (boxes, scales) = refine_boxes(&system, cell_lo, depth);
    let approx = (dim as f64).sqrt() * system.max_ratio().powi(depth as i32);
    Ok(BoundaryGeometry::from_boxes(dim, boxes)?
        .with_scales(scales)
        .with_metadata(depth, approx, system.family()))
}

/// Vicsek snowflake as a union of `(2^d + 1)^depth` boxes inside `[-1/2, 1/2]^d`.
pub fn vicsek(lambda: f64, dim: usize, depth: usize) -> Result<BoundaryGeometry> {
    vicsek_with(lambda, dim, depth, &GeneratorLimits::boxes(dim))
}

pub fn vicsek_with(lambda: f64, dim: usize, depth: usize, limits: &GeneratorLimits) -> Result<BoundaryGeometry> {
    if !(2..=3).contains(&dim) {
        return Err(Error::invalid(format!("Vicsek geometry needs d in {{2, 3}}, got {dim}")));
    }
    box_family(SimilaritySystem::vicsek(lambda, dim)?, -0.5, depth, limits)
}

/// Cantor dust as a union of `2^(d·depth)` boxes of side `λ^depth` inside `[0, 1]^d`.
pub fn cantor_dust(lambda: f64, dim: usize, depth: usize) -> Result<BoundaryGeometry> {
    cantor_dust_with(lambda, dim, depth, &GeneratorLimits::boxes(dim))
}

pub fn cantor_dust_with(lambda: f64, dim: usize, depth: usize, limits: &GeneratorLimits) -> Result<BoundaryGeometry> {
    box_family(SimilaritySystem::cantor_dust(lambda, dim)?, 0.0, depth, limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_boxes(boxes: &[AaBox]) -> Vec<[f64; 6]> {
        let mut v: Vec<[f64; 6]> = boxes
            .iter()
            .map(|b| [b.lo[0], b.lo[1], b.lo[2], b.hi[0], b.hi[1], b.hi[2]])
            .collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    }

    fn max_gap<const N: usize>(a: &[[f64; N]], b: &[[f64; N]]) -> f64 {
        assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    fn segments(g: &BoundaryGeometry) -> &[Segment] {
        match g.primitives() {
            Primitives::Segments(s) => s,
            _ => panic!("expected segments"),
        }
    }

    fn boxes(g: &BoundaryGeometry) -> &[AaBox] {
        match g.primitives() {
            Primitives::Boxes(b) => b,
            _ => panic!("expected boxes"),
        }
    }

    /// Signed area via the shoelace formula; positive for counterclockwise.
    fn signed_area(segs: &[Segment]) -> f64 {
        0.5 * segs.iter().map(|s| s.a[0] * s.b[1] - s.b[0] * s.a[1]).sum::<f64>()
    }

    #[test]
    fn depth_zero_is_the_triangle() {
        let g = koch_snowflake(1.0 / 3.0, 0).unwrap();
        assert_eq!(g.len(), 3);
        assert!(segments(&g).iter().all(|s| (s.length() - 1.0).abs() < 1e-15));
        assert!((signed_area(segments(&g)) - 3f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn koch_third_depth_one_has_twelve_thirds() {
        let g = koch_snowflake(1.0 / 3.0, 1).unwrap();
        assert_eq!(g.len(), 12);
        for s in segments(&g) {
            assert!((s.length() - 1.0 / 3.0).abs() < 1e-14);
        }
        // bumps point outward: area grows by three triangles of side 1/3
        let expected = 3f64.sqrt() / 4.0 * (1.0 + 3.0 / 9.0);
        assert!((signed_area(segments(&g)) - expected).abs() < 1e-14);
    }

    #[test]
    fn koch_quarter_depth_two_lengths() {
        let g = koch_snowflake(0.25, 2).unwrap();
        assert_eq!(g.len(), 48);
        let allowed = [0.375 * 0.375, 0.375 * 0.25, 0.25 * 0.25];
        for s in segments(&g) {
            assert!(allowed.iter().any(|l| (s.length() - l).abs() < 1e-14), "{}", s.length());
        }
        for (s, scale) in segments(&g).iter().zip(g.scales()) {
            assert!((s.length() - scale).abs() < 1e-14);
        }
    }

    #[test]
    fn koch_curve_recursion_matches_map_images() {
        let lambda = 0.29;
        let system = SimilaritySystem::koch(lambda).unwrap();
        for depth in 0..4 {
            let (curve, _) = koch_curve(lambda, depth).unwrap();
            let (refined, _) = koch_curve(lambda, depth + 1).unwrap();
            let images: Vec<Segment> = system
                .maps()
                .iter()
                .flat_map(|m| {
                    curve.iter().map(move |s| {
                        let a = m.apply(&s.a);
                        let b = m.apply(&s.b);
                        Segment::new([a[0], a[1]], [b[0], b[1]])
                    })
                })
                .collect();
            // both lists traverse the curve from (0,0) to (1,0)
            let flat = |v: &[Segment]| v.iter().map(|s| [s.a[0], s.a[1], s.b[0], s.b[1]]).collect::<Vec<_>>();
            let gap = max_gap(&flat(&images), &flat(&refined));
            assert!(gap < 1e-12, "depth {depth}: {gap}");
        }
    }

    #[test]
    fn box_recursion_matches_map_images() {
        for system in [
            SimilaritySystem::vicsek(0.3, 2).unwrap(),
            SimilaritySystem::cantor_dust(0.2, 3).unwrap(),
        ] {
            let cell_lo = if matches!(system.family(), Family::Vicsek(_)) { -0.5 } else { 0.0 };
            let dim = system.ambient_dim();
            for depth in 0..3 {
                let (current, _) = refine_boxes(&system, cell_lo, depth);
                let (refined, _) = refine_boxes(&system, cell_lo, depth + 1);
                let images: Vec<AaBox> = system
                    .maps()
                    .iter()
                    .flat_map(|m| {
                        current.iter().map(move |b| {
                            let lo = m.apply(&b.lo[..dim]);
                            let hi = m.apply(&b.hi[..dim]);
                            AaBox::new(&lo, &hi)
                        })
                    })
                    .collect();
                let gap = max_gap(&sorted_boxes(&images), &sorted_boxes(&refined));
                assert!(gap < 1e-12, "depth {depth}: {gap}");
            }
        }
    }

    #[test]
    fn vicsek_examples() {
        let g = vicsek(0.25, 2, 0).unwrap();
        assert_eq!(g.len(), 1);

        let g = vicsek(0.25, 2, 1).unwrap();
        assert_eq!(g.len(), 5);
        let mut sides: Vec<f64> = boxes(&g).iter().map(|b| b.side(2)).collect();
        sides.sort_by(f64::total_cmp);
        assert!(sides[..4].iter().all(|s| (s - 0.25).abs() < 1e-15));
        assert!((sides[4] - 0.5).abs() < 1e-15);
        assert_eq!(g.domain_rule(), DomainRule::ComplementOfPrimitives);

        let g = vicsek(1.0 / 3.0, 3, 2).unwrap();
        assert_eq!(g.len(), 81);
        assert!(boxes(&g).iter().all(|b| (b.side(3) - 1.0 / 9.0).abs() < 1e-14));
    }

    #[test]
    fn cantor_examples() {
        let g = cantor_dust(0.25, 2, 0).unwrap();
        assert_eq!(g.len(), 1);

        let g = cantor_dust(0.25, 2, 1).unwrap();
        assert_eq!(g.len(), 4);
        let mut corners: Vec<[f64; 2]> = boxes(&g).iter().map(|b| [b.lo[0], b.lo[1]]).collect();
        corners.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(corners, vec![[0.0, 0.0], [0.0, 0.75], [0.75, 0.0], [0.75, 0.75]]);

        let g = cantor_dust(0.25, 2, 3).unwrap();
        assert_eq!(g.len(), 64);
        assert!(boxes(&g).iter().all(|b| (b.side(2) - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn approx_error_contracts_geometrically() {
        for depth in 0..6 {
            let a = koch_snowflake(0.3, depth).unwrap();
            let b = koch_snowflake(0.3, depth + 1).unwrap();
            let ratio = SimilaritySystem::koch(0.3).unwrap().max_ratio();
            assert!(b.approx_error() <= ratio * a.approx_error() * (1.0 + 1e-12));
            assert!(a.approx_error() <= a.diameter() * ratio.powi(depth as i32) + 1e-15);

            let c = vicsek(0.2, 2, depth).unwrap();
            assert!(c.approx_error() <= 2f64.sqrt() * 0.6f64.powi(depth as i32) + 1e-15);
        }
    }

    #[test]
    fn depth_cap_is_enforced() {
        assert!(matches!(koch_snowflake(1.0 / 3.0, 11), Err(Error::DepthOverflow { .. })));
        assert!(matches!(vicsek(0.3, 3, 7), Err(Error::DepthOverflow { .. })));
        let tight = GeneratorLimits {
            max_depth: 10,
            max_primitives: 100,
        };
        assert!(matches!(cantor_dust_with(0.25, 2, 4, &tight), Err(Error::DepthOverflow { count: 256, .. })));
    }

    #[test]
    fn segment_disk_clipping() {
        let s = Segment::new([0.0, 0.0], [1.0, 0.0]);
        assert!((s.length_in_disk([0.5, 0.0], 0.2) - 0.4).abs() < 1e-15);
        assert!((s.length_in_disk([0.0, 0.0], 0.2) - 0.2).abs() < 1e-15);
        assert_eq!(s.length_in_disk([0.5, 1.0], 0.5), 0.0);
        assert!((s.length_in_disk([0.5, 0.3], 0.5) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn box_boundary_distance() {
        let b = AaBox::new(&[0.0, 0.0], &[1.0, 1.0]);
        assert_eq!(b.boundary_distance(&[0.5, 0.5, 0.0], 2), 0.5);
        assert_eq!(b.boundary_distance(&[2.0, 0.5, 0.0], 2), 1.0);
        assert!((b.boundary_distance(&[2.0, 2.0, 0.0], 2) - 2f64.sqrt()).abs() < 1e-15);
    }
}
