use crate::error::{Error, Result};
use crate::simsys::{BoundaryGeometry, DomainRule, Primitives};
use crate::MAX_DIM;

/// Uniform cell-centered grid with an Ω-membership mask.
///
/// Cells are indexed with axis 0 varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    origin: [f64; MAX_DIM],
    spacing: f64,
    dims: [usize; MAX_DIM],
    mask: Vec<bool>,
}

const MIN_RESOLUTION: usize = 8;

impl Grid {
    /// An unmasked grid; every cell starts outside Ω.
    pub fn new(dim: usize, origin: &[f64], spacing: f64, dims: &[usize]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM || origin.len() != dim || dims.len() != dim {
            return Err(Error::invalid(format!("bad grid shape for dimension {dim}")));
        }
        if !(spacing > 0.0) || dims.contains(&0) {
            return Err(Error::invalid("grid spacing and sizes must be positive"));
        }
        let mut o = [0.0; MAX_DIM];
        o[..dim].copy_from_slice(origin);
        let mut n = [1; MAX_DIM];
        n[..dim].copy_from_slice(dims);
        let total = n.iter().product();
        Ok(Self {
            dim,
            origin: o,
            spacing,
            dims: n,
            mask: vec![false; total],
        })
    }

    /// Grid over the box `[lo, hi]` with `resolution` cells along the longest
    /// axis, masked by the geometry's domain rule.
    pub fn over_box(geometry: &BoundaryGeometry, lo: &[f64], hi: &[f64], resolution: usize) -> Result<Self> {
        let dim = geometry.dim();
        if lo.len() != dim || hi.len() != dim {
            return Err(Error::invalid("box corners must match the geometry dimension"));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::invalid(format!("resolution {resolution} below {MIN_RESOLUTION}")));
        }
        let extent = (0..dim).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
        if !(extent > 0.0) {
            return Err(Error::invalid("grid box has no extent"));
        }
        let h = extent / resolution as f64;
        let dims: Vec<usize> = (0..dim)
            .map(|k| (((hi[k] - lo[k]) / h) - 1e-9).ceil().max(1.0) as usize)
            .collect();
        let mut grid = Self::new(dim, lo, h, &dims)?;
        grid.apply_domain_rule(geometry)?;
        if grid.masked_count() == 0 {
            return Err(Error::EmptyDomain);
        }
        Ok(grid)
    }

    /// Replaces the Ω mask; errors if it selects no cell.
    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.mask.len() {
            return Err(Error::invalid("mask length differs from cell count"));
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::EmptyDomain);
        }
        self.mask = mask;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims[..self.dim]
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn in_omega(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Upper corner of the grid box.
    pub fn upper(&self) -> [f64; MAX_DIM] {
        std::array::from_fn(|k| self.origin[k] + self.dims[k] as f64 * self.spacing)
    }

    /// Diagonal of the grid box.
    pub fn diameter(&self) -> f64 {
        (0..self.dim)
            .map(|k| (self.dims[k] as f64 * self.spacing).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; MAX_DIM] {
        let i0 = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [i0, rest % self.dims[1], rest / self.dims[1]]
    }

    #[inline]
    pub fn linear_index(&self, m: [usize; MAX_DIM]) -> usize {
        m[0] + self.dims[0] * (m[1] + self.dims[1] * m[2])
    }

    #[inline]
    pub fn center(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let mut c = [0.0; MAX_DIM];
        for k in 0..self.dim {
            c[k] = self.origin[k] + (m[k] as f64 + 0.5) * self.spacing;
        }
        c
    }

    /// Cell containing the point, if inside the grid box.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        let mut m = [0; MAX_DIM];
        for k in 0..self.dim {
            let t = ((p[k] - self.origin[k]) / self.spacing).floor();
            if t < 0.0 || t >= self.dims[k] as f64 {
                return None;
            }
            m[k] = t as usize;
        }
        Some(self.linear_index(m))
    }

    /// The `2d` axis neighbors (`None` past the grid edge), ordered
    /// `(-axis0, +axis0, -axis1, +axis1, ...)`.
    #[inline]
    pub fn axis_neighbors(&self, idx: usize) -> [Option<usize>; 2 * MAX_DIM] {
        let m = self.multi_index(idx);
        let mut out = [None; 2 * MAX_DIM];
        let mut stride = 1;
        for k in 0..self.dim {
            if m[k] > 0 {
                out[2 * k] = Some(idx - stride);
            }
            if m[k] + 1 < self.dims[k] {
                out[2 * k + 1] = Some(idx + stride);
            }
            stride *= self.dims[k];
        }
        out
    }

    fn apply_domain_rule(&mut self, geometry: &BoundaryGeometry) -> Result<()> {
        match (geometry.domain_rule(), geometry.primitives()) {
            (DomainRule::InteriorOfPolygon, Primitives::Segments(segs)) => {
                if self.dim != 2 {
                    return Err(Error::invalid("polygon domains are planar"));
                }
                self.fill_polygon(segs.iter().map(|s| (s.a, s.b)));
            }
            (DomainRule::ComplementOfPrimitives, Primitives::Boxes(boxes)) => {
                self.mask.fill(true);
                let h = self.spacing;
                for b in boxes {
                    // cells whose centers lie in the closed box
                    let mut lo = [0usize; MAX_DIM];
                    let mut hi = [0usize; MAX_DIM];
                    let mut empty = false;
                    for k in 0..self.dim {
                        let a = ((b.lo[k] - self.origin[k]) / h - 0.5).ceil().max(0.0);
                        let z = ((b.hi[k] - self.origin[k]) / h - 0.5).floor();
                        if z < a || a >= self.dims[k] as f64 {
                            empty = true;
                            break;
                        }
                        lo[k] = a as usize;
                        hi[k] = (z as usize).min(self.dims[k] - 1);
                    }
                    if empty {
                        continue;
                    }
                    for i2 in lo[2]..=hi[2] {
                        for i1 in lo[1]..=hi[1] {
                            for i0 in lo[0]..=hi[0] {
                                let idx = self.linear_index([i0, i1, i2]);
                                self.mask[idx] = false;
                            }
                        }
                    }
                }
            }
            (DomainRule::ComplementOfPrimitives, Primitives::Segments(_)) => {
                // segments have no volume; every cell center is off the curve generically
                self.mask.fill(true);
            }
            (DomainRule::InteriorOfPolygon, Primitives::Boxes(_)) => {
                return Err(Error::invalid("box primitives cannot bound a polygon"));
            }
        }
        Ok(())
    }

    /// Even-odd scanline fill over cell-center rows.
    fn fill_polygon(&mut self, edges: impl Iterator<Item = ([f64; 2], [f64; 2])>) {
        let (nx, ny) = (self.dims[0], self.dims[1]);
        let h = self.spacing;
        let row_y = |j: usize| self.origin[1] + (j as f64 + 0.5) * h;
        let mut crossings: Vec<Vec<f64>> = vec![Vec::new(); ny];
        for (a, b) in edges {
            let (ylo, yhi) = (a[1].min(b[1]), a[1].max(b[1]));
            let first = ((ylo - self.origin[1]) / h - 0.5).ceil().max(0.0) as usize;
            let mut j = first;
            while j < ny {
                let y = row_y(j);
                if y > yhi {
                    break;
                }
                // half-open rule: count the edge when y is in [min, max)
                if (a[1] <= y) != (b[1] <= y) {
                    let t = (y - a[1]) / (b[1] - a[1]);
                    crossings[j].push(a[0] + t * (b[0] - a[0]));
                }
                j += 1;
            }
        }
        for (j, xs) in crossings.iter_mut().enumerate() {
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let from = ((pair[0] - self.origin[0]) / h - 0.5).ceil().max(0.0) as usize;
                let to = ((pair[1] - self.origin[0]) / h - 0.5).floor();
                if to < 0.0 {
                    continue;
                }
                let to = (to as usize).min(nx - 1);
                for i in from..=to {
                    self.mask[i + nx * j] = true;
                }
            }
        }
    }
}

/// Grid over the geometry's bounding box inflated by `margin`, made cubic,
/// with `resolution` cells per axis.
pub fn build_grid(geometry: &BoundaryGeometry, resolution: usize, margin: f64) -> Result<Grid> {
    if !(margin >= 0.0) {
        return Err(Error::invalid(format!("margin {margin} must be nonnegative")));
    }
    let dim = geometry.dim();
    let (lo, hi) = geometry.bounding_box();
    let extent = (0..dim).map(|k| hi[k] - lo[k]).fold(0.0, f64::max) + 2.0 * margin;
    let mut blo = vec![0.0; dim];
    let mut bhi = vec![0.0; dim];
    for k in 0..dim {
        let mid = 0.5 * (lo[k] + hi[k]);
        blo[k] = mid - 0.5 * extent;
        bhi[k] = mid + 0.5 * extent;
    }
    Grid::over_box(geometry, &blo, &bhi, resolution)
}
