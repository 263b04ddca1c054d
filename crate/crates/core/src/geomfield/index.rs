//! Bounding-volume hierarchy over boundary primitives.

use crate::simsys::Primitives;
use crate::MAX_DIM;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Node {
    lo: [f64; MAX_DIM],
    hi: [f64; MAX_DIM],
    /// Leaf: first slot in `order`. Inner: left child.
    first: u32,
    /// Leaf: primitive count. Inner: 0.
    count: u32,
    /// Inner: right child.
    right: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Bvh<'a> {
    dim: usize,
    prims: &'a Primitives,
    nodes: Vec<Node>,
    order: Vec<u32>,
}

fn prim_bounds(prims: &Primitives, i: usize) -> ([f64; MAX_DIM], [f64; MAX_DIM]) {
    match prims {
        Primitives::Segments(s) => {
            let s = &s[i];
            (
                [s.a[0].min(s.b[0]), s.a[1].min(s.b[1]), 0.0],
                [s.a[0].max(s.b[0]), s.a[1].max(s.b[1]), 0.0],
            )
        }
        Primitives::Boxes(b) => (b[i].lo, b[i].hi),
    }
}

#[inline]
fn box_dist2(lo: &[f64; MAX_DIM], hi: &[f64; MAX_DIM], p: &[f64; MAX_DIM], dim: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..dim {
        let e = (lo[k] - p[k]).max(p[k] - hi[k]).max(0.0);
        acc += e * e;
    }
    acc
}

impl<'a> Bvh<'a> {
    pub(crate) fn new(prims: &'a Primitives, dim: usize) -> Self {
        let n = prims.len();
        let bounds: Vec<_> = (0..n).map(|i| prim_bounds(prims, i)).collect();
        let centroids: Vec<[f64; MAX_DIM]> = bounds
            .iter()
            .map(|(lo, hi)| std::array::from_fn(|k| 0.5 * (lo[k] + hi[k])))
            .collect();
        let mut bvh = Bvh {
            dim,
            prims,
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            order: (0..n as u32).collect(),
        };
        if n > 0 {
            bvh.build(0, n, &bounds, &centroids);
        }
        bvh
    }

    fn build(
        &mut self,
        start: usize,
        end: usize,
        bounds: &[([f64; MAX_DIM], [f64; MAX_DIM])],
        centroids: &[[f64; MAX_DIM]],
    ) -> u32 {
        let mut lo = [f64::INFINITY; MAX_DIM];
        let mut hi = [f64::NEG_INFINITY; MAX_DIM];
        let mut clo = [f64::INFINITY; MAX_DIM];
        let mut chi = [f64::NEG_INFINITY; MAX_DIM];
        for &i in &self.order[start..end] {
            let (bl, bh) = &bounds[i as usize];
            let c = &centroids[i as usize];
            for k in 0..MAX_DIM {
                lo[k] = lo[k].min(bl[k]);
                hi[k] = hi[k].max(bh[k]);
                clo[k] = clo[k].min(c[k]);
                chi[k] = chi[k].max(c[k]);
            }
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            lo,
            hi,
            first: start as u32,
            count: (end - start) as u32,
            right: 0,
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let axis = (0..self.dim)
            .max_by(|&a, &b| (chi[a] - clo[a]).total_cmp(&(chi[b] - clo[b])))
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a as usize][axis].total_cmp(&centroids[b as usize][axis])
        });
        let left = self.build(start, mid, bounds, centroids);
        let right = self.build(mid, end, bounds, centroids);
        let node = &mut self.nodes[id as usize];
        node.first = left;
        node.count = 0;
        node.right = right;
        id
    }

    #[inline]
    fn prim_distance(&self, i: usize, p: &[f64; MAX_DIM]) -> f64 {
        match self.prims {
            Primitives::Segments(s) => s[i].distance([p[0], p[1]]),
            Primitives::Boxes(b) => b[i].boundary_distance(p, self.dim),
        }
    }

    /// Distance from `p` to the nearest primitive. `upper` must be an upper
    /// bound on the answer (use `f64::INFINITY` when unknown).
    pub(crate) fn nearest(&self, p: &[f64; MAX_DIM], upper: f64) -> f64 {
        if self.nodes.is_empty() {
            return f64::INFINITY;
        }
        let mut best = upper;
        let mut best2 = if upper.is_finite() { upper * upper } else { f64::INFINITY };
        let mut stack: [u32; 64] = [0; 64];
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if box_dist2(&node.lo, &node.hi, p, self.dim) > best2 {
                continue;
            }
            if node.count > 0 {
                let start = node.first as usize;
                for &i in &self.order[start..start + node.count as usize] {
                    let d = self.prim_distance(i as usize, p);
                    if d < best {
                        best = d;
                        best2 = d * d;
                    }
                }
            } else {
                let (l, r) = (node.first, node.right);
                let dl = box_dist2(&self.nodes[l as usize].lo, &self.nodes[l as usize].hi, p, self.dim);
                let dr = box_dist2(&self.nodes[r as usize].lo, &self.nodes[r as usize].hi, p, self.dim);
                // push the farther child first so the nearer is explored first
                let (near, far, dfar) = if dl <= dr { (l, r, dr) } else { (r, l, dl) };
                if dfar <= best2 {
                    stack[top] = far;
                    top += 1;
                }
                stack[top] = near;
                top += 1;
            }
        }
        best
    }

    /// Calls `f(i)` for every primitive whose bounding box meets `B(p, r)`.
    pub(crate) fn for_each_near(&self, p: &[f64; MAX_DIM], r: f64, mut f: impl FnMut(usize)) {
        if self.nodes.is_empty() {
            return;
        }
        let r2 = r * r;
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if box_dist2(&node.lo, &node.hi, p, self.dim) > r2 {
                continue;
            }
            if node.count > 0 {
                let start = node.first as usize;
                for &i in &self.order[start..start + node.count as usize] {
                    let (lo, hi) = prim_bounds(self.prims, i as usize);
                    if box_dist2(&lo, &hi, p, self.dim) <= r2 {
                        f(i as usize);
                    }
                }
            } else {
                stack.push(node.first);
                stack.push(node.right);
            }
        }
    }
}

/// Brute-force reference used by tests.
#[cfg(test)]
pub(crate) fn brute_nearest(prims: &Primitives, dim: usize, p: &[f64; MAX_DIM]) -> f64 {
    match prims {
        Primitives::Segments(s) => s.iter().map(|s: &crate::simsys::Segment| s.distance([p[0], p[1]])).fold(f64::INFINITY, f64::min),
        Primitives::Boxes(b) => b
            .iter()
            .map(|b: &crate::simsys::AaBox| b.boundary_distance(p, dim))
            .fold(f64::INFINITY, f64::min),
    }
}
