use crate::math::{vec3, Aabb, Vec3};

type V = Vec3<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: V,
    /// Not necessarily unit length; hit distances are in units of `|dir|`.
    pub dir: V,
}

impl Ray {
    pub fn new(origin: V, dir: V) -> Self {
        Self { origin, dir }
    }

    pub fn at(&self, t: f64) -> V {
        self.origin + self.dir * t
    }
}

/// Nearest intersection with a triangle soup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriHit {
    pub t: f64,
    /// Index into the triangle list the hierarchy was built from.
    pub triangle: u32,
    /// Barycentric weights of the second and third corners.
    pub u: f64,
    pub v: f64,
}

/// Moller-Trumbore ray/triangle test, two-sided. Returns `(t, u, v)` for `t` in `(t_min, t_max)`.
#[inline]
pub fn intersect_triangle(
    ray: &Ray,
    [a, b, c]: &[V; 3],
    t_min: f64,
    t_max: f64,
) -> Option<(f64, f64, f64)> {
    let e1 = *b - *a;
    let e2 = *c - *a;
    let pvec = ray.dir.cross(e2);
    let det = e1.dot(pvec);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin - *a;
    let u = s.dot(pvec) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = ray.dir.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv;
    if t > t_min && t < t_max {
        Some((t, u, v))
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    bounds: Aabb<f64>,
    /// First primitive for leaves, left child for interior nodes (right is `first + 1`).
    first: u32,
    /// Primitive count; zero marks an interior node.
    count: u32,
}

const BINS: usize = 12;
const MAX_LEAF: usize = 4;
// beyond this depth nodes split by count so traversal stacks stay bounded
const MAX_SAH_DEPTH: usize = 48;
const STACK: usize = 128;
const TRAVERSAL_COST: f64 = 1.0;
const INTERSECT_COST: f64 = 1.0;

/// Binned-SAH bounding volume hierarchy over triangles.
#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<Node>,
    /// Triangle corners in leaf order.
    tris: Vec<[V; 3]>,
    /// Original triangle index for each entry of `tris`.
    ids: Vec<u32>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BvhError {
    #[error("cannot build a hierarchy over zero triangles")]
    Empty,
    #[error("triangle {0} has a non-finite corner")]
    NonFinite(usize),
}

impl Bvh {
    pub fn build(positions: &[V], triangles: &[[u32; 3]]) -> Result<Self, BvhError> {
        let tris: Vec<[V; 3]> = triangles
            .iter()
            .map(|t| t.map(|i| positions[i as usize]))
            .collect();
        Self::from_triangles(tris)
    }

    pub fn from_triangles(tris: Vec<[V; 3]>) -> Result<Self, BvhError> {
        if tris.is_empty() {
            return Err(BvhError::Empty);
        }
        if let Some(bad) = tris.iter().position(|t| t.iter().any(|p| !p.is_finite())) {
            return Err(BvhError::NonFinite(bad));
        }
        let bounds: Vec<Aabb<f64>> = tris.iter().map(Aabb::from_points).collect();
        let centroids: Vec<V> = bounds.iter().map(|b| b.center()).collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * tris.len() / MAX_LEAF + 1);
        nodes.push(Node {
            bounds: Aabb::empty(),
            first: 0,
            count: tris.len() as u32,
        });
        let mut stack = vec![(0usize, 0usize)];
        while let Some((ni, depth)) = stack.pop() {
            let (first, count) = (nodes[ni].first as usize, nodes[ni].count as usize);
            let slice = &mut order[first..first + count];
            let node_bounds = slice
                .iter()
                .fold(Aabb::empty(), |b, &i| b.union(&bounds[i as usize]));
            nodes[ni].bounds = node_bounds;
            if count <= MAX_LEAF {
                continue;
            }
            let planned = if depth < MAX_SAH_DEPTH {
                split(slice, &bounds, &centroids, &node_bounds)
            } else {
                median_split(slice, &centroids)
            };
            let Some(mid) = planned else {
                continue;
            };
            let left = nodes.len();
            nodes.push(Node {
                bounds: Aabb::empty(),
                first: first as u32,
                count: mid as u32,
            });
            nodes.push(Node {
                bounds: Aabb::empty(),
                first: (first + mid) as u32,
                count: (count - mid) as u32,
            });
            nodes[ni].first = left as u32;
            nodes[ni].count = 0;
            stack.push((left + 1, depth + 1));
            stack.push((left, depth + 1));
        }
        let tris_ordered = order.iter().map(|&i| tris[i as usize]).collect();
        Ok(Self {
            nodes,
            tris: tris_ordered,
            ids: order,
        })
    }

    pub fn bounds(&self) -> Aabb<f64> {
        self.nodes[0].bounds
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Every original triangle index, in leaf order.
    pub fn leaf_triangles(&self) -> &[u32] {
        &self.ids
    }

    /// Checks that each node bounds its children and every triangle sits in exactly one leaf.
    pub fn check_structure(&self) -> bool {
        let mut seen = vec![0u32; self.tris.len()];
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let n = &self.nodes[ni];
            if n.count > 0 {
                for k in n.first..n.first + n.count {
                    seen[k as usize] += 1;
                    let tb = Aabb::from_points(&self.tris[k as usize]);
                    if !(n.bounds.contains(tb.min) && n.bounds.contains(tb.max)) {
                        return false;
                    }
                }
            } else {
                for c in [n.first as usize, n.first as usize + 1] {
                    let cb = self.nodes[c].bounds;
                    if !(n.bounds.contains(cb.min) && n.bounds.contains(cb.max)) {
                        return false;
                    }
                    stack.push(c);
                }
            }
        }
        seen.iter().all(|&s| s == 1)
    }

    /// Nearest hit with `t` in `(t_min, t_max)`.
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<TriHit> {
        let inv = vec3(1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z);
        let mut best: Option<TriHit> = None;
        let mut t_best = t_max;
        let mut stack = [0u32; STACK];
        let mut sp = 0usize;
        self.nodes[0]
            .bounds
            .intersect_ray(ray.origin, inv, t_min, t_best)?;
        stack[sp] = 0;
        sp += 1;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            if node.count > 0 {
                for k in node.first..node.first + node.count {
                    if let Some((t, u, v)) =
                        intersect_triangle(ray, &self.tris[k as usize], t_min, t_best)
                    {
                        t_best = t;
                        best = Some(TriHit {
                            t,
                            triangle: self.ids[k as usize],
                            u,
                            v,
                        });
                    }
                }
                continue;
            }
            let (l, r) = (node.first, node.first + 1);
            let hl = self.nodes[l as usize]
                .bounds
                .intersect_ray(ray.origin, inv, t_min, t_best);
            let hr = self.nodes[r as usize]
                .bounds
                .intersect_ray(ray.origin, inv, t_min, t_best);
            match (hl, hr) {
                (Some((tl, _)), Some((tr, _))) => {
                    // push the farther child first so the nearer one is visited next
                    let (near, far) = if tl <= tr { (l, r) } else { (r, l) };
                    stack[sp] = far;
                    stack[sp + 1] = near;
                    sp += 2;
                }
                (Some(_), None) => {
                    stack[sp] = l;
                    sp += 1;
                }
                (None, Some(_)) => {
                    stack[sp] = r;
                    sp += 1;
                }
                (None, None) => {}
            }
        }
        best
    }

    /// True if anything is hit with `t` in `(t_min, t_max)`.
    pub fn occluded(&self, ray: &Ray, t_min: f64, t_max: f64) -> bool {
        let inv = vec3(1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z);
        let mut stack = [0u32; STACK];
        let mut sp = 1usize;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            if node
                .bounds
                .intersect_ray(ray.origin, inv, t_min, t_max)
                .is_none()
            {
                continue;
            }
            if node.count > 0 {
                for k in node.first..node.first + node.count {
                    if intersect_triangle(ray, &self.tris[k as usize], t_min, t_max).is_some() {
                        return true;
                    }
                }
            } else {
                stack[sp] = node.first;
                stack[sp + 1] = node.first + 1;
                sp += 2;
            }
        }
        false
    }
}

/// Partitions `slice` in place by the cheapest binned SAH plane.
/// Returns the size of the left part, or `None` when a leaf is cheaper.
fn split(
    slice: &mut [u32],
    bounds: &[Aabb<f64>],
    centroids: &[V],
    node_bounds: &Aabb<f64>,
) -> Option<usize> {
    let cb = slice.iter().fold(Aabb::empty(), |mut b, &i| {
        b.grow(centroids[i as usize]);
        b
    });
    let extent = cb.extent();
    let mut best: Option<(f64, usize, usize)> = None;
    for axis in 0..3 {
        if !(extent[axis] > 0.0) {
            continue;
        }
        let scale = BINS as f64 / extent[axis];
        let bin_of = |i: u32| {
            (((centroids[i as usize][axis] - cb.min[axis]) * scale) as usize).min(BINS - 1)
        };
        let mut counts = [0usize; BINS];
        let mut boxes = [Aabb::empty(); BINS];
        for &i in slice.iter() {
            let b = bin_of(i);
            counts[b] += 1;
            boxes[b] = boxes[b].union(&bounds[i as usize]);
        }
        let mut right_area = [0.0; BINS];
        let mut right_count = [0usize; BINS];
        let (mut acc, mut n) = (Aabb::empty(), 0);
        for b in (1..BINS).rev() {
            acc = acc.union(&boxes[b]);
            n += counts[b];
            right_area[b] = acc.surface_area();
            right_count[b] = n;
        }
        let (mut acc, mut n) = (Aabb::empty(), 0);
        for b in 0..BINS - 1 {
            acc = acc.union(&boxes[b]);
            n += counts[b];
            if n == 0 || right_count[b + 1] == 0 {
                continue;
            }
            let cost =
                acc.surface_area() * n as f64 + right_area[b + 1] * right_count[b + 1] as f64;
            if best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, axis, b));
            }
        }
    }
    let area = node_bounds.surface_area();
    let leaf_cost = INTERSECT_COST * slice.len() as f64;
    let Some((cost, axis, b)) = best else {
        return median_split(slice, centroids);
    };
    let split_cost = TRAVERSAL_COST + INTERSECT_COST * cost / area.max(f64::MIN_POSITIVE);
    if split_cost >= leaf_cost && slice.len() <= 2 * MAX_LEAF {
        return None;
    }
    let scale = BINS as f64 / extent[axis];
    let mut left = 0;
    for k in 0..slice.len() {
        let i = slice[k];
        let bin = (((centroids[i as usize][axis] - cb.min[axis]) * scale) as usize).min(BINS - 1);
        if bin <= b {
            slice.swap(k, left);
            left += 1;
        }
    }
    if left == 0 || left == slice.len() {
        return median_split(slice, centroids);
    }
    Some(left)
}

/// Splits by count along the widest centroid axis.
fn median_split(slice: &mut [u32], centroids: &[V]) -> Option<usize> {
    if slice.len() <= MAX_LEAF {
        return None;
    }
    let cb = slice.iter().fold(Aabb::empty(), |mut b, &i| {
        b.grow(centroids[i as usize]);
        b
    });
    let e = cb.extent();
    let axis = if e.x >= e.y && e.x >= e.z {
        0
    } else if e.y >= e.z {
        1
    } else {
        2
    };
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    Some(mid)
}
