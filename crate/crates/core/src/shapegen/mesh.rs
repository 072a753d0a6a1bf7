use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Result, ShapeError};
use crate::math::{vec3, Aabb, Similarity, Vec3};
use crate::nurbs::NurbsSurface;
use crate::real::Real;

/// Indexed triangle mesh with per-vertex unit normals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh<T> {
    pub positions: Vec<Vec3<T>>,
    pub normals: Vec<Vec3<T>>,
    pub triangles: Vec<[u32; 3]>,
}

impl<T: Real> TriangleMesh<T> {
    pub fn new(
        positions: Vec<Vec3<T>>,
        normals: Vec<Vec3<T>>,
        triangles: Vec<[u32; 3]>,
    ) -> Result<Self> {
        let mesh = Self {
            positions,
            normals,
            triangles,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        if self.normals.len() != self.positions.len() {
            return Err(ShapeError::Mesh("one normal per vertex required".into()));
        }
        let n = self.positions.len() as u32;
        if self.triangles.iter().flatten().any(|&i| i >= n) {
            return Err(ShapeError::Mesh("triangle index out of range".into()));
        }
        if self
            .normals
            .iter()
            .any(|v| (v.norm() - T::one()).abs() > T::lit(1e-6))
        {
            return Err(ShapeError::Mesh("normals must be unit length".into()));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, tri: usize) -> [Vec3<T>; 3] {
        let [a, b, c] = self.triangles[tri];
        [
            self.positions[a as usize],
            self.positions[b as usize],
            self.positions[c as usize],
        ]
    }

    /// Unnormalized face normal (twice the area vector).
    pub fn face_normal(&self, tri: usize) -> Vec3<T> {
        let [a, b, c] = self.corners(tri);
        (b - a).cross(c - a)
    }

    pub fn triangle_area(&self, tri: usize) -> T {
        self.face_normal(tri).norm() * T::lit(0.5)
    }

    pub fn aabb(&self) -> Aabb<T> {
        Aabb::from_points(&self.positions)
    }

    /// Bounding sphere centered on the box center.
    pub fn bounding_sphere(&self) -> (Vec3<T>, T) {
        let c = self.aabb().center();
        let r = self
            .positions
            .iter()
            .map(|p| (*p - c).norm())
            .fold(T::zero(), T::max);
        (c, r)
    }

    /// Applies `scale * p + offset` to every vertex; normals are unchanged.
    pub fn scale_translate(&mut self, scale: T, offset: Vec3<T>) {
        for p in &mut self.positions {
            *p = *p * scale + offset;
        }
    }

    /// Recenters on the bounding-sphere center and scales to unit radius.
    pub fn normalize_to_unit_sphere(&mut self) {
        let (c, r) = self.bounding_sphere();
        if r > T::zero() {
            self.scale_translate(T::one() / r, -c / r);
        }
    }

    pub fn transformed(&self, xf: &Similarity<T>) -> Self {
        Self {
            positions: self.positions.iter().map(|&p| xf.apply_point(p)).collect(),
            normals: self.normals.iter().map(|&n| xf.apply_normal(n)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Area-weighted vertex normals; vertices with no incident area keep their normal.
    pub fn recompute_normals(&mut self) {
        let mut acc = vec![Vec3::splat(T::zero()); self.positions.len()];
        for t in 0..self.triangles.len() {
            let n = self.face_normal(t);
            for &i in &self.triangles[t] {
                acc[i as usize] += n;
            }
        }
        for (normal, a) in self.normals.iter_mut().zip(acc) {
            if let Some(n) = a.try_normalized(T::zero()) {
                *normal = n;
            }
        }
    }

    /// Splits every triangle into four through shared edge midpoints.
    pub fn subdivide(&self) -> Self {
        let mut positions = self.positions.clone();
        let mut normals = self.normals.clone();
        let mut midpoints: HashMap<(u32, u32), u32> =
            HashMap::with_capacity(self.triangles.len() * 3 / 2);
        let mut midpoint =
            |a: u32, b: u32, positions: &mut Vec<Vec3<T>>, normals: &mut Vec<Vec3<T>>| {
                let key = if a < b { (a, b) } else { (b, a) };
                *midpoints.entry(key).or_insert_with(|| {
                    let (pa, pb) = (positions[a as usize], positions[b as usize]);
                    let (na, nb) = (normals[a as usize], normals[b as usize]);
                    positions.push((pa + pb) * T::lit(0.5));
                    normals.push((na + nb).try_normalized(T::lit(1e-12)).unwrap_or(na));
                    (positions.len() - 1) as u32
                })
            };
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut positions, &mut normals);
            let bc = midpoint(b, c, &mut positions, &mut normals);
            let ca = midpoint(c, a, &mut positions, &mut normals);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        Self {
            positions,
            normals,
            triangles,
        }
    }

    /// Drops triangles whose area is at or below `min_area` and unused vertices.
    pub fn remove_degenerate(&mut self, min_area: T) {
        let keep: Vec<[u32; 3]> = (0..self.triangles.len())
            .filter(|&t| {
                let [a, b, c] = self.triangles[t];
                a != b && b != c && c != a && self.triangle_area(t) > min_area
            })
            .map(|t| self.triangles[t])
            .collect();
        let mut remap = vec![u32::MAX; self.positions.len()];
        let mut positions = Vec::new();
        let mut normals = Vec::new();
        let triangles = keep
            .into_iter()
            .map(|tri| {
                tri.map(|i| {
                    if remap[i as usize] == u32::MAX {
                        remap[i as usize] = positions.len() as u32;
                        positions.push(self.positions[i as usize]);
                        normals.push(self.normals[i as usize]);
                    }
                    remap[i as usize]
                })
            })
            .collect();
        self.positions = positions;
        self.normals = normals;
        self.triangles = triangles;
    }

    /// Closes every boundary loop with a flat-shaded triangle fan around its centroid.
    pub fn cap_boundary_loops(&mut self) {
        let mut edge_count: HashMap<(u32, u32), u32> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = if a < b { (a, b) } else { (b, a) };
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        // boundary edges keep their triangle's orientation; the cap runs the other way
        let mut next: HashMap<u32, u32> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = if a < b { (a, b) } else { (b, a) };
                if edge_count[&key] == 1 {
                    next.insert(b, a);
                }
            }
        }
        let mut starts: Vec<u32> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut visited = std::collections::HashSet::new();
        for start in starts {
            if visited.contains(&start) {
                continue;
            }
            let mut ring = vec![start];
            visited.insert(start);
            let mut cur = start;
            let mut closed = false;
            while let Some(&n) = next.get(&cur) {
                if n == start {
                    closed = true;
                    break;
                }
                if !visited.insert(n) {
                    break;
                }
                ring.push(n);
                cur = n;
            }
            if closed && ring.len() >= 3 {
                self.add_cap(&ring);
            }
        }
    }

    fn add_cap(&mut self, ring: &[u32]) {
        let pts: Vec<Vec3<T>> = ring.iter().map(|&i| self.positions[i as usize]).collect();
        let n = T::from_usize_lossy(pts.len());
        let centroid = pts.iter().fold(Vec3::splat(T::zero()), |a, &p| a + p) / n;
        let mut area = Vec3::splat(T::zero());
        for k in 0..pts.len() {
            area += (pts[k] - centroid).cross(pts[(k + 1) % pts.len()] - centroid);
        }
        let Some(normal) = area.try_normalized(T::lit(1e-14)) else {
            return;
        };
        let base = self.positions.len() as u32;
        self.positions.extend(pts.iter().copied());
        self.positions.push(centroid);
        self.normals
            .extend(std::iter::repeat_n(normal, pts.len() + 1));
        let center = base + pts.len() as u32;
        for k in 0..pts.len() as u32 {
            let a = base + k;
            let b = base + (k + 1) % pts.len() as u32;
            self.triangles.push([a, b, center]);
        }
    }

    /// Latitude-longitude sphere with exact radial normals.
    pub fn uv_sphere(radius: T, res_u: usize, res_v: usize) -> Self {
        let mut positions = Vec::new();
        let mut normals = Vec::new();
        let res_v = res_v.max(3);
        let res_u = res_u.max(3);
        positions.push(vec3(T::zero(), T::zero(), radius));
        normals.push(vec3(T::zero(), T::zero(), T::one()));
        for j in 1..res_v - 1 {
            let theta = T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(res_v - 1);
            for i in 0..res_u {
                let phi = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(res_u);
                let n = vec3(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                );
                positions.push(n * radius);
                normals.push(n);
            }
        }
        positions.push(vec3(T::zero(), T::zero(), -radius));
        normals.push(vec3(T::zero(), T::zero(), -T::one()));
        let ring = |j: usize, i: usize| (1 + (j - 1) * res_u + i % res_u) as u32;
        let south = (positions.len() - 1) as u32;
        let mut triangles = Vec::new();
        for i in 0..res_u {
            triangles.push([0, ring(1, i), ring(1, i + 1)]);
        }
        for j in 1..res_v - 2 {
            for i in 0..res_u {
                let (a, b, c, d) = (
                    ring(j, i),
                    ring(j + 1, i),
                    ring(j + 1, i + 1),
                    ring(j, i + 1),
                );
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        for i in 0..res_u {
            triangles.push([ring(res_v - 2, i), south, ring(res_v - 2, i + 1)]);
        }
        Self {
            positions,
            normals,
            triangles,
        }
    }

    /// Axis-aligned quad in the plane `z = height`, facing `+z`.
    pub fn horizontal_quad(min: (T, T), max: (T, T), height: T) -> Self {
        let up = vec3(T::zero(), T::zero(), T::one());
        Self {
            positions: vec![
                vec3(min.0, min.1, height),
                vec3(max.0, min.1, height),
                vec3(max.0, max.1, height),
                vec3(min.0, max.1, height),
            ],
            normals: vec![up; 4],
            triangles: vec![[0, 1, 2], [0, 2, 3]],
        }
    }

    pub fn append(&mut self, other: &Self) {
        let base = self.positions.len() as u32;
        self.positions.extend_from_slice(&other.positions);
        self.normals.extend_from_slice(&other.normals);
        self.triangles
            .extend(other.triangles.iter().map(|t| t.map(|i| i + base)));
    }
}

/// Samples `surface` on a regular grid; `u` wraps (no duplicated seam column).
///
/// Vertex `(i, j)` is stored at `j * res_u + i`.
pub fn tessellate<T: Real>(
    surface: &NurbsSurface<T>,
    res_u: usize,
    res_v: usize,
) -> Result<TriangleMesh<T>> {
    if res_u < 3 || res_v < 2 {
        return Err(ShapeError::Invalid(format!(
            "tessellation {res_u}x{res_v} below 3x2"
        )));
    }
    if !surface.is_closed_u() {
        return Err(ShapeError::Invalid(
            "tessellation expects a surface closed in u".into(),
        ));
    }
    let (u0, u1) = surface.domain_u();
    let (v0, v1) = surface.domain_v();
    let mut positions = Vec::with_capacity(res_u * res_v);
    let mut normals: Vec<Option<Vec3<T>>> = Vec::with_capacity(res_u * res_v);
    for j in 0..res_v {
        let v = if j + 1 == res_v {
            v1
        } else {
            v0 + (v1 - v0) * T::from_usize_lossy(j) / T::from_usize_lossy(res_v - 1)
        };
        for i in 0..res_u {
            let u = u0 + (u1 - u0) * T::from_usize_lossy(i) / T::from_usize_lossy(res_u);
            let d = surface.derivatives(u, v)?;
            positions.push(d.point);
            normals.push(d.normal);
        }
    }
    let normals = fill_degenerate_normals(&normals, res_u, res_v);
    let idx = |i: usize, j: usize| (j * res_u + i % res_u) as u32;
    let mut triangles = Vec::with_capacity(2 * res_u * (res_v - 1));
    for j in 0..res_v - 1 {
        for i in 0..res_u {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Ok(TriangleMesh {
        positions,
        normals,
        triangles,
    })
}

/// Replaces missing normals with the nearest valid grid sample (v first, then u).
fn fill_degenerate_normals<T: Real>(
    normals: &[Option<Vec3<T>>],
    res_u: usize,
    res_v: usize,
) -> Vec<Vec3<T>> {
    let at = |i: usize, j: usize| normals[j * res_u + i];
    let mut out = Vec::with_capacity(normals.len());
    for j in 0..res_v {
        for i in 0..res_u {
            let found = at(i, j).or_else(|| {
                (1..res_v.max(res_u)).find_map(|d| {
                    let mut candidates = Vec::new();
                    if j + d < res_v {
                        candidates.push(at(i, j + d));
                    }
                    if j >= d {
                        candidates.push(at(i, j - d));
                    }
                    if d < res_u {
                        candidates.push(at((i + d) % res_u, j));
                        candidates.push(at((i + res_u - d) % res_u, j));
                    }
                    candidates.into_iter().flatten().next()
                })
            });
            out.push(found.unwrap_or(vec3(T::zero(), T::zero(), T::one())));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_is_closed_and_unit() {
        let s = TriangleMesh::<f64>::uv_sphere(1.0, 16, 9);
        s.validate().unwrap();
        for p in &s.positions {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        let mut m = s.clone();
        let before = m.triangle_count();
        m.cap_boundary_loops();
        assert_eq!(m.triangle_count(), before);
    }

    #[test]
    fn subdivide_shares_edges() {
        let s = TriangleMesh::<f64>::uv_sphere(1.0, 8, 5);
        let d = s.subdivide();
        assert_eq!(d.triangle_count(), 4 * s.triangle_count());
        // Euler characteristic of a sphere survives subdivision
        let edges = d.triangle_count() * 3 / 2;
        assert_eq!(
            d.vertex_count() as i64 - edges as i64 + d.triangle_count() as i64,
            2
        );
    }

    #[test]
    fn remove_degenerate_drops_slivers() {
        let mut m = TriangleMesh::<f64>::horizontal_quad((0.0, 0.0), (1.0, 1.0), 0.0);
        m.positions.push(vec3(2.0, 0.0, 0.0));
        m.normals.push(vec3(0.0, 0.0, 1.0));
        m.triangles.push([1, 4, 4]);
        m.remove_degenerate(1e-12);
        assert_eq!(m.triangle_count(), 2);
        assert_eq!(m.vertex_count(), 4);
    }

    #[test]
    fn cap_closes_open_tube() {
        // open cylinder made of two rings
        let n = 12;
        let mut positions = Vec::new();
        let mut normals = Vec::new();
        for j in 0..2 {
            for i in 0..n {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                positions.push(vec3(a.cos(), a.sin(), j as f64));
                normals.push(vec3(a.cos(), a.sin(), 0.0));
            }
        }
        let mut triangles = Vec::new();
        for i in 0..n as u32 {
            let j = (i + 1) % n as u32;
            triangles.push([i, j, j + n as u32]);
            triangles.push([i, j + n as u32, i + n as u32]);
        }
        let mut m = TriangleMesh::new(positions, normals, triangles).unwrap();
        m.cap_boundary_loops();
        assert_eq!(m.triangle_count(), 2 * n + 2 * n);
        // caps face outward: bottom -z, top +z
        let zs: Vec<f64> = m.normals[2 * n..].iter().map(|v| v.z).collect();
        assert!(zs.iter().any(|&z| z < -0.99) && zs.iter().any(|&z| z > 0.99));
        let bottom_cap = &m.normals[2 * n];
        assert!(bottom_cap.z < -0.99);
    }
}
