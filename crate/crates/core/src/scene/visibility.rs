use std::sync::Arc;

use super::{CameraModel, PlacedObject};
use crate::math::{Similarity, Vec3};
use crate::render::{Bvh, Ray};

struct Entry {
    bvh: Arc<Bvh>,
    transform: Similarity<f64>,
    center: Vec3<f64>,
    radius: f64,
}

/// Objects that can block visibility rays, each traced in its own object space.
#[derive(Default)]
pub struct Occluders {
    entries: Vec<Entry>,
}

impl Occluders {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds an object; `bvh` must be built over its object-space mesh.
    pub fn push(&mut self, object: &PlacedObject, bvh: Arc<Bvh>) {
        let (center, radius) = object.bounding_sphere();
        self.entries.push(Entry {
            bvh,
            transform: object.transform,
            center,
            radius,
        });
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn sphere(&self, index: usize) -> (Vec3<f64>, f64) {
        (self.entries[index].center, self.entries[index].radius)
    }

    /// Index and distance of the nearest object hit by `ray` within `(t_min, t_max)`.
    pub fn nearest(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let dir_len2 = ray.dir.norm_squared();
        for (i, e) in self.entries.iter().enumerate() {
            let t_far = best.map_or(t_max, |(_, t)| t);
            // bounding-sphere rejection in world space
            let oc = e.center - ray.origin;
            let along = oc.dot(ray.dir) / dir_len2;
            let closest2 = (oc - ray.dir * along).norm_squared();
            if closest2 > e.radius * e.radius * (1.0 + 1e-9) {
                continue;
            }
            let r = e.radius / dir_len2.sqrt();
            if along + r < t_min || along - r > t_far {
                continue;
            }
            let rt = e.transform.rotation.transpose();
            let local = Ray::new(
                rt.mul_vec(ray.origin - e.transform.translation) / e.transform.scale,
                rt.mul_vec(ray.dir) / e.transform.scale,
            );
            if let Some(hit) = e.bvh.intersect(&local, t_min, t_far) {
                best = Some((i, hit.t));
            }
        }
        best
    }
}

/// True when the bounding-sphere center of occluder `target` projects inside the
/// image and the ray from the camera toward it first hits `target` itself.
pub fn visible_in(camera: &CameraModel, target: usize, occluders: &Occluders) -> bool {
    let (center, _) = occluders.sphere(target);
    let Some((px, py, _)) = camera.project(center) else {
        return false;
    };
    if !camera.in_frame(px, py) {
        return false;
    }
    let origin = camera.center();
    let ray = Ray::new(origin, center - origin);
    // t = 1 reaches the center; the target's first surface lies before it or within its radius beyond
    matches!(occluders.nearest(&ray, 1e-9, f64::INFINITY), Some((i, _)) if i == target)
}

pub fn visible_count(cameras: &[CameraModel], target: usize, occluders: &Occluders) -> usize {
    cameras
        .iter()
        .filter(|c| visible_in(c, target, occluders))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{MaterialSpec, TextureSpec};
    use crate::math::{vec3, Mat3};
    use crate::scene::SizeClass;
    use crate::shapegen::TriangleMesh;

    fn object(
        mesh: TriangleMesh<f64>,
        translation: Vec3<f64>,
        scale: f64,
    ) -> (PlacedObject, Arc<Bvh>) {
        let bvh = Arc::new(Bvh::build(&mesh.positions, &mesh.triangles).unwrap());
        let material = MaterialSpec {
            texture: TextureSpec::uniform(vec3(0.5, 0.5, 0.5)),
            roughness: 0.5,
            metallic: 0.0,
        };
        let transform = Similarity {
            rotation: Mat3::identity(),
            translation,
            scale,
        };
        (
            PlacedObject {
                mesh: Arc::new(mesh),
                material,
                transform,
                size_class: SizeClass::Large,
            },
            bvh,
        )
    }

    fn camera() -> CameraModel {
        CameraModel::look_at(vec3(5.0, 0.0, 0.0), vec3(0.0, 0.0, 0.0), 0.8, 64, 48)
    }

    #[test]
    fn lone_object_at_origin_is_visible() {
        let mut occ = Occluders::new();
        let (o, b) = object(TriangleMesh::uv_sphere(1.0, 16, 9), Vec3::splat(0.0), 1.0);
        occ.push(&o, b);
        assert!(visible_in(&camera(), 0, &occ));
    }

    #[test]
    fn object_behind_camera_is_culled() {
        let mut occ = Occluders::new();
        let (o, b) = object(
            TriangleMesh::uv_sphere(1.0, 16, 9),
            vec3(8.0, 0.0, 0.0),
            0.5,
        );
        occ.push(&o, b);
        assert!(!visible_in(&camera(), 0, &occ));
    }

    #[test]
    fn wall_hides_object() {
        let mut occ = Occluders::new();
        let (target, b) = object(TriangleMesh::uv_sphere(1.0, 16, 9), Vec3::splat(0.0), 0.5);
        occ.push(&target, b);
        // vertical wall at x = 2.5 facing the camera
        let mut wall = TriangleMesh::horizontal_quad((-3.0, -3.0), (3.0, 3.0), 0.0);
        for p in &mut wall.positions {
            *p = vec3(2.5, p.x, p.y);
        }
        let (w, wb) = object(wall, Vec3::splat(0.0), 1.0);
        occ.push(&w, wb);
        assert!(!visible_in(&camera(), 0, &occ));
        occ.pop();
        assert!(visible_in(&camera(), 0, &occ));
    }
}
