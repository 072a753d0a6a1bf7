use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{visible_count, CameraModel, Occluders, PlacedObject, SceneError, SizeClass};
use crate::materials::MaterialSpec;
use crate::math::{vec3, Aabb, Mat3, Similarity, Vec3};
use crate::render::Bvh;
use crate::seed::uniform;
use crate::shapegen::TriangleMesh;

type V = Vec3<f64>;

/// Placement ranges for the non-main large objects, in main-object radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LargeConfig {
    pub scale: (f64, f64),
    /// Radial range of object centers around the scene center.
    pub annulus: (f64, f64),
    /// Centers are drawn with `|z|` up to this value.
    pub height_jitter: f64,
    /// Minimum gap between a camera and any object's bounding sphere.
    pub camera_clearance: f64,
    pub attempts_per_round: usize,
    /// Each extra round shrinks the annulus by `shrink_factor`.
    pub rounds: usize,
    pub shrink_factor: f64,
}

impl Default for LargeConfig {
    fn default() -> Self {
        Self {
            scale: (0.4, 1.0),
            annulus: (1.5, 2.5),
            height_jitter: 0.25,
            camera_clearance: 0.3,
            attempts_per_round: 48,
            rounds: 4,
            shrink_factor: 0.8,
        }
    }
}

impl LargeConfig {
    pub fn validate(&self) -> Result<(), String> {
        let (slo, shi) = self.scale;
        if !(slo > 0.0 && slo <= shi) {
            return Err(format!(
                "scale = [{slo}, {shi}] must be positive and ordered"
            ));
        }
        let (alo, ahi) = self.annulus;
        if !(alo >= 0.0 && alo <= ahi && ahi.is_finite()) {
            return Err(format!(
                "annulus = [{alo}, {ahi}] must be non-negative and ordered"
            ));
        }
        if !(self.height_jitter >= 0.0 && self.camera_clearance >= 0.0) {
            return Err("height_jitter and camera_clearance must be non-negative".into());
        }
        if self.attempts_per_round == 0 || self.rounds == 0 {
            return Err("placement needs at least one attempt and one round".into());
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor <= 1.0) {
            return Err("shrink_factor must lie in (0, 1]".into());
        }
        Ok(())
    }
}

/// Uniformly distributed rotation from a normalized Gaussian quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Mat3<f64> {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-6 {
            return Mat3::from_quaternion(q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        }
    }
}

/// Similarity that puts the local bounding-sphere center `local_center` at `center`.
fn centered(rotation: Mat3<f64>, scale: f64, local_center: V, center: V) -> Similarity<f64> {
    Similarity {
        rotation,
        translation: center - rotation.mul_vec(local_center * scale),
        scale,
    }
}

/// A large shape ready to be placed: its mesh, object-space hierarchy and material.
pub struct LargeShape {
    pub mesh: Arc<TriangleMesh<f64>>,
    pub bvh: Arc<Bvh>,
    pub material: MaterialSpec,
}

/// Places the first shape at the origin at unit scale and every other shape by
/// rejection sampling in an annulus, accepting a candidate only when it and all
/// previously placed non-main objects stay visible in at least half the cameras.
///
/// Returns the placed objects and the occluder set used for the checks.
pub fn arrange_large<R: Rng + ?Sized>(
    rng: &mut R,
    shapes: Vec<LargeShape>,
    cameras: &[CameraModel],
    config: &LargeConfig,
) -> Result<(Vec<PlacedObject>, Occluders), SceneError> {
    let required = cameras.len().div_ceil(2);
    let mut placed = Vec::with_capacity(shapes.len());
    let mut occluders = Occluders::new();
    for (index, shape) in shapes.into_iter().enumerate() {
        let (local_center, local_radius) = shape.mesh.bounding_sphere();
        let rotation = random_rotation(rng);
        if index == 0 {
            let obj = PlacedObject {
                transform: Similarity {
                    rotation,
                    translation: Vec3::splat(0.0),
                    scale: 1.0,
                },
                mesh: shape.mesh,
                material: shape.material,
                size_class: SizeClass::Large,
            };
            occluders.push(&obj, shape.bvh);
            placed.push(obj);
            continue;
        }
        let mut accepted = None;
        'rounds: for round in 0..config.rounds {
            let shrink = config.shrink_factor.powi(round as i32);
            let annulus = (config.annulus.0 * shrink, config.annulus.1 * shrink);
            for _ in 0..config.attempts_per_round {
                let scale = uniform(rng, config.scale);
                let rotation = random_rotation(rng);
                let r = uniform(rng, annulus);
                let phi = rng.random::<f64>() * std::f64::consts::TAU;
                let z = uniform(rng, (-config.height_jitter, config.height_jitter));
                let center = vec3(r * phi.cos(), r * phi.sin(), z);
                let radius = local_radius * scale;
                if cameras
                    .iter()
                    .any(|c| (c.center() - center).norm() <= radius + config.camera_clearance)
                {
                    continue;
                }
                let obj = PlacedObject {
                    transform: centered(rotation, scale, local_center, center),
                    mesh: shape.mesh.clone(),
                    material: shape.material.clone(),
                    size_class: SizeClass::Large,
                };
                occluders.push(&obj, shape.bvh.clone());
                let ok = (1..=index)
                    .rev()
                    .all(|j| visible_count(cameras, j, &occluders) >= required);
                if ok {
                    accepted = Some(obj);
                    break 'rounds;
                }
                occluders.pop();
            }
        }
        match accepted {
            Some(obj) => placed.push(obj),
            None => return Err(SceneError::Placement { index }),
        }
    }
    Ok((placed, occluders))
}

/// Uniform position inside `bbox`, random rotation, scale from `scale_range`.
pub fn place_small_uniform<R: Rng + ?Sized>(
    rng: &mut R,
    bbox: &Aabb<f64>,
    scale_range: (f64, f64),
) -> Similarity<f64> {
    let t = vec3(
        uniform(rng, (bbox.min.x, bbox.max.x)),
        uniform(rng, (bbox.min.y, bbox.max.y)),
        uniform(rng, (bbox.min.z, bbox.max.z)),
    );
    let rotation = random_rotation(rng);
    Similarity {
        rotation,
        translation: t,
        scale: uniform(rng, scale_range),
    }
}

/// Area-proportional triangle sampling over one mesh.
#[derive(Clone, Debug)]
pub struct AreaSampler {
    cdf: Vec<f64>,
}

impl AreaSampler {
    pub fn new(mesh: &TriangleMesh<f64>) -> Self {
        let mut acc = 0.0;
        let cdf = (0..mesh.triangle_count())
            .map(|t| {
                acc += mesh.triangle_area(t);
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn total_area(&self) -> f64 {
        self.cdf.last().copied().unwrap_or(0.0)
    }

    pub fn sample_triangle<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let x = rng.random::<f64>() * self.total_area();
        self.cdf
            .partition_point(|&c| c <= x)
            .min(self.cdf.len() - 1)
    }

    /// Triangle index and a uniformly distributed point on it.
    pub fn sample_point<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        mesh: &TriangleMesh<f64>,
    ) -> (usize, V) {
        let t = self.sample_triangle(rng);
        let [a, b, c] = mesh.corners(t);
        let (mut u, mut v) = (rng.random::<f64>(), rng.random::<f64>());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        (t, a + (b - a) * u + (c - a) * v)
    }
}

/// Rests a small object on a random surface point of a random large object.
///
/// The object's local z axis follows the outward face normal, it spins randomly
/// about that axis, and its bounding sphere touches the anchor point.
/// Returns the transform and the world-space anchor.
pub fn place_small_clustered<R: Rng + ?Sized>(
    rng: &mut R,
    large: &[PlacedObject],
    samplers: &[AreaSampler],
    local_sphere: (V, f64),
    scale_range: (f64, f64),
) -> (Similarity<f64>, V) {
    let pick = rng.random_range(0..large.len());
    let host = &large[pick];
    let (tri, local_anchor) = samplers[pick].sample_point(rng, &host.mesh);
    let anchor = host.transform.apply_point(local_anchor);
    let normal = host
        .transform
        .apply_normal(host.mesh.face_normal(tri))
        .try_normalized(1e-300)
        .unwrap_or(vec3(0.0, 0.0, 1.0));
    let spin = rng.random::<f64>() * std::f64::consts::TAU;
    let rotation = Mat3::rotation_between(vec3(0.0, 0.0, 1.0), normal)
        .mul_mat(&Mat3::rotation(vec3(0.0, 0.0, 1.0), spin));
    let scale = uniform(rng, scale_range);
    let (c, r) = local_sphere;
    (
        centered(rotation, scale, c, anchor + normal * (r * scale)),
        anchor,
    )
}
