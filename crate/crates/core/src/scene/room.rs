use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CameraModel, PlacedObject, SizeClass};
use crate::materials::{sample_material, MaterialConfig, MaterialSpec};
use crate::math::{vec3, Aabb, Similarity, Vec3};
use crate::seed::uniform;
use crate::shapegen::TriangleMesh;

use super::placement::random_rotation;

type V = Vec3<f64>;

/// Axis-aligned room with inward-facing textured walls and no displacement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoomBox {
    pub bounds: Aabb<f64>,
    /// Floor, ceiling, then the walls at min x, max x, min y, max y.
    pub materials: [MaterialSpec; 6],
}

impl RoomBox {
    /// One two-triangle quad per face, wound so normals point into the room.
    pub fn wall_meshes(&self) -> Vec<(TriangleMesh<f64>, &MaterialSpec)> {
        let (lo, hi) = (self.bounds.min, self.bounds.max);
        let corner = |x: bool, y: bool, z: bool| {
            vec3(
                if x { hi.x } else { lo.x },
                if y { hi.y } else { lo.y },
                if z { hi.z } else { lo.z },
            )
        };
        // each quad listed counter-clockwise as seen from inside
        let quads: [([V; 4], V); 6] = [
            (
                [
                    corner(false, false, false),
                    corner(true, false, false),
                    corner(true, true, false),
                    corner(false, true, false),
                ],
                vec3(0.0, 0.0, 1.0),
            ),
            (
                [
                    corner(false, false, true),
                    corner(false, true, true),
                    corner(true, true, true),
                    corner(true, false, true),
                ],
                vec3(0.0, 0.0, -1.0),
            ),
            (
                [
                    corner(false, false, false),
                    corner(false, true, false),
                    corner(false, true, true),
                    corner(false, false, true),
                ],
                vec3(1.0, 0.0, 0.0),
            ),
            (
                [
                    corner(true, false, false),
                    corner(true, false, true),
                    corner(true, true, true),
                    corner(true, true, false),
                ],
                vec3(-1.0, 0.0, 0.0),
            ),
            (
                [
                    corner(false, false, false),
                    corner(false, false, true),
                    corner(true, false, true),
                    corner(true, false, false),
                ],
                vec3(0.0, 1.0, 0.0),
            ),
            (
                [
                    corner(false, true, false),
                    corner(true, true, false),
                    corner(true, true, true),
                    corner(false, true, true),
                ],
                vec3(0.0, -1.0, 0.0),
            ),
        ];
        quads
            .into_iter()
            .zip(&self.materials)
            .map(|((p, n), m)| {
                (
                    TriangleMesh {
                        positions: p.to_vec(),
                        normals: vec![n; 4],
                        triangles: vec![[0, 1, 2], [0, 2, 3]],
                    },
                    m,
                )
            })
            .collect()
    }
}

/// Keeps the lowest object strictly above the floor.
const FLOOR_GAP: f64 = 1e-4;

/// With probability `probability`, a box around `content` whose horizontal
/// extent is scaled by a factor from `scale_range` and whose floor sits at the
/// content floor. The box is grown where needed so every camera lies inside
/// it with `margin` to spare, lowering the floor below the lowest camera.
pub fn add_room_box<R: Rng + ?Sized>(
    rng: &mut R,
    content: &Aabb<f64>,
    cameras: &[CameraModel],
    probability: f64,
    scale_range: (f64, f64),
    margin: f64,
    materials: &MaterialConfig,
) -> Option<RoomBox> {
    if rng.random::<f64>() >= probability {
        return None;
    }
    let factor_xy = uniform(rng, scale_range);
    let factor_z = uniform(rng, scale_range);
    let c = content.center();
    let half = content.extent() * 0.5;
    let mut lo = vec3(
        c.x - half.x * factor_xy,
        c.y - half.y * factor_xy,
        content.min.z - FLOOR_GAP,
    );
    let mut hi = vec3(c.x + half.x * factor_xy, c.y + half.y * factor_xy, 0.0);
    for cam in cameras {
        let p = cam.center();
        lo = lo.min_elem(p - Vec3::splat(margin));
        hi = hi.max_elem(p + Vec3::splat(margin));
    }
    let height = content.max.z - lo.z;
    hi.z =
        hi.z.max(lo.z + height * factor_z)
            .max(content.max.z + margin);
    let materials = std::array::from_fn(|_| sample_material(rng, materials));
    Some(RoomBox {
        bounds: Aabb { min: lo, max: hi },
        materials,
    })
}

/// Parameters of the tiny-object ground scatter, in main-object radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterConfig {
    pub probability: f64,
    pub count: (usize, usize),
    pub scale: (f64, f64),
    /// Disc radius as a multiple of the content's horizontal radius.
    pub radius_factor: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            probability: 0.5,
            count: (100, 200),
            scale: (0.02, 0.05),
            radius_factor: 1.5,
        }
    }
}

impl ScatterConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.probability) {
            return Err("probability must lie in [0, 1]".into());
        }
        if self.count.0 > self.count.1 {
            return Err(format!(
                "count = [{}, {}] is inverted",
                self.count.0, self.count.1
            ));
        }
        let (lo, hi) = self.scale;
        if !(lo > 0.0 && lo <= hi) {
            return Err(format!("scale = [{lo}, {hi}] must be positive and ordered"));
        }
        if !(self.radius_factor > 0.0) {
            return Err("radius_factor must be positive".into());
        }
        Ok(())
    }
}

/// Textured ground quad used when there is no room floor to rest on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundPlane {
    pub half_size: f64,
    pub material: MaterialSpec,
}

impl GroundPlane {
    pub fn mesh(&self, center: V, height: f64) -> TriangleMesh<f64> {
        let h = self.half_size;
        TriangleMesh::horizontal_quad(
            (center.x - h, center.y - h),
            (center.x + h, center.y + h),
            height,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundScatter {
    pub height: f64,
    pub center: V,
    pub radius: f64,
    pub plane: Option<GroundPlane>,
    pub objects: Vec<PlacedObject>,
}

/// With probability `config.probability`, rests tiny objects on the plane
/// `z = height` at uniform positions in a disc around `center`.
///
/// `shapes` yields an object-space mesh and material for each tiny object;
/// `inside` limits positions (e.g. to the room box). A ground quad is added
/// when `with_plane` is set.
#[allow(clippy::too_many_arguments)]
pub fn scatter_ground<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ScatterConfig,
    height: f64,
    center: V,
    radius: f64,
    inside: Option<&Aabb<f64>>,
    with_plane: Option<MaterialSpec>,
    mut shapes: impl FnMut(usize) -> Option<(std::sync::Arc<TriangleMesh<f64>>, MaterialSpec)>,
) -> Option<GroundScatter> {
    if rng.random::<f64>() >= config.probability {
        return None;
    }
    let count = crate::seed::uniform_usize(rng, config.count);
    let mut objects = Vec::with_capacity(count);
    for k in 0..count {
        let Some((mesh, material)) = shapes(k) else {
            continue;
        };
        let scale = uniform(rng, config.scale);
        let (local_c, local_r) = mesh.bounding_sphere();
        let mut pos = None;
        for _ in 0..32 {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            let p = vec3(
                center.x + r * phi.cos(),
                center.y + r * phi.sin(),
                height + local_r * scale,
            );
            if inside.is_none_or(|b| {
                p.x - local_r * scale > b.min.x
                    && p.x + local_r * scale < b.max.x
                    && p.y - local_r * scale > b.min.y
                    && p.y + local_r * scale < b.max.y
            }) {
                pos = Some(p);
                break;
            }
        }
        let Some(world_center) = pos else {
            continue;
        };
        let rotation = random_rotation(rng);
        let transform = Similarity {
            rotation,
            translation: world_center - rotation.mul_vec(local_c * scale),
            scale,
        };
        objects.push(PlacedObject {
            mesh,
            material,
            transform,
            size_class: SizeClass::Tiny,
        });
    }
    let plane = with_plane.map(|material| GroundPlane {
        half_size: radius * 1.5,
        material,
    });
    Some(GroundScatter {
        height,
        center,
        radius,
        plane,
        objects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::TextureSpec;
    use crate::seed::rng_from;

    #[test]
    fn walls_face_inward() {
        let m = MaterialSpec {
            texture: TextureSpec::uniform(vec3(0.5, 0.5, 0.5)),
            roughness: 0.5,
            metallic: 0.0,
        };
        let room = RoomBox {
            bounds: Aabb {
                min: vec3(-1.0, -2.0, -0.5),
                max: vec3(3.0, 1.0, 2.0),
            },
            materials: std::array::from_fn(|_| m.clone()),
        };
        let center = room.bounds.center();
        for (mesh, _) in room.wall_meshes() {
            for t in 0..2 {
                let n = mesh.face_normal(t).normalized();
                assert!((n - mesh.normals[0]).norm() < 1e-12);
                let [a, _, _] = mesh.corners(t);
                assert!((center - a).dot(n) > 0.0);
            }
        }
    }

    #[test]
    fn room_contains_content_and_cameras() {
        let content = Aabb {
            min: vec3(-3.0, -3.0, -1.0),
            max: vec3(3.0, 2.0, 1.2),
        };
        let cams = [CameraModel::look_at(
            vec3(0.0, 4.5, -2.0),
            vec3(0.0, 0.0, 0.0),
            0.8,
            64,
            48,
        )];
        let mut rng = rng_from(1);
        let room = add_room_box(
            &mut rng,
            &content,
            &cams,
            1.0,
            (1.5, 3.0),
            0.5,
            &MaterialConfig::default(),
        )
        .unwrap();
        assert!(room.bounds.contains_box_strictly(&content));
        assert!(room.bounds.contains_strictly(cams[0].center()));
    }
}
