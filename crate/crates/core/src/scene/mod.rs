//! Scene assembly: the eight-camera rig, large and small object placement with
//! a covisibility guarantee, optional room box and ground scatter, and area
//! lights above the content.
//!
//! Scene units are chosen so the main object's bounding radius is 1.

mod build;
mod camera;
mod lights;
mod placement;
mod room;
mod shapes;
mod visibility;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use build::{
    build_scene, large_visibility, make_shape, scene_attempt, ArrangementConfig, RoomBoxConfig,
    SmallPlacement, SmallSize,
};
pub use camera::{place_cameras, spherical_angles, CameraModel, RigParams};
pub use lights::{place_lights, AreaLight, LightConfig};
pub use placement::{
    arrange_large, place_small_clustered, place_small_uniform, random_rotation, AreaSampler,
    LargeConfig,
};
pub use room::{add_room_box, scatter_ground, GroundPlane, GroundScatter, RoomBox, ScatterConfig};
pub use shapes::{sample_recipe, DisplacementConfig, ShapeConfig};
pub use visibility::{visible_count, visible_in, Occluders};

use crate::materials::MaterialSpec;
use crate::math::{Aabb, Similarity, Vec3};
use crate::shapegen::{ShapeError, TriangleMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Large,
    Small,
    Tiny,
}

/// A mesh in object space placed into the world by a similarity transform.
#[derive(Clone, Debug, PartialEq)]
pub struct PlacedObject {
    pub mesh: Arc<TriangleMesh<f64>>,
    pub material: MaterialSpec,
    pub transform: Similarity<f64>,
    pub size_class: SizeClass,
}

impl PlacedObject {
    /// World-space bounding sphere.
    pub fn bounding_sphere(&self) -> (Vec3<f64>, f64) {
        let (c, r) = self.mesh.bounding_sphere();
        (self.transform.apply_point(c), r * self.transform.scale)
    }

    pub fn world_aabb(&self) -> Aabb<f64> {
        let mut b = Aabb::empty();
        for &p in &self.mesh.positions {
            b.grow(self.transform.apply_point(p));
        }
        b
    }

    pub fn world_mesh(&self) -> TriangleMesh<f64> {
        self.mesh.transformed(&self.transform)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    /// Large objects first (the main object at index 0), then small objects.
    pub objects: Vec<PlacedObject>,
    pub room_box: Option<RoomBox>,
    pub ground_scatter: Option<GroundScatter>,
    pub lights: Vec<AreaLight>,
    pub cameras: Vec<CameraModel>,
    /// Number of resampling attempts consumed before this scene was accepted.
    pub attempts: u32,
}

impl SceneSpec {
    pub fn large_objects(&self) -> impl Iterator<Item = &PlacedObject> {
        self.objects
            .iter()
            .filter(|o| o.size_class == SizeClass::Large)
    }

    pub fn small_objects(&self) -> impl Iterator<Item = &PlacedObject> {
        self.objects
            .iter()
            .filter(|o| o.size_class == SizeClass::Small)
    }

    /// Every object including the tiny ground scatter.
    pub fn all_objects(&self) -> impl Iterator<Item = &PlacedObject> {
        self.objects
            .iter()
            .chain(self.ground_scatter.iter().flat_map(|g| g.objects.iter()))
    }

    /// Bounds of all placed objects (excluding the room box and ground plane).
    pub fn content_aabb(&self) -> Aabb<f64> {
        self.all_objects()
            .fold(Aabb::empty(), |b, o| b.union(&o.world_aabb()))
    }

    pub fn triangle_count(&self) -> usize {
        let objects: usize = self.all_objects().map(|o| o.mesh.triangle_count()).sum();
        let room = if self.room_box.is_some() { 12 } else { 0 };
        let ground = self
            .ground_scatter
            .as_ref()
            .and_then(|g| g.plane.as_ref())
            .map_or(0, |_| 2);
        objects + room + ground
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SceneError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("could not place large object {index} with the required covisibility")]
    Placement { index: usize },
    #[error("scene {seed:#018x} failed after {attempts} attempts: {last}")]
    Exhausted {
        seed: u64,
        attempts: u32,
        last: Box<SceneError>,
    },
    #[error("invalid scene configuration: {0}")]
    Config(String),
}
