use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::placement::LargeShape;
use super::{
    add_room_box, arrange_large, place_cameras, place_lights, place_small_clustered,
    place_small_uniform, sample_recipe, scatter_ground, visible_count, AreaSampler, LargeConfig,
    Occluders, PlacedObject, SceneError, SceneSpec, SizeClass,
};
use crate::config::GeneratorConfig;
use crate::materials::sample_material;
use crate::math::{vec3, Aabb};
use crate::render::Bvh;
use crate::seed::{derive, stream_rng, Stream};
use crate::shapegen::{build_shape, TriangleMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallPlacement {
    None,
    Uniform,
    Clustered,
    /// A fair coin per object chooses uniform or clustered placement.
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallSize {
    Smaller,
    Larger,
}

impl SmallSize {
    /// Scale range relative to the main object's radius.
    pub fn scale_range(self) -> (f64, f64) {
        match self {
            SmallSize::Smaller => (0.05, 0.15),
            SmallSize::Larger => (0.1, 0.3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrangementConfig {
    pub n_large: usize,
    /// Small-object count at eight large objects; scaled proportionally otherwise.
    pub n_small: usize,
    pub small_placement: SmallPlacement,
    pub small_size: SmallSize,
    pub large: LargeConfig,
    /// Whole-scene attempts before the scene is reported as failed.
    pub max_attempts: u32,
}

impl Default for ArrangementConfig {
    fn default() -> Self {
        Self {
            n_large: 8,
            n_small: 320,
            small_placement: SmallPlacement::Mixed,
            small_size: SmallSize::Larger,
            large: LargeConfig::default(),
            max_attempts: 4,
        }
    }
}

impl ArrangementConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_large == 0 {
            return Err("n_large must be at least 1".into());
        }
        if self.max_attempts == 0 {
            return Err("max_attempts must be at least 1".into());
        }
        self.large.validate().map_err(|e| format!("large.{e}"))
    }

    /// Small objects actually placed for the configured large-object count.
    pub fn effective_small_count(&self) -> usize {
        if self.small_placement == SmallPlacement::None {
            0
        } else {
            (self.n_small * self.n_large).div_ceil(8)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoomBoxConfig {
    pub probability: f64,
    pub scale: (f64, f64),
    /// Clearance kept between each camera and the walls.
    pub camera_margin: f64,
}

impl Default for RoomBoxConfig {
    fn default() -> Self {
        Self {
            probability: 0.5,
            scale: (1.5, 3.0),
            camera_margin: 0.5,
        }
    }
}

impl RoomBoxConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.probability) {
            return Err("probability must lie in [0, 1]".into());
        }
        let (lo, hi) = self.scale;
        if !(lo >= 1.0 && lo <= hi && hi.is_finite()) {
            return Err(format!(
                "scale = [{lo}, {hi}] must be ordered and at least 1"
            ));
        }
        if !(self.camera_margin > 0.0) {
            return Err("camera_margin must be positive".into());
        }
        Ok(())
    }
}

const SHAPE_RETRIES: u64 = 8;

/// Builds shape `index` of a stream, retrying with fresh sub-seeds if generation fails.
pub fn make_shape(
    seed: u64,
    stream: Stream,
    index: u64,
    class: SizeClass,
    config: &GeneratorConfig,
) -> Result<TriangleMesh<f64>, SceneError> {
    let mut last = None;
    for retry in 0..SHAPE_RETRIES {
        let mut rng = stream_rng(seed, stream, index.wrapping_add(retry << 40));
        let recipe = sample_recipe(&mut rng, &config.shapes, &config.displacement, class);
        match build_shape(&mut rng, &recipe) {
            Ok(mesh) if mesh.triangle_count() > 0 => return Ok(mesh),
            Ok(_) => {}
            Err(e) => last = Some(e),
        }
    }
    Err(last.map(SceneError::from).unwrap_or(SceneError::Config(
        "shape generation produced empty meshes".into(),
    )))
}

fn material(seed: u64, index: u64, config: &GeneratorConfig) -> crate::materials::MaterialSpec {
    sample_material(
        &mut stream_rng(seed, Stream::Materials, index),
        &config.materials,
    )
}

// material stream offsets per object class
const SMALL_MATERIALS: u64 = 1 << 20;
const TINY_MATERIALS: u64 = 2 << 20;
const ENVIRONMENT_MATERIALS: u64 = 3 << 20;

/// One attempt at a scene from `seed`, with no resampling.
pub fn scene_attempt(seed: u64, config: &GeneratorConfig) -> Result<SceneSpec, SceneError> {
    let (width, height) = (config.image.width, config.image.height);
    let cameras = place_cameras(
        &mut stream_rng(seed, Stream::Cameras, 0),
        &config.rig,
        1.0,
        width,
        height,
    );

    let arrangement = &config.arrangement;
    let large_shapes = (0..arrangement.n_large as u64)
        .into_par_iter()
        .map(|k| {
            let mesh = make_shape(seed, Stream::LargeShapes, k, SizeClass::Large, config)?;
            let bvh = Bvh::build(&mesh.positions, &mesh.triangles)
                .map_err(|e| SceneError::Config(e.to_string()))?;
            Ok(LargeShape {
                mesh: Arc::new(mesh),
                bvh: Arc::new(bvh),
                material: material(seed, k, config),
            })
        })
        .collect::<Result<Vec<_>, SceneError>>()?;
    let (mut objects, _) = arrange_large(
        &mut stream_rng(seed, Stream::LargePlacement, 0),
        large_shapes,
        &cameras,
        &arrangement.large,
    )?;

    let n_small = arrangement.effective_small_count();
    if n_small > 0 {
        let small_meshes = (0..n_small as u64)
            .into_par_iter()
            .map(|k| {
                make_shape(seed, Stream::SmallShapes, k, SizeClass::Small, config).map(Arc::new)
            })
            .collect::<Result<Vec<_>, SceneError>>()?;
        let large_box = objects
            .iter()
            .fold(Aabb::empty(), |b, o| b.union(&o.world_aabb()));
        let samplers: Vec<AreaSampler> =
            objects.iter().map(|o| AreaSampler::new(&o.mesh)).collect();
        let scale_range = arrangement.small_size.scale_range();
        let mut rng = stream_rng(seed, Stream::SmallPlacement, 0);
        let n_large = objects.len();
        for (k, mesh) in small_meshes.into_iter().enumerate() {
            let clustered = match arrangement.small_placement {
                SmallPlacement::Uniform => false,
                SmallPlacement::Clustered => true,
                _ => rng.random::<bool>(),
            };
            let transform = if clustered {
                place_small_clustered(
                    &mut rng,
                    &objects[..n_large],
                    &samplers,
                    mesh.bounding_sphere(),
                    scale_range,
                )
                .0
            } else {
                place_small_uniform(&mut rng, &large_box, scale_range)
            };
            objects.push(PlacedObject {
                mesh,
                material: material(seed, SMALL_MATERIALS + k as u64, config),
                transform,
                size_class: SizeClass::Small,
            });
        }
    }

    let content = objects
        .iter()
        .fold(Aabb::empty(), |b, o| b.union(&o.world_aabb()));
    let room = &config.room_box;
    let env_materials = {
        let mut m = config.materials.clone();
        if m.texture_mode == crate::materials::TextureMode::NoiseBoolean
            || m.texture_mode == crate::materials::TextureMode::Noise
        {
            // environment surfaces are large; keep their patterns readable
            m.field_scale = (m.field_scale.0 * 0.25, m.field_scale.1 * 0.25);
        }
        m
    };
    let room_box = add_room_box(
        &mut stream_rng(seed, Stream::RoomBox, 0),
        &content,
        &cameras,
        room.probability,
        room.scale,
        room.camera_margin,
        &env_materials,
    );

    let mut scatter_rng = stream_rng(seed, Stream::GroundScatter, 0);
    let lowest_camera = cameras
        .iter()
        .map(|c| c.center().z)
        .fold(f64::INFINITY, f64::min);
    let ground_height = match &room_box {
        Some(r) => r.bounds.min.z,
        None => (content.min.z - 1e-4).min(lowest_camera - room.camera_margin),
    };
    let c = content.center();
    let half = content.extent() * 0.5;
    let radius = half.x.hypot(half.y) * config.ground_scatter.radius_factor;
    let plane_material = room_box.is_none().then(|| {
        sample_material(
            &mut stream_rng(seed, Stream::Materials, ENVIRONMENT_MATERIALS),
            &env_materials,
        )
    });
    let ground_scatter = scatter_ground(
        &mut scatter_rng,
        &config.ground_scatter,
        ground_height,
        vec3(c.x, c.y, 0.0),
        radius,
        room_box.as_ref().map(|r| &r.bounds),
        plane_material,
        |k| {
            let mesh = make_shape(
                seed,
                Stream::GroundScatter,
                1 + k as u64,
                SizeClass::Tiny,
                config,
            )
            .ok()?;
            Some((
                Arc::new(mesh),
                material(seed, TINY_MATERIALS + k as u64, config),
            ))
        },
    );

    let mut all = content;
    if let Some(g) = &ground_scatter {
        for o in &g.objects {
            all = all.union(&o.world_aabb());
        }
    }
    let lights = place_lights(
        &mut stream_rng(seed, Stream::Lights, 0),
        &config.lights,
        &all,
        room_box.as_ref(),
    );

    Ok(SceneSpec {
        seed,
        objects,
        room_box,
        ground_scatter,
        lights,
        cameras,
        attempts: 1,
    })
}

/// Builds the scene for `seed`, resampling with derived child seeds when placement fails.
pub fn build_scene(seed: u64, config: &GeneratorConfig) -> Result<SceneSpec, SceneError> {
    let attempts = config.arrangement.max_attempts;
    let mut last = None;
    for attempt in 0..attempts {
        let s = if attempt == 0 {
            seed
        } else {
            derive(seed, Stream::Resample, attempt as u64)
        };
        match scene_attempt(s, config) {
            Ok(mut scene) => {
                scene.seed = seed;
                scene.attempts = attempt + 1;
                return Ok(scene);
            }
            Err(e) => {
                log::debug!("scene {seed:#x} attempt {attempt} failed: {e}");
                last = Some(e);
            }
        }
    }
    Err(SceneError::Exhausted {
        seed,
        attempts,
        last: Box::new(last.expect("at least one attempt")),
    })
}

/// Cameras (out of eight) in which each large object is visible, with the large objects as occluders.
pub fn large_visibility(scene: &SceneSpec) -> Vec<usize> {
    let mut occluders = Occluders::new();
    for o in scene.large_objects() {
        let bvh =
            Bvh::build(&o.mesh.positions, &o.mesh.triangles).expect("placed meshes are non-empty");
        occluders.push(o, Arc::new(bvh));
    }
    (0..occluders.len())
        .map(|i| visible_count(&scene.cameras, i, &occluders))
        .collect()
}
