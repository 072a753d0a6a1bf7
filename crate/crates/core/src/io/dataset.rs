use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{io_err, write_cameras, write_pfm, IoError};
use crate::config::GeneratorConfig;
use crate::materials::MaterialSpec;
use crate::math::{Aabb, Vec3};
use crate::render::{exposure_for, RenderTarget, Renderer};
use crate::scene::{build_scene, SceneSpec, SizeClass};
use crate::seed::mix;
use crate::shapegen::TriangleMesh;

pub const N_VIEWS: usize = 8;

/// Seed of scene `index` in a batch.
pub fn scene_seed(global_seed: u64, index: usize) -> u64 {
    mix(global_seed, index as u64)
}

pub fn scene_dir_name(index: usize) -> String {
    format!("scene_{index:05}")
}

/// Hex SHA-256 over little-endian positions then triangle indices.
pub fn mesh_digest(mesh: &TriangleMesh<f64>) -> String {
    let mut h = Sha256::new();
    for p in &mesh.positions {
        for v in [p.x, p.y, p.z] {
            h.update(v.to_le_bytes());
        }
    }
    for t in &mesh.triangles {
        for i in t {
            h.update(i.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectEntry {
    pub size_class: SizeClass,
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3<f64>,
    pub scale: f64,
    pub triangles: usize,
    pub mesh_sha256: String,
    pub material: MaterialSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    pub index: usize,
    pub seed: u64,
    pub config_hash: String,
    pub attempts: u32,
    pub exposure: f64,
    pub width: u32,
    pub height: u32,
    pub n_large: usize,
    pub n_small: usize,
    pub n_tiny: usize,
    pub n_lights: usize,
    pub triangles: usize,
    pub room_box: Option<Aabb<f64>>,
    pub ground_height: Option<f64>,
    pub images: Vec<String>,
    pub depths: Vec<String>,
    pub cameras: String,
    pub objects: Vec<ObjectEntry>,
}

impl SceneManifest {
    pub fn new(index: usize, scene: &SceneSpec, config: &GeneratorConfig, exposure: f64) -> Self {
        let objects = scene
            .all_objects()
            .map(|o| ObjectEntry {
                size_class: o.size_class,
                rotation: [0, 1, 2].map(|i| [0, 1, 2].map(|j| o.transform.rotation.get(i, j))),
                translation: o.transform.translation,
                scale: o.transform.scale,
                triangles: o.mesh.triangle_count(),
                mesh_sha256: mesh_digest(&o.mesh),
                material: o.material.clone(),
            })
            .collect();
        let count = |c: SizeClass| scene.all_objects().filter(|o| o.size_class == c).count();
        Self {
            index,
            seed: scene.seed,
            config_hash: config.hash(),
            attempts: scene.attempts,
            exposure,
            width: config.image.width,
            height: config.image.height,
            n_large: count(SizeClass::Large),
            n_small: count(SizeClass::Small),
            n_tiny: count(SizeClass::Tiny),
            n_lights: scene.lights.len(),
            triangles: scene.triangle_count(),
            room_box: scene.room_box.as_ref().map(|r| r.bounds),
            ground_height: scene.ground_scatter.as_ref().map(|g| g.height),
            images: (0..N_VIEWS).map(|k| format!("image_{k}.png")).collect(),
            depths: (0..N_VIEWS).map(|k| format!("depth_{k}.pfm")).collect(),
            cameras: "cameras.txt".into(),
            objects,
        }
    }
}

/// The eight views of a scene and the shared exposure that maps them to 8-bit.
pub struct RenderedScene {
    pub scene: SceneSpec,
    pub views: Vec<RenderTarget>,
    pub exposure: f64,
}

pub fn render_scene(scene: SceneSpec, config: &GeneratorConfig) -> Result<RenderedScene, IoError> {
    let renderer = Renderer::new(&scene)?;
    let views: Vec<RenderTarget> = (0..scene.cameras.len())
        .map(|k| renderer.render_view(&scene, k, &config.render))
        .collect();
    let exposure = exposure_for(&views, config.render.exposure_percentile);
    Ok(RenderedScene {
        scene,
        views,
        exposure,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub index: usize,
    pub seed: u64,
    pub dir: PathBuf,
    pub manifest: SceneManifest,
}

impl SceneRecord {
    /// Every file a complete record holds, relative to its directory.
    pub fn files(&self) -> Vec<String> {
        let m = &self.manifest;
        m.images
            .iter()
            .chain(&m.depths)
            .cloned()
            .chain([m.cameras.clone(), "manifest.json".into()])
            .collect()
    }
}

/// Writes images, depth maps, cameras and the manifest into `dir`.
pub fn write_scene(
    dir: &Path,
    index: usize,
    rendered: &RenderedScene,
    config: &GeneratorConfig,
) -> Result<SceneManifest, IoError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest = SceneManifest::new(index, &rendered.scene, config, rendered.exposure);
    for (k, view) in rendered.views.iter().enumerate() {
        let path = dir.join(&manifest.images[k]);
        image::save_buffer(
            &path,
            &view.to_srgb8(rendered.exposure),
            view.width,
            view.height,
            image::ColorType::Rgb8,
        )?;
        write_pfm(
            &dir.join(&manifest.depths[k]),
            view.width,
            view.height,
            &view.depth,
        )?;
    }
    write_cameras(&dir.join(&manifest.cameras), &rendered.scene.cameras)?;
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&manifest)?).map_err(io_err(&path))?;
    Ok(manifest)
}

/// Builds, renders and writes scene `index` of the batch under `out_dir`.
pub fn generate_scene(
    config: &GeneratorConfig,
    index: usize,
    out_dir: &Path,
) -> Result<SceneRecord, IoError> {
    let seed = scene_seed(config.seed, index);
    let scene = build_scene(seed, config)?;
    let rendered = render_scene(scene, config)?;
    let dir = out_dir.join(scene_dir_name(index));
    let manifest = write_scene(&dir, index, &rendered, config)?;
    Ok(SceneRecord {
        index,
        seed,
        dir,
        manifest,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedScene {
    pub index: usize,
    pub seed: u64,
    pub error: String,
}

/// Batch summary written to `dataset.json`; skipped scenes mark gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetIndex {
    pub global_seed: u64,
    pub n_scenes: usize,
    pub config_hash: String,
    pub scenes: Vec<String>,
    pub skipped: Vec<SkippedScene>,
}

/// Generates `config.n_scenes` scenes on a pool of `workers` threads. The
/// written tree does not depend on the worker count. Scenes that fail after
/// resampling are logged and listed in `dataset.json`.
pub fn generate_dataset(
    config: &GeneratorConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<(Vec<SceneRecord>, Vec<SkippedScene>), IoError> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let config_path = out_dir.join("config.toml");
    std::fs::write(&config_path, config.to_toml()?).map_err(io_err(&config_path))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| IoError::Pool(e.to_string()))?;
    let results: Vec<Result<SceneRecord, (usize, IoError)>> = pool.install(|| {
        (0..config.n_scenes)
            .into_par_iter()
            .map(|i| {
                let r = generate_scene(config, i, out_dir).map_err(|e| (i, e));
                match &r {
                    Ok(rec) => log::info!("scene {i} written to {}", rec.dir.display()),
                    Err((_, e)) => log::warn!("scene {i} skipped: {e}"),
                }
                r
            })
            .collect()
    });

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            // I/O failures are not scene-level failures; surface them
            Err((_, e @ IoError::Io { .. })) => return Err(e),
            Err((index, e)) => skipped.push(SkippedScene {
                index,
                seed: scene_seed(config.seed, index),
                error: e.to_string(),
            }),
        }
    }
    let index = DatasetIndex {
        global_seed: config.seed,
        n_scenes: config.n_scenes,
        config_hash: config.hash(),
        scenes: records.iter().map(|r| scene_dir_name(r.index)).collect(),
        skipped: skipped.clone(),
    };
    let path = out_dir.join("dataset.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&index)?).map_err(io_err(&path))?;
    Ok((records, skipped))
}
