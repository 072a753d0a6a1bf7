//! On-disk dataset output: PNG views, PFM depth, a camera text file and JSON
//! manifests per scene, plus batch orchestration and preview sheets.
//!
//! Scene directory layout:
//!
//! ```text
//! scene_00000/
//!   image_0.png .. image_7.png   8-bit sRGB
//!   depth_0.pfm .. depth_7.pfm   camera-z depth, 0 where nothing was hit
//!   cameras.txt                  intrinsics and world-to-camera matrices
//!   manifest.json                scene summary, seeds, config hash, exposure
//! ```

mod cameras;
mod dataset;
mod obj;
mod pfm;
mod preview;

pub use cameras::{format_cameras, parse_cameras, read_cameras, write_cameras, CameraMatrices};
pub use dataset::{
    generate_dataset, generate_scene, mesh_digest, render_scene, scene_dir_name, scene_seed,
    write_scene, DatasetIndex, ObjectEntry, RenderedScene, SceneManifest, SceneRecord,
    SkippedScene, N_VIEWS,
};
pub use obj::{format_obj, write_obj};
pub use pfm::{decode_pfm, encode_pfm, read_pfm, write_pfm, DepthMap};
pub use preview::{preview_grid, preview_sheet};

use crate::config::ConfigError;
use crate::render::BvhError;
use crate::scene::SceneError;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },
    #[error("refusing to write a non-finite or negative depth at index {0}")]
    InvalidDepth(usize),
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Render(#[from] BvhError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("worker pool: {0}")]
    Pool(String),
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.display().to_string(),
        source,
    }
}
