use std::path::Path;

use image::{GenericImage, RgbImage};

use super::IoError;
use crate::io::dataset::N_VIEWS;

fn load_row(scene_dir: &Path) -> Result<Vec<RgbImage>, IoError> {
    (0..N_VIEWS)
        .map(|k| Ok(image::open(scene_dir.join(format!("image_{k}.png")))?.to_rgb8()))
        .collect()
}

fn tile(rows: &[Vec<RgbImage>]) -> Result<RgbImage, IoError> {
    let (w, h) = rows
        .first()
        .and_then(|r| r.first())
        .map(|v| v.dimensions())
        .ok_or(IoError::Format {
            what: "preview",
            message: "no views to tile".into(),
        })?;
    let mut sheet = RgbImage::new(w * N_VIEWS as u32, h * rows.len() as u32);
    for (r, row) in rows.iter().enumerate() {
        for (k, view) in row.iter().enumerate() {
            if view.dimensions() != (w, h) {
                return Err(IoError::Format {
                    what: "preview",
                    message: "views differ in size".into(),
                });
            }
            sheet
                .copy_from(view, k as u32 * w, r as u32 * h)
                .expect("tile lies inside the sheet");
        }
    }
    Ok(sheet)
}

/// One row holding the eight views of a scene, left to right.
pub fn preview_sheet(scene_dir: &Path, out: &Path) -> Result<(), IoError> {
    tile(&[load_row(scene_dir)?])?.save(out)?;
    Ok(())
}

/// One row per scene directory.
pub fn preview_grid(scene_dirs: &[&Path], out: &Path) -> Result<(), IoError> {
    let rows = scene_dirs
        .iter()
        .map(|d| load_row(d))
        .collect::<Result<Vec<_>, _>>()?;
    tile(&rows)?.save(out)?;
    Ok(())
}
