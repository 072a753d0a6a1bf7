use std::fmt::Write as _;
use std::path::Path;

use super::{io_err, IoError};
use crate::scene::CameraModel;

/// Matrices of one camera as stored in `cameras.txt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraMatrices {
    pub width: u32,
    pub height: u32,
    pub intrinsics: [[f64; 3]; 3],
    pub world_to_camera: [[f64; 4]; 4],
}

impl CameraMatrices {
    pub fn from_camera(c: &CameraModel) -> Self {
        Self {
            width: c.width,
            height: c.height,
            intrinsics: c.intrinsics(),
            world_to_camera: c.world_to_camera(),
        }
    }

    /// Pixel coordinates and camera z of a world point.
    pub fn project(&self, p: [f64; 3]) -> (f64, f64, f64) {
        let m = &self.world_to_camera;
        let c: Vec<f64> = (0..3)
            .map(|i| m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3])
            .collect();
        let k = &self.intrinsics;
        let u = (k[0][0] * c[0] + k[0][1] * c[1] + k[0][2] * c[2]) / c[2];
        let v = (k[1][1] * c[1] + k[1][2] * c[2]) / c[2];
        (u, v, c[2])
    }

    /// World point at pixel `(u, v)` with camera z `depth`.
    pub fn unproject(&self, u: f64, v: f64, depth: f64) -> [f64; 3] {
        let k = &self.intrinsics;
        let y = (v - k[1][2]) / k[1][1] * depth;
        let x = (u - k[0][2] - k[0][1] * y / depth) / k[0][0] * depth;
        let c = [x, y, depth];
        let m = &self.world_to_camera;
        // world = R^T (c - t)
        let d: Vec<f64> = (0..3).map(|i| c[i] - m[i][3]).collect();
        [0, 1, 2].map(|j| m[0][j] * d[0] + m[1][j] * d[1] + m[2][j] * d[2])
    }
}

/// Text form: a `cameras N` line, then per camera a `camera i W H` line,
/// `K` with three rows and `world_to_camera` with four rows, row-major with
/// 17 significant digits. Axes are x right, y down, z forward.
pub fn format_cameras(cameras: &[CameraModel]) -> String {
    let mut s = String::new();
    writeln!(s, "cameras {}", cameras.len()).unwrap();
    for (i, c) in cameras.iter().enumerate() {
        let m = CameraMatrices::from_camera(c);
        writeln!(s, "camera {i} {} {}", m.width, m.height).unwrap();
        writeln!(s, "K").unwrap();
        for row in m.intrinsics {
            writeln!(s, "{}", row.map(|v| format!("{v:.16e}")).join(" ")).unwrap();
        }
        writeln!(s, "world_to_camera").unwrap();
        for row in m.world_to_camera {
            writeln!(s, "{}", row.map(|v| format!("{v:.16e}")).join(" ")).unwrap();
        }
    }
    s
}

pub fn parse_cameras(text: &str) -> Result<Vec<CameraMatrices>, IoError> {
    let bad = |message: String| IoError::Format {
        what: "camera file",
        message,
    };
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| bad(format!("unexpected end of file, expected {what}")))
    };
    let head = next("header")?;
    let n: usize = head
        .strip_prefix("cameras ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(format!("bad header `{head}`")))?;
    let floats = |line: &str, count: usize| -> Result<Vec<f64>, IoError> {
        let v: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("{e} in `{line}`")))?;
        if v.len() != count {
            return Err(bad(format!("expected {count} values in `{line}`")));
        }
        Ok(v)
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let line = next("camera line")?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "camera" || parts[1] != i.to_string() {
            return Err(bad(format!("bad camera line `{line}`")));
        }
        let width = parts[2]
            .parse()
            .map_err(|_| bad(format!("bad width in `{line}`")))?;
        let height = parts[3]
            .parse()
            .map_err(|_| bad(format!("bad height in `{line}`")))?;
        if next("K")? != "K" {
            return Err(bad("expected `K`".into()));
        }
        let mut intrinsics = [[0.0; 3]; 3];
        for row in &mut intrinsics {
            row.copy_from_slice(&floats(next("K row")?, 3)?);
        }
        if next("world_to_camera")? != "world_to_camera" {
            return Err(bad("expected `world_to_camera`".into()));
        }
        let mut world_to_camera = [[0.0; 4]; 4];
        for row in &mut world_to_camera {
            row.copy_from_slice(&floats(next("matrix row")?, 4)?);
        }
        out.push(CameraMatrices {
            width,
            height,
            intrinsics,
            world_to_camera,
        });
    }
    Ok(out)
}

pub fn write_cameras(path: &Path, cameras: &[CameraModel]) -> Result<(), IoError> {
    std::fs::write(path, format_cameras(cameras)).map_err(io_err(path))
}

pub fn read_cameras(path: &Path) -> Result<Vec<CameraMatrices>, IoError> {
    parse_cameras(&std::fs::read_to_string(path).map_err(io_err(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::vec3;

    #[test]
    fn focal_from_fov() {
        let c = CameraModel::look_at(
            vec3(3.0, 0.0, 0.0),
            vec3(0.0, 0.0, 0.0),
            2.0 * 0.5f64.atan(),
            640,
            480,
        );
        let m = parse_cameras(&format_cameras(&[c])).unwrap()[0];
        assert!((m.intrinsics[1][1] - 480.0).abs() < 1e-9);
        assert_eq!(m.intrinsics[0][1], 0.0);
        assert_eq!(m.intrinsics[2], [0.0, 0.0, 1.0]);
        assert_eq!(m.world_to_camera[3], [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn bit_exact_round_trip() {
        let c = CameraModel::look_at(
            vec3(1.234567, -2.5, 0.7),
            vec3(0.1, 0.2, -0.3),
            0.91,
            640,
            480,
        );
        let m = parse_cameras(&format_cameras(&[c, c])).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], CameraMatrices::from_camera(&c));
    }

    #[test]
    fn truncated_file_is_an_error() {
        let c = CameraModel::look_at(vec3(3.0, 0.0, 0.0), vec3(0.0, 0.0, 0.0), 0.9, 640, 480);
        let text = format_cameras(&[c]);
        let cut = &text[..text.len() / 2];
        assert!(parse_cameras(cut).is_err());
    }
}
