use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::math::{vec3, Mat3, Vec3};
use crate::render::Ray;
use crate::seed::uniform;

type V = Vec3<f64>;

/// Pinhole camera. Camera axes are x right, y down, z forward and
/// `camera = rotation * world + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub fov_y: f64,
    pub width: u32,
    pub height: u32,
    pub rotation: Mat3<f64>,
    pub translation: V,
}

impl CameraModel {
    /// Camera at `eye` looking at `target` with world `+z` as up.
    pub fn look_at(eye: V, target: V, fov_y: f64, width: u32, height: u32) -> Self {
        let forward = (target - eye).normalized();
        let up = vec3(0.0, 0.0, 1.0);
        let right = forward
            .cross(up)
            .try_normalized(1e-9)
            .unwrap_or_else(|| forward.cross(vec3(1.0, 0.0, 0.0)).normalized());
        let down = forward.cross(right);
        let rotation = Mat3::from_rows(right, down, forward);
        Self {
            fov_y,
            width,
            height,
            rotation,
            translation: -rotation.mul_vec(eye),
        }
    }

    /// Rotates the camera about its own center by `delta` (applied in camera coordinates).
    pub fn perturbed(&self, delta: &Mat3<f64>) -> Self {
        let center = self.center();
        let rotation = delta.mul_mat(&self.rotation);
        Self {
            rotation,
            translation: -rotation.mul_vec(center),
            ..*self
        }
    }

    pub fn focal(&self) -> f64 {
        self.height as f64 / (2.0 * (self.fov_y * 0.5).tan())
    }

    pub fn principal_point(&self) -> (f64, f64) {
        (self.width as f64 * 0.5, self.height as f64 * 0.5)
    }

    pub fn aspect(&self) -> f64 {
        self.width as f64 / self.height as f64
    }

    pub fn intrinsics(&self) -> [[f64; 3]; 3] {
        let f = self.focal();
        let (cx, cy) = self.principal_point();
        [[f, 0.0, cx], [0.0, f, cy], [0.0, 0.0, 1.0]]
    }

    pub fn world_to_camera(&self) -> [[f64; 4]; 4] {
        let r = &self.rotation;
        let t = self.translation;
        [
            [r.get(0, 0), r.get(0, 1), r.get(0, 2), t.x],
            [r.get(1, 0), r.get(1, 1), r.get(1, 2), t.y],
            [r.get(2, 0), r.get(2, 1), r.get(2, 2), t.z],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    pub fn center(&self) -> V {
        -self.rotation.transpose().mul_vec(self.translation)
    }

    pub fn forward(&self) -> V {
        self.rotation.transpose().col(2)
    }

    pub fn to_camera(&self, p: V) -> V {
        self.rotation.mul_vec(p) + self.translation
    }

    /// Continuous pixel coordinates and camera depth, or `None` behind the camera.
    pub fn project(&self, p: V) -> Option<(f64, f64, f64)> {
        let c = self.to_camera(p);
        if c.z <= 0.0 {
            return None;
        }
        let f = self.focal();
        let (cx, cy) = self.principal_point();
        Some((f * c.x / c.z + cx, f * c.y / c.z + cy, c.z))
    }

    /// World point at camera depth `depth` behind continuous pixel `(px, py)`.
    pub fn unproject(&self, px: f64, py: f64, depth: f64) -> V {
        self.center() + self.ray_direction(px, py) * depth
    }

    /// World direction through continuous pixel `(px, py)`, scaled so its camera z is 1.
    pub fn ray_direction(&self, px: f64, py: f64) -> V {
        let f = self.focal();
        let (cx, cy) = self.principal_point();
        self.rotation
            .transpose()
            .mul_vec(vec3((px - cx) / f, (py - cy) / f, 1.0))
    }

    pub fn in_frame(&self, px: f64, py: f64) -> bool {
        px >= 0.0 && py >= 0.0 && px < self.width as f64 && py < self.height as f64
    }

    /// Ray through pixel `(x, y)` at sub-pixel offset `(dx, dy)` in `[0, 1)^2`.
    ///
    /// The direction has unit camera-z component, so hit distances equal camera depth.
    pub fn primary_ray(&self, x: u32, y: u32, (dx, dy): (f64, f64)) -> Ray {
        Ray::new(
            self.center(),
            self.ray_direction(x as f64 + dx, y as f64 + dy),
        )
    }
}

/// Camera rig ranges. Angles are in degrees; the radius is a multiple of the
/// main object's bounding radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RigParams {
    pub n_cameras: usize,
    pub elevation_deg: (f64, f64),
    pub azimuth_span_deg: f64,
    pub radius: (f64, f64),
    pub fov_deg: (f64, f64),
    pub perturb_deg: f64,
}

impl Default for RigParams {
    fn default() -> Self {
        Self {
            n_cameras: 8,
            elevation_deg: (-5.0, 30.0),
            azimuth_span_deg: 45.0,
            radius: (2.5, 4.0),
            fov_deg: (35.0, 65.0),
            perturb_deg: 2.0,
        }
    }
}

impl RigParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_cameras != 8 {
            return Err(format!("n_cameras must be 8, got {}", self.n_cameras));
        }
        let (elo, ehi) = self.elevation_deg;
        if !(elo <= ehi && elo > -90.0 && ehi < 90.0) {
            return Err(format!(
                "elevation_deg = [{elo}, {ehi}] must be ordered inside (-90, 90)"
            ));
        }
        if !(self.azimuth_span_deg >= 0.0 && self.azimuth_span_deg <= 360.0) {
            return Err(format!(
                "azimuth_span_deg = {} must lie in [0, 360]",
                self.azimuth_span_deg
            ));
        }
        let (rlo, rhi) = self.radius;
        if !(rlo > 0.0 && rlo <= rhi && rhi.is_finite()) {
            return Err(format!(
                "radius = [{rlo}, {rhi}] must be positive and ordered"
            ));
        }
        let (flo, fhi) = self.fov_deg;
        if !(flo > 0.0 && flo <= fhi && fhi < 180.0) {
            return Err(format!(
                "fov_deg = [{flo}, {fhi}] must be ordered inside (0, 180)"
            ));
        }
        if !(self.perturb_deg >= 0.0 && self.perturb_deg.is_finite()) {
            return Err(format!(
                "perturb_deg = {} must be non-negative",
                self.perturb_deg
            ));
        }
        Ok(())
    }
}

/// Elevation and azimuth (radians) of a camera center seen from the origin.
pub fn spherical_angles(c: V) -> (f64, f64) {
    let horizontal = (c.x * c.x + c.y * c.y).sqrt();
    (c.z.atan2(horizontal), c.y.atan2(c.x))
}

/// Draws the rig around the origin: a base azimuth, then per camera an azimuth
/// inside a window of `azimuth_span_deg` centered on it, an elevation, a
/// radius (times `unit_radius`) and a field of view. Each camera looks at the
/// origin and is then rotated by small Gaussian Euler angles.
pub fn place_cameras<R: Rng + ?Sized>(
    rng: &mut R,
    params: &RigParams,
    unit_radius: f64,
    width: u32,
    height: u32,
) -> Vec<CameraModel> {
    let base = rng.random::<f64>() * std::f64::consts::TAU;
    let half_span = params.azimuth_span_deg.to_radians() * 0.5;
    let (elo, ehi) = params.elevation_deg;
    let sigma = params.perturb_deg.to_radians();
    (0..params.n_cameras)
        .map(|_| {
            let azimuth = base + uniform(rng, (-half_span, half_span));
            let elevation = uniform(rng, (elo.to_radians(), ehi.to_radians()));
            let radius = uniform(rng, params.radius) * unit_radius;
            let fov = uniform(rng, params.fov_deg).to_radians();
            let eye = vec3(
                radius * elevation.cos() * azimuth.cos(),
                radius * elevation.cos() * azimuth.sin(),
                radius * elevation.sin(),
            );
            let cam = CameraModel::look_at(eye, Vec3::splat(0.0), fov, width, height);
            let mut angle = || sigma * rng.sample::<f64, _>(StandardNormal);
            let (ax, ay, az) = (angle(), angle(), angle());
            let delta = Mat3::rotation(vec3(0.0, 0.0, 1.0), az)
                .mul_mat(&Mat3::rotation(vec3(0.0, 1.0, 0.0), ay))
                .mul_mat(&Mat3::rotation(vec3(1.0, 0.0, 0.0), ax));
            cam.perturbed(&delta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

    #[test]
    fn look_at_axes() {
        let cam = CameraModel::look_at(vec3(3.0, 0.0, 0.0), vec3(0.0, 0.0, 0.0), 1.0, 640, 480);
        let c = cam.to_camera(vec3(0.0, 0.0, 0.0));
        assert!((c - vec3(0.0, 0.0, 3.0)).norm() < 1e-12);
        // world up projects upward in the image, i.e. negative camera y
        assert!(cam.to_camera(vec3(0.0, 0.0, 1.0)).y < 0.0);
        assert!((cam.center() - vec3(3.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn focal_from_fov() {
        let cam = CameraModel::look_at(
            vec3(3.0, 1.0, 0.5),
            vec3(0.0, 0.0, 0.0),
            2.0 * 0.5f64.atan(),
            640,
            480,
        );
        assert!((cam.focal() - 480.0).abs() < 1e-9);
        let k = cam.intrinsics();
        assert_eq!(k[0][1], 0.0);
        assert_eq!(k[2], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn unperturbed_cameras_aim_at_origin() {
        let params = RigParams {
            perturb_deg: 0.0,
            ..RigParams::default()
        };
        for cam in place_cameras(&mut rng_from(4), &params, 1.0, 64, 48) {
            let c = cam.center();
            let off_axis = c + cam.forward() * (cam.forward().dot(-c));
            assert!(off_axis.norm() < 1e-9);
        }
    }

    #[test]
    fn project_unproject_round_trip() {
        let cam = place_cameras(&mut rng_from(9), &RigParams::default(), 1.0, 640, 480)[0];
        let (px, py) = (123.25, 400.5);
        let p = cam.unproject(px, py, 2.75);
        let (qx, qy, d) = cam.project(p).unwrap();
        assert!((qx - px).abs() < 1e-9 && (qy - py).abs() < 1e-9 && (d - 2.75).abs() < 1e-12);
    }
}
