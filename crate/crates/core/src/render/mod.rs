//! Deterministic CPU ray tracer: a binned-SAH hierarchy over all scene
//! triangles, direct lighting from rectangular area lights with a
//! Lambert + GGX surface model, and exact camera-z depth from one center ray
//! per pixel.
//!
//! Every random number used for a pixel comes from a stream keyed by
//! `(scene seed, camera, pixel)`, so images do not depend on thread scheduling.

mod bvh;
mod shade;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bvh::{intersect_triangle, Bvh, BvhError, Ray, TriHit};
pub use shade::{ggx_specular, lambert, schlick_fresnel, smith_g1};

use crate::materials::{texture_color, MaterialSpec};
use crate::math::{Similarity, Vec3};
use crate::scene::{AreaLight, CameraModel, SceneSpec};
use crate::seed::{derive, mix, Rng as StreamRng, Stream};

type V = Vec3<f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSettings {
    /// Primary samples per pixel, stratified on a grid when possible.
    pub spp: u32,
    /// Lights evaluated per shading point; the estimate is rescaled to the full set.
    pub lights_per_pixel: usize,
    /// Stratified samples per evaluated light.
    pub light_samples: u32,
    /// Disables the GGX lobe, leaving a pure Lambertian response.
    pub specular: bool,
    /// Luminance percentile mapped to 1.0 by the per-scene exposure.
    pub exposure_percentile: f64,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            spp: 1,
            lights_per_pixel: 16,
            light_samples: 4,
            specular: true,
            exposure_percentile: 0.99,
        }
    }
}

impl RenderSettings {
    pub fn validate(&self) -> Result<(), String> {
        if self.spp == 0 || self.spp > 1024 {
            return Err(format!("spp = {} must lie in [1, 1024]", self.spp));
        }
        if self.lights_per_pixel == 0 || self.light_samples == 0 {
            return Err("lights_per_pixel and light_samples must be positive".into());
        }
        if !(self.exposure_percentile > 0.0 && self.exposure_percentile <= 1.0) {
            return Err("exposure_percentile must lie in (0, 1]".into());
        }
        Ok(())
    }
}

/// Nearest surface hit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub surface: u32,
    pub triangle: u32,
    /// Barycentric weights of the three corners.
    pub barycentrics: [f64; 3],
    pub position: V,
    /// Interpolated unit shading normal (not yet flipped toward the viewer).
    pub normal: V,
    /// Unit geometric normal of the triangle.
    pub geometric_normal: V,
    pub object_position: V,
}

/// Per-surface shading data.
#[derive(Clone, Debug)]
pub struct Surface {
    pub material: MaterialSpec,
    /// Maps object space to world space; textures are evaluated in object space.
    pub transform: Similarity<f64>,
}

/// Rendered view: linear radiance before exposure and camera-z depth (0 on miss).
#[derive(Clone, Debug, PartialEq)]
pub struct RenderTarget {
    pub width: u32,
    pub height: u32,
    pub radiance: Vec<[f32; 3]>,
    pub depth: Vec<f32>,
}

impl RenderTarget {
    pub fn luminance(c: [f32; 3]) -> f64 {
        0.2126 * c[0] as f64 + 0.7152 * c[1] as f64 + 0.0722 * c[2] as f64
    }

    /// 8-bit sRGB after scaling by `exposure` and clamping to `[0, 1]`.
    pub fn to_srgb8(&self, exposure: f64) -> Vec<u8> {
        self.radiance
            .iter()
            .flat_map(|c| c.map(|v| encode_srgb(v as f64 * exposure)))
            .collect()
    }
}

pub fn encode_srgb(linear: f64) -> u8 {
    let c = if linear.is_nan() {
        0.0
    } else {
        linear.clamp(0.0, 1.0)
    };
    let s = if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    };
    (s * 255.0).round() as u8
}

/// Exposure mapping the given luminance percentile of all views to 1.0.
pub fn exposure_for(targets: &[RenderTarget], percentile: f64) -> f64 {
    let mut lum: Vec<f64> = targets
        .iter()
        .flat_map(|t| t.radiance.iter().map(|&c| RenderTarget::luminance(c)))
        .collect();
    if lum.is_empty() {
        return 1.0;
    }
    let k = ((lum.len() as f64 * percentile).ceil() as usize).clamp(1, lum.len()) - 1;
    let (_, v, _) = lum.select_nth_unstable_by(k, f64::total_cmp);
    if *v > 0.0 && v.is_finite() {
        1.0 / *v
    } else {
        1.0
    }
}

/// Flattened world-space geometry of a scene and its acceleration structure.
pub struct Renderer {
    positions: Vec<V>,
    normals: Vec<V>,
    triangles: Vec<[u32; 3]>,
    triangle_surface: Vec<u32>,
    surfaces: Vec<Surface>,
    lights: Vec<AreaLight>,
    bvh: Option<Bvh>,
    seed: u64,
}

impl Renderer {
    pub fn new(scene: &SceneSpec) -> Result<Self, BvhError> {
        let mut r = Self::empty(scene.seed, scene.lights.clone());
        for o in scene.all_objects() {
            r.add_surface(
                &o.world_mesh(),
                Surface {
                    material: o.material.clone(),
                    transform: o.transform,
                },
            );
        }
        if let Some(room) = &scene.room_box {
            for (mesh, material) in room.wall_meshes() {
                r.add_surface(
                    &mesh,
                    Surface {
                        material: material.clone(),
                        transform: Similarity::identity(),
                    },
                );
            }
        }
        if let Some(g) = &scene.ground_scatter {
            if let Some(plane) = &g.plane {
                let mesh = plane.mesh(g.center, g.height);
                r.add_surface(
                    &mesh,
                    Surface {
                        material: plane.material.clone(),
                        transform: Similarity::identity(),
                    },
                );
            }
        }
        r.finish()
    }

    /// Geometry from explicit world-space meshes, for fixtures.
    pub fn from_meshes(
        seed: u64,
        meshes: &[(crate::shapegen::TriangleMesh<f64>, Surface)],
        lights: Vec<AreaLight>,
    ) -> Result<Self, BvhError> {
        let mut r = Self::empty(seed, lights);
        for (mesh, surface) in meshes {
            r.add_surface(mesh, surface.clone());
        }
        r.finish()
    }

    fn empty(seed: u64, lights: Vec<AreaLight>) -> Self {
        Self {
            positions: Vec::new(),
            normals: Vec::new(),
            triangles: Vec::new(),
            triangle_surface: Vec::new(),
            surfaces: Vec::new(),
            lights,
            bvh: None,
            seed,
        }
    }

    fn add_surface(&mut self, mesh: &crate::shapegen::TriangleMesh<f64>, surface: Surface) {
        let base = self.positions.len() as u32;
        let id = self.surfaces.len() as u32;
        self.positions.extend_from_slice(&mesh.positions);
        self.normals.extend_from_slice(&mesh.normals);
        for t in &mesh.triangles {
            self.triangles.push(t.map(|i| i + base));
            self.triangle_surface.push(id);
        }
        self.surfaces.push(surface);
    }

    fn finish(mut self) -> Result<Self, BvhError> {
        self.bvh = Some(Bvh::build(&self.positions, &self.triangles)?);
        Ok(self)
    }

    pub fn bvh(&self) -> &Bvh {
        self.bvh
            .as_ref()
            .expect("renderer is always built with a hierarchy")
    }

    pub fn triangle_corners(&self, tri: u32) -> [V; 3] {
        self.triangles[tri as usize].map(|i| self.positions[i as usize])
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn surfaces(&self) -> &[Surface] {
        &self.surfaces
    }

    pub fn lights(&self) -> &[AreaLight] {
        &self.lights
    }

    pub fn set_lights(&mut self, lights: Vec<AreaLight>) {
        self.lights = lights;
    }

    /// Nearest hit for `t` in `(t_min, inf)`.
    pub fn trace(&self, ray: &Ray, t_min: f64) -> Option<Hit> {
        let h = self.bvh().intersect(ray, t_min, f64::INFINITY)?;
        let tri = self.triangles[h.triangle as usize];
        let [a, b, c] = tri.map(|i| self.positions[i as usize]);
        let w = [1.0 - h.u - h.v, h.u, h.v];
        let position = ray.at(h.t);
        let ng = (b - a).cross(c - a).normalized();
        let n = self.normals[tri[0] as usize] * w[0]
            + self.normals[tri[1] as usize] * w[1]
            + self.normals[tri[2] as usize] * w[2];
        let normal = n.try_normalized(1e-12).unwrap_or(ng);
        let surface = self.triangle_surface[h.triangle as usize];
        let object_position = self.surfaces[surface as usize]
            .transform
            .inverse_point(position);
        Some(Hit {
            t: h.t,
            surface,
            triangle: h.triangle,
            barycentrics: w,
            position,
            normal,
            geometric_normal: ng,
            object_position,
        })
    }

    /// Outgoing radiance toward `-ray.dir` from direct lighting at `hit`.
    pub fn shade<R: Rng + ?Sized>(
        &self,
        hit: &Hit,
        ray: &Ray,
        rng: &mut R,
        settings: &RenderSettings,
    ) -> V {
        let wo = -ray.dir.normalized();
        let ng = if hit.geometric_normal.dot(wo) < 0.0 {
            -hit.geometric_normal
        } else {
            hit.geometric_normal
        };
        let mut n = if hit.normal.dot(wo) < 0.0 {
            -hit.normal
        } else {
            hit.normal
        };
        if n.dot(wo) <= 1e-6 {
            n = ng;
        }
        let surface = &self.surfaces[hit.surface as usize];
        let material = &surface.material;
        let base = texture_color(hit.object_position, &material.texture);
        let origin = hit.position + ng * (1e-7 * (1.0 + hit.position.norm()));

        let n_lights = self.lights.len();
        if n_lights == 0 {
            return Vec3::splat(0.0);
        }
        let k = settings.lights_per_pixel.min(n_lights);
        let mut picks: Vec<u16> = (0..n_lights as u16).collect();
        if k < n_lights {
            for i in 0..k {
                let j = rng.random_range(i..n_lights);
                picks.swap(i, j);
            }
        }
        let grid = (settings.light_samples as f64).sqrt().floor().max(1.0) as u32;
        let strata = grid * grid;
        let per_light = settings.light_samples as f64;
        let mut sum = Vec3::splat(0.0);
        for &li in &picks[..k] {
            let light = &self.lights[li as usize];
            let le = light.radiance();
            let mut acc = Vec3::splat(0.0);
            for s in 0..settings.light_samples {
                let (su, sv) = if s < strata {
                    let (gx, gy) = (s % grid, s / grid);
                    (
                        (gx as f64 + rng.random::<f64>()) / grid as f64,
                        (gy as f64 + rng.random::<f64>()) / grid as f64,
                    )
                } else {
                    (rng.random::<f64>(), rng.random::<f64>())
                };
                let q = light.point(su, sv);
                let to_light = q - origin;
                let d2 = to_light.norm_squared();
                if d2 <= 0.0 {
                    continue;
                }
                let d = d2.sqrt();
                let wi = to_light / d;
                let cos_s = n.dot(wi);
                let cos_l = light.normal.dot(-wi);
                if cos_s <= 0.0 || cos_l <= 0.0 || ng.dot(wi) <= 0.0 {
                    continue;
                }
                if self
                    .bvh()
                    .occluded(&Ray::new(origin, to_light), 0.0, 1.0 - 1e-9)
                {
                    continue;
                }
                let mut f = lambert(base, material.metallic);
                if settings.specular {
                    f += ggx_specular(n, wo, wi, base, material.roughness, material.metallic);
                }
                acc += f * (cos_s * cos_l / d2);
            }
            sum += light.color.mul_elem(acc) * (le * light.area() / per_light);
        }
        sum * (n_lights as f64 / k as f64)
    }

    fn pixel_rng(&self, camera_key: u64, x: u32, y: u32) -> StreamRng {
        let pixel = ((y as u64) << 32) | x as u64;
        StreamRng::seed_from_u64(derive(self.seed, Stream::Render, mix(camera_key, pixel)))
    }

    /// Renders `camera`; `camera_key` keys the per-pixel sample streams.
    pub fn render_camera(
        &self,
        camera: &CameraModel,
        camera_key: u64,
        settings: &RenderSettings,
    ) -> RenderTarget {
        let (w, h) = (camera.width, camera.height);
        let spp = settings.spp;
        let grid = (spp as f64).sqrt().floor() as u32;
        let mut radiance = vec![[0.0f32; 3]; (w * h) as usize];
        let mut depth = vec![0.0f32; (w * h) as usize];
        radiance
            .par_chunks_mut(w as usize)
            .zip(depth.par_chunks_mut(w as usize))
            .enumerate()
            .for_each(|(y, (rad_row, depth_row))| {
                let y = y as u32;
                for x in 0..w {
                    let mut rng = self.pixel_rng(camera_key, x, y);
                    let center = camera.primary_ray(x, y, (0.5, 0.5));
                    let center_hit = self.trace(&center, 0.0);
                    depth_row[x as usize] = center_hit.map_or(0.0, |hit| hit.t as f32);
                    let mut sum = Vec3::splat(0.0);
                    if spp == 1 {
                        if let Some(hit) = &center_hit {
                            sum = self.shade(hit, &center, &mut rng, settings);
                        }
                    } else {
                        for s in 0..spp {
                            let offset = if s < grid * grid {
                                (
                                    ((s % grid) as f64 + rng.random::<f64>()) / grid as f64,
                                    ((s / grid) as f64 + rng.random::<f64>()) / grid as f64,
                                )
                            } else {
                                (rng.random::<f64>(), rng.random::<f64>())
                            };
                            let ray = camera.primary_ray(x, y, offset);
                            if let Some(hit) = self.trace(&ray, 0.0) {
                                sum += self.shade(&hit, &ray, &mut rng, settings);
                            }
                        }
                        sum = sum / spp as f64;
                    }
                    rad_row[x as usize] = [sum.x as f32, sum.y as f32, sum.z as f32];
                }
            });
        RenderTarget {
            width: w,
            height: h,
            radiance,
            depth,
        }
    }

    pub fn render_view(
        &self,
        scene: &SceneSpec,
        cam_index: usize,
        settings: &RenderSettings,
    ) -> RenderTarget {
        self.render_camera(&scene.cameras[cam_index], cam_index as u64, settings)
    }
}

/// Builds the scene geometry and renders one camera.
pub fn render_view(
    scene: &SceneSpec,
    cam_index: usize,
    settings: &RenderSettings,
) -> Result<RenderTarget, BvhError> {
    Ok(Renderer::new(scene)?.render_view(scene, cam_index, settings))
}
