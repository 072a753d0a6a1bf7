use rand::Rng;
use serde::{Deserialize, Serialize};

use super::RoomBox;
use crate::materials::{hsv_to_rgb, Rgb};
use crate::math::{vec2, vec3, Aabb, Vec2, Vec3};
use crate::seed::{uniform, uniform_usize};

/// One-sided rectangular emitter facing straight down.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaLight {
    pub center: Vec3<f64>,
    /// Half sizes along world x and y.
    pub half_extents: Vec2<f64>,
    pub normal: Vec3<f64>,
    /// Total emitted power.
    pub power: f64,
    pub color: Rgb,
}

impl AreaLight {
    pub fn area(&self) -> f64 {
        4.0 * self.half_extents.x * self.half_extents.y
    }

    /// Radiance of a Lambertian emitter: `power / (pi * area)`.
    pub fn radiance(&self) -> f64 {
        self.power / (std::f64::consts::PI * self.area())
    }

    /// Point at `(s, t)` in `[0, 1]^2` on the rectangle.
    pub fn point(&self, s: f64, t: f64) -> Vec3<f64> {
        self.center
            + vec3(
                (2.0 * s - 1.0) * self.half_extents.x,
                (2.0 * t - 1.0) * self.half_extents.y,
                0.0,
            )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LightConfig {
    /// Number of lights, drawn uniformly from this closed range.
    pub count: (usize, usize),
    pub half_extent: (f64, f64),
    pub power: (f64, f64),
    /// Upper bound of HSV saturation; lights stay near white.
    pub max_saturation: f64,
    /// Height of the light plane above the content top when there is no room box.
    pub height_above: (f64, f64),
    /// Half width of the light plane as a multiple of the content's horizontal radius.
    pub spread: f64,
}

impl Default for LightConfig {
    fn default() -> Self {
        Self {
            count: (80, 80),
            half_extent: (0.05, 0.25),
            power: (20.0, 60.0),
            max_saturation: 0.15,
            height_above: (0.5, 2.0),
            spread: 1.2,
        }
    }
}

impl LightConfig {
    pub fn validate(&self) -> Result<(), String> {
        let (clo, chi) = self.count;
        if !(clo >= 1 && clo <= chi) {
            return Err(format!(
                "count = [{clo}, {chi}] must be ordered and at least 1"
            ));
        }
        for (name, (lo, hi)) in [
            ("half_extent", self.half_extent),
            ("power", self.power),
            ("height_above", self.height_above),
        ] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(format!(
                    "{name} = [{lo}, {hi}] must be positive and ordered"
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.max_saturation) {
            return Err("max_saturation must lie in [0, 1]".into());
        }
        if !(self.spread > 0.0) {
            return Err("spread must be positive".into());
        }
        Ok(())
    }
}

/// Lights on a horizontal plane above `content.max.z`. With a room box, centers
/// lie strictly between the content top and the ceiling and strictly inside the walls.
pub fn place_lights<R: Rng + ?Sized>(
    rng: &mut R,
    config: &LightConfig,
    content: &Aabb<f64>,
    room_box: Option<&RoomBox>,
) -> Vec<AreaLight> {
    let count = uniform_usize(rng, config.count);
    let top = content.max.z;
    let c = content.center();
    let half = content.extent() * 0.5;
    let reach = half.x.max(half.y) * config.spread;
    let plane_z = match room_box {
        Some(room) => {
            let ceiling = room.bounds.max.z;
            top + (ceiling - top) * uniform(rng, (0.25, 0.75))
        }
        None => top + uniform(rng, config.height_above),
    };
    (0..count)
        .map(|_| {
            let mut he = vec2(
                uniform(rng, config.half_extent),
                uniform(rng, config.half_extent),
            );
            let center = match room_box {
                Some(room) => {
                    let (lo, hi) = (room.bounds.min, room.bounds.max);
                    // keep the whole emitter inside the walls
                    he.x = he.x.min((hi.x - lo.x) * 0.25);
                    he.y = he.y.min((hi.y - lo.y) * 0.25);
                    vec3(
                        uniform(rng, (lo.x + he.x, hi.x - he.x)),
                        uniform(rng, (lo.y + he.y, hi.y - he.y)),
                        plane_z,
                    )
                }
                None => vec3(
                    c.x + uniform(rng, (-reach, reach)),
                    c.y + uniform(rng, (-reach, reach)),
                    plane_z,
                ),
            };
            let color = hsv_to_rgb(
                rng.random::<f64>(),
                rng.random::<f64>() * config.max_saturation,
                1.0,
            );
            AreaLight {
                center,
                half_extents: he,
                normal: vec3(0.0, 0.0, -1.0),
                power: uniform(rng, config.power),
                color,
            }
        })
        .collect()
}
