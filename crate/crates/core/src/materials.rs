//! Procedural surface appearance: two thresholded fields combined by a boolean
//! operator into a three-color texture, plus scalar roughness and metallic.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::{vec2, vec3, Vec3};
use crate::noise::NoiseField;
use crate::seed::uniform;

pub type Rgb = Vec3<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolOp {
    And,
    Or,
    Xor,
}

/// How much of the texture model an object receives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextureMode {
    /// One color per object.
    Uniform,
    /// A single thresholded field, two colors.
    Noise,
    /// Two thresholded fields combined with a boolean operator, three colors.
    NoiseBoolean,
}

/// Threshold that disables the second mask: it sits above every field value.
pub const DISABLED_THRESHOLD: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextureSpec {
    pub field_a: NoiseField<f64>,
    pub field_b: NoiseField<f64>,
    pub threshold_a: f64,
    /// Either inside `(-1, 1)` or above 1, in which case `mask_b` is always false.
    pub threshold_b: f64,
    pub bool_op: BoolOp,
    /// Base color where `mask_a` is false, base color where it is true, and
    /// the color used wherever the boolean combination holds.
    pub palette: [Rgb; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub texture: TextureSpec,
    pub roughness: f64,
    pub metallic: f64,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("invalid material: {0}")]
pub struct MaterialError(pub String);

impl TextureSpec {
    /// A texture that renders `color` everywhere.
    pub fn uniform(color: Rgb) -> Self {
        let field = NoiseField::unit_wave_z(1.0, 0.0);
        Self {
            field_a: field,
            field_b: field,
            threshold_a: 0.0,
            threshold_b: DISABLED_THRESHOLD,
            bool_op: BoolOp::And,
            palette: [color; 3],
        }
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        if !(self.threshold_a > -1.0 && self.threshold_a < 1.0) {
            return Err(MaterialError(format!(
                "threshold_a {} outside (-1, 1)",
                self.threshold_a
            )));
        }
        let b = self.threshold_b;
        if !(b > -1.0 && b.is_finite() && b != 1.0) {
            return Err(MaterialError(format!(
                "threshold_b {b} must lie in (-1, 1) or above 1"
            )));
        }
        for field in [&self.field_a, &self.field_b] {
            field.validate().map_err(MaterialError)?;
        }
        if self
            .palette
            .iter()
            .any(|c| [c.x, c.y, c.z].iter().any(|v| !(0.0..=1.0).contains(v)))
        {
            return Err(MaterialError("palette colors must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn masks(&self, p: Vec3<f64>) -> (bool, bool) {
        (
            binarize(self.field_a.eval(p), self.threshold_a),
            binarize(self.field_b.eval(p), self.threshold_b),
        )
    }
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<(), MaterialError> {
        if !(0.2..=1.0).contains(&self.roughness) {
            return Err(MaterialError(format!(
                "roughness {} outside [0.2, 1]",
                self.roughness
            )));
        }
        if !(0.0..=0.8).contains(&self.metallic) {
            return Err(MaterialError(format!(
                "metallic {} outside [0, 0.8]",
                self.metallic
            )));
        }
        self.texture.validate()
    }
}

#[inline]
pub fn binarize(value: f64, threshold: f64) -> bool {
    value >= threshold
}

#[inline]
pub fn combine(a: bool, b: bool, op: BoolOp) -> bool {
    match op {
        BoolOp::And => a && b,
        BoolOp::Or => a || b,
        BoolOp::Xor => a ^ b,
    }
}

/// Color at object-space point `p`.
pub fn texture_color(p: Vec3<f64>, spec: &TextureSpec) -> Rgb {
    let (a, b) = spec.masks(p);
    if combine(a, b, spec.bool_op) {
        spec.palette[2]
    } else {
        spec.palette[a as usize]
    }
}

/// Standard HSV to RGB; `h` wraps at 1.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let h6 = (h - h.floor()) * 6.0;
    let sector = (h6.floor() as i64).rem_euclid(6);
    let f = h6 - h6.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector {
        0 => vec3(v, t, p),
        1 => vec3(q, v, p),
        2 => vec3(p, v, t),
        3 => vec3(p, q, v),
        4 => vec3(t, p, v),
        _ => vec3(v, p, q),
    }
}

pub fn sample_hsv_color<R: Rng + ?Sized>(rng: &mut R) -> Rgb {
    let (h, s, v) = (
        rng.random::<f64>(),
        rng.random::<f64>(),
        rng.random::<f64>(),
    );
    hsv_to_rgb(h, s, v)
}

/// Ranges for the sampled texture fields, in object-space units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialConfig {
    pub texture_mode: TextureMode,
    /// Spatial frequency of Perlin and wave fields.
    pub field_scale: (f64, f64),
    pub perlin_octaves: (u32, u32),
    /// Threshold range for Perlin and wave masks.
    pub threshold: (f64, f64),
    pub brick_width: (f64, f64),
    pub brick_aspect: (f64, f64),
    pub mortar_fraction: (f64, f64),
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self {
            texture_mode: TextureMode::NoiseBoolean,
            field_scale: (2.0, 20.0),
            perlin_octaves: (1, 4),
            threshold: (-0.3, 0.3),
            brick_width: (0.1, 0.5),
            brick_aspect: (0.25, 0.6),
            mortar_fraction: (0.05, 0.15),
        }
    }
}

impl MaterialConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, (lo, hi): (f64, f64)| {
            if lo > 0.0 && hi >= lo && hi.is_finite() {
                Ok(())
            } else {
                Err(format!(
                    "{name} = [{lo}, {hi}] must be positive and ordered"
                ))
            }
        };
        positive("field_scale", self.field_scale)?;
        positive("brick_width", self.brick_width)?;
        positive("brick_aspect", self.brick_aspect)?;
        let (olo, ohi) = self.perlin_octaves;
        if olo < 1 || ohi < olo || ohi > 8 {
            return Err(format!(
                "perlin_octaves = [{olo}, {ohi}] must be ordered within [1, 8]"
            ));
        }
        let (tlo, thi) = self.threshold;
        if !(tlo > -1.0 && thi < 1.0 && thi >= tlo) {
            return Err(format!(
                "threshold = [{tlo}, {thi}] must be ordered inside (-1, 1)"
            ));
        }
        let (mlo, mhi) = self.mortar_fraction;
        if !(mlo >= 0.0 && mhi < 0.5 && mhi >= mlo) {
            return Err(format!(
                "mortar_fraction = [{mlo}, {mhi}] must be ordered within [0, 0.5)"
            ));
        }
        Ok(())
    }
}

/// Draws a Perlin, wave or brick field with equal probability, and its threshold.
pub fn sample_field<R: Rng + ?Sized>(
    rng: &mut R,
    config: &MaterialConfig,
) -> (NoiseField<f64>, f64) {
    match rng.random_range(0..3) {
        0 => {
            let octaves = rng.random_range(config.perlin_octaves.0..=config.perlin_octaves.1);
            let field = NoiseField::Perlin {
                seed: rng.random(),
                scale: uniform(rng, config.field_scale),
                octaves,
            };
            (field, uniform(rng, config.threshold))
        }
        1 => {
            let direction = loop {
                let d = vec3(
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                );
                let n = d.norm();
                if n > 1e-3 && n <= 1.0 {
                    break d / n;
                }
            };
            let field = NoiseField::Wave {
                direction,
                scale: uniform(rng, config.field_scale),
                phase: rng.random::<f64>() * std::f64::consts::TAU,
            };
            (field, uniform(rng, config.threshold))
        }
        _ => {
            let w = uniform(rng, config.brick_width);
            let h = w * uniform(rng, config.brick_aspect);
            let mortar = h * uniform(rng, config.mortar_fraction);
            let field = NoiseField::Brick {
                brick_size: vec2(w, h),
                mortar_width: mortar,
                row_offset: 0.5,
                seed: rng.random(),
            };
            // the signed brick field is -1 in mortar and +1 in bricks
            (field, -0.5)
        }
    }
}

pub fn sample_texture<R: Rng + ?Sized>(rng: &mut R, config: &MaterialConfig) -> TextureSpec {
    let palette = [
        sample_hsv_color(rng),
        sample_hsv_color(rng),
        sample_hsv_color(rng),
    ];
    match config.texture_mode {
        TextureMode::Uniform => TextureSpec::uniform(palette[0]),
        TextureMode::Noise => {
            let (field, threshold) = sample_field(rng, config);
            TextureSpec {
                field_a: field,
                field_b: field,
                threshold_a: threshold,
                threshold_b: DISABLED_THRESHOLD,
                bool_op: BoolOp::And,
                palette,
            }
        }
        TextureMode::NoiseBoolean => {
            let (field_a, threshold_a) = sample_field(rng, config);
            let (field_b, threshold_b) = sample_field(rng, config);
            let bool_op = [BoolOp::And, BoolOp::Or, BoolOp::Xor][rng.random_range(0..3)];
            TextureSpec {
                field_a,
                field_b,
                threshold_a,
                threshold_b,
                bool_op,
                palette,
            }
        }
    }
}

/// Roughness is 0.2 or uniform in `[0.2, 1]`; metallic is 0 or uniform in `[0, 0.8]`,
/// each by a fair coin.
pub fn sample_material<R: Rng + ?Sized>(rng: &mut R, config: &MaterialConfig) -> MaterialSpec {
    let roughness = if rng.random::<bool>() {
        0.2
    } else {
        rng.random_range(0.2..=1.0)
    };
    let metallic = if rng.random::<bool>() {
        0.0
    } else {
        rng.random_range(0.0..=0.8)
    };
    MaterialSpec {
        texture: sample_texture(rng, config),
        roughness,
        metallic,
    }
}
