//! Procedural scalar fields evaluated at object-space points: fractal
//! gradient (Perlin) noise, planar sine waves and a rectangular brick grid.
//!
//! All evaluators are pure functions of the field descriptor and the point.

use serde::{Deserialize, Serialize};

use crate::math::{vec3, Vec2, Vec3};
use crate::real::Real;
use crate::seed::{mix, splitmix64, unit_f64};

/// Largest magnitude a single octave of the gradient noise below can reach.
///
/// Obtained by maximizing the fade-weighted sum of the best-aligned edge
/// gradients over the unit cell; it is attained near (but not at) the cell center.
pub const PERLIN_OCTAVE_PEAK: f64 = 1.036_353_811_211_802_5;

/// Per-axis slope bound of one octave at unit frequency, before normalization.
///
/// The weight gradients sum to at most `2 * max fade'` = 3.75 per axis and each
/// corner term is at most `|g| |d| = sqrt(6)`; the gradient blend adds `|g| = sqrt(2)`.
const PERLIN_AXIS_SLOPE: f64 = 3.75 * 2.449_489_742_783_178 + std::f64::consts::SQRT_2;

const LACUNARITY: f64 = 2.0;
const GAIN: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseField<T> {
    Perlin {
        seed: u64,
        scale: T,
        octaves: u32,
    },
    Wave {
        direction: Vec3<T>,
        scale: T,
        phase: T,
    },
    Brick {
        brick_size: Vec2<T>,
        mortar_width: T,
        row_offset: T,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrickSample<T> {
    /// `false` inside mortar, `true` inside a brick.
    pub is_brick: bool,
    /// Per-brick constant in `[0, 1)`.
    pub jitter: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrickParams<T> {
    pub brick_size: Vec2<T>,
    pub mortar_width: T,
    pub row_offset: T,
    pub seed: u64,
}

// edge midpoints of the cube
const GRADIENTS: [[i8; 3]; 12] = [
    [1, 1, 0],
    [-1, 1, 0],
    [1, -1, 0],
    [-1, -1, 0],
    [1, 0, 1],
    [-1, 0, 1],
    [1, 0, -1],
    [-1, 0, -1],
    [0, 1, 1],
    [0, -1, 1],
    [0, 1, -1],
    [0, -1, -1],
];

#[inline]
fn lattice_hash(ix: i64, iy: i64, iz: i64, seed: u64) -> u64 {
    let h = seed
        ^ (ix as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (iy as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ (iz as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
    splitmix64(h)
}

#[inline]
fn fade<T: Real>(t: T) -> T {
    t * t * t * (t * (t * T::lit(6.0) - T::lit(15.0)) + T::lit(10.0))
}

#[inline]
fn lerp<T: Real>(a: T, b: T, t: T) -> T {
    a + (b - a) * t
}

#[inline]
fn grad_dot<T: Real>(h: u64, dx: T, dy: T, dz: T) -> T {
    let g = GRADIENTS[(h % 12) as usize];
    let c = |s: i8, d: T| match s {
        1 => d,
        -1 => -d,
        _ => T::zero(),
    };
    c(g[0], dx) + c(g[1], dy) + c(g[2], dz)
}

/// One octave of unnormalized gradient noise at unit lattice spacing.
fn gradient_noise<T: Real>(p: Vec3<T>, seed: u64) -> T {
    let (fx, fy, fz) = (p.x.floor(), p.y.floor(), p.z.floor());
    let (ix, iy, iz) = (
        fx.to_i64().unwrap_or(0),
        fy.to_i64().unwrap_or(0),
        fz.to_i64().unwrap_or(0),
    );
    let (dx, dy, dz) = (p.x - fx, p.y - fy, p.z - fz);
    let (u, v, w) = (fade(dx), fade(dy), fade(dz));
    let corner = |ox: i64, oy: i64, oz: i64| {
        let h = lattice_hash(ix + ox, iy + oy, iz + oz, seed);
        grad_dot(
            h,
            dx - T::lit(ox as f64),
            dy - T::lit(oy as f64),
            dz - T::lit(oz as f64),
        )
    };
    let x00 = lerp(corner(0, 0, 0), corner(1, 0, 0), u);
    let x10 = lerp(corner(0, 1, 0), corner(1, 1, 0), u);
    let x01 = lerp(corner(0, 0, 1), corner(1, 0, 1), u);
    let x11 = lerp(corner(0, 1, 1), corner(1, 1, 1), u);
    lerp(lerp(x00, x10, v), lerp(x01, x11, v), w)
}

/// Fractal gradient noise in `[-1, 1]` (lacunarity 2, gain 0.5, quintic fade).
pub fn perlin3<T: Real>(p: Vec3<T>, seed: u64, scale: T, octaves: u32) -> T {
    let octaves = octaves.max(1);
    let mut sum = T::zero();
    let mut amplitude = T::one();
    let mut total = T::zero();
    let mut frequency = scale;
    for k in 0..octaves {
        let octave_seed = mix(seed, k as u64);
        sum = sum + gradient_noise(p * frequency, octave_seed) * amplitude;
        total = total + amplitude;
        amplitude = amplitude * T::lit(GAIN);
        frequency = frequency * T::lit(LACUNARITY);
    }
    sum / (total * T::lit(PERLIN_OCTAVE_PEAK))
}

/// Upper bound on `|grad perlin3|` for the given scale and octave count.
pub fn perlin_gradient_bound<T: Real>(scale: T, octaves: u32) -> T {
    let octaves = octaves.max(1);
    let mut bound = T::zero();
    let mut total = T::zero();
    for k in 0..octaves {
        let amp = T::lit(GAIN.powi(k as i32));
        let freq = scale * T::lit(LACUNARITY.powi(k as i32));
        bound = bound + amp * freq;
        total = total + amp;
    }
    bound * T::lit(PERLIN_AXIS_SLOPE * 3f64.sqrt()) / (total * T::lit(PERLIN_OCTAVE_PEAK))
}

/// Planar sine wave `sin(scale * <p, direction> + phase)`.
#[inline]
pub fn wave<T: Real>(p: Vec3<T>, direction: Vec3<T>, scale: T, phase: T) -> T {
    (scale * p.dot(direction) + phase).sin()
}

/// Brick grid on the object-frame `(x, z)` plane with rows stacked along `z`.
pub fn brick<T: Real>(p: Vec3<T>, params: &BrickParams<T>) -> BrickSample<T> {
    let (w, h) = (params.brick_size.x, params.brick_size.y);
    let row = (p.z / h).floor();
    let row_i = row.to_i64().unwrap_or(0);
    let shift = if row_i.rem_euclid(2) == 1 {
        params.row_offset * w
    } else {
        T::zero()
    };
    let xs = p.x + shift;
    let col = (xs / w).floor();
    let col_i = col.to_i64().unwrap_or(0);
    let lx = xs - col * w;
    let lz = p.z - row * h;
    let half = params.mortar_width * T::lit(0.5);
    let in_mortar = lx.min(w - lx) < half || lz.min(h - lz) < half;
    let jitter = unit_f64(lattice_hash(col_i, row_i, 0, splitmix64(params.seed)));
    BrickSample {
        is_brick: !in_mortar,
        jitter: T::lit(jitter),
    }
}

impl<T: Real> NoiseField<T> {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            NoiseField::Perlin { scale, octaves, .. } => {
                if !(scale > T::zero() && scale.is_finite()) {
                    return Err(format!("perlin scale must be positive, got {scale}"));
                }
                if octaves == 0 {
                    return Err("perlin octaves must be at least 1".into());
                }
            }
            NoiseField::Wave {
                direction,
                scale,
                phase,
            } => {
                if (direction.norm() - T::one()).abs() > T::lit(1e-6) {
                    return Err("wave direction must be unit length".into());
                }
                if !(scale > T::zero() && scale.is_finite() && phase.is_finite()) {
                    return Err(format!("wave scale must be positive, got {scale}"));
                }
            }
            NoiseField::Brick {
                brick_size,
                mortar_width,
                row_offset,
                ..
            } => {
                if !(brick_size.x > T::zero() && brick_size.y > T::zero()) {
                    return Err("brick size must be positive".into());
                }
                if !(mortar_width >= T::zero()) {
                    return Err("mortar width must be non-negative".into());
                }
                if !(row_offset >= T::zero() && row_offset <= T::one()) {
                    return Err("brick row offset must lie in [0, 1]".into());
                }
            }
        }
        Ok(())
    }

    /// Signed field value in `[-1, 1]`; bricks map mortar to -1 and brick to +1.
    pub fn eval(&self, p: Vec3<T>) -> T {
        match *self {
            NoiseField::Perlin {
                seed,
                scale,
                octaves,
            } => perlin3(p, seed, scale, octaves),
            NoiseField::Wave {
                direction,
                scale,
                phase,
            } => wave(p, direction, scale, phase),
            NoiseField::Brick {
                brick_size,
                mortar_width,
                row_offset,
                seed,
            } => {
                let s = brick(
                    p,
                    &BrickParams {
                        brick_size,
                        mortar_width,
                        row_offset,
                        seed,
                    },
                );
                if s.is_brick {
                    T::one()
                } else {
                    -T::one()
                }
            }
        }
    }

    pub fn unit_wave_z(scale: T, phase: T) -> Self {
        NoiseField::Wave {
            direction: vec3(T::zero(), T::zero(), T::one()),
            scale,
            phase,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::vec2;

    #[test]
    fn lattice_points_vanish() {
        for (x, y, z) in [(0, 0, 0), (3, -2, 7), (-11, 5, 1)] {
            let p = vec3(x as f64, y as f64, z as f64);
            assert_eq!(perlin3(p, 42, 1.0, 1), 0.0);
        }
    }

    #[test]
    fn deterministic() {
        let p = vec3(0.31f64, -2.7, 9.12);
        assert_eq!(
            perlin3(p, 5, 3.0, 4).to_bits(),
            perlin3(p, 5, 3.0, 4).to_bits()
        );
    }

    #[test]
    fn wave_examples() {
        let d = vec3(0.0, 0.6, 0.8);
        assert_eq!(wave(vec3(0.0, 0.0, 0.0), d, 3.0, 0.0), 0.0);
        let p = vec3(0.2, -0.4, 1.1);
        let scale = 3.0;
        let period = std::f64::consts::TAU / scale;
        assert!((wave(p, d, scale, 0.4) - wave(p + d * period, d, scale, 0.4)).abs() < 1e-12);
        assert!(
            (wave(p, d, scale, 0.4) + wave(p, d, scale, 0.4 + std::f64::consts::PI)).abs() < 1e-12
        );
    }

    #[test]
    fn brick_examples() {
        let params = BrickParams {
            brick_size: vec2(2.0, 1.0),
            mortar_width: 0.1,
            row_offset: 0.5,
            seed: 3,
        };
        let center = brick(vec3(1.0, 0.0, 0.5), &params);
        assert!(center.is_brick);
        assert!(!brick(vec3(0.7, 5.0, 1.0), &params).is_brick);
        assert!(!brick(vec3(0.7, 0.0, 0.0), &params).is_brick);
        let a = brick(vec3(0.6, 0.0, 0.3), &params);
        let b = brick(vec3(1.4, 9.0, 0.7), &params);
        assert!(a.is_brick && b.is_brick);
        assert_eq!(a.jitter, b.jitter);
        // odd rows are shifted by half a brick
        assert!(!brick(vec3(1.0, 0.0, 1.5), &params).is_brick);
    }

    #[test]
    fn field_eval_dispatch() {
        let w = NoiseField::unit_wave_z(2.0, 0.0);
        assert_eq!(w.eval(vec3(0.0, 0.0, 0.0)), 0.0);
        let p = NoiseField::Perlin {
            seed: 9,
            scale: 1.0,
            octaves: 1,
        };
        assert_eq!(p.eval(vec3(2.0, -1.0, 4.0)), 0.0);
        let b = NoiseField::Brick {
            brick_size: vec2(1.0, 0.5),
            mortar_width: 0.05,
            row_offset: 0.5,
            seed: 1,
        };
        assert_eq!(b.eval(vec3(0.3, 0.0, 0.0)), -1.0);
        assert_eq!(b.eval(vec3(0.5, 0.0, 0.25)), 1.0);
    }

    #[test]
    fn validate_rejects_bad_params() {
        assert!(NoiseField::Perlin {
            seed: 0,
            scale: 0.0f64,
            octaves: 1
        }
        .validate()
        .is_err());
        assert!(NoiseField::Perlin {
            seed: 0,
            scale: 1.0f64,
            octaves: 0
        }
        .validate()
        .is_err());
        assert!(NoiseField::Wave {
            direction: vec3(1.0, 1.0, 0.0),
            scale: 1.0f64,
            phase: 0.0
        }
        .validate()
        .is_err());
        assert!(NoiseField::Brick {
            brick_size: vec2(1.0, 0.0),
            mortar_width: 0.1f64,
            row_offset: 0.5,
            seed: 0
        }
        .validate()
        .is_err());
    }
}
