//! Procedural multi-view stereo dataset generation: NURBS-lofted shapes with
//! noise displacement, thresholded procedural textures, an eight-camera rig,
//! scene furnishing and a CPU ray tracer with exact depth.
//!
//! Geometry modules are generic over the scalar type; the aliases below fix
//! it to `f64`, which is what the scene and rendering layers use.

// validation writes `!(x > lo)` so that NaN fails every range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod io;
pub mod materials;
pub mod math;
pub mod noise;
pub mod nurbs;
pub mod real;
pub mod render;
pub mod scene;
pub mod seed;
pub mod shapegen;

pub use config::{parse_config, Ablation, ConfigError, GeneratorConfig};
pub use real::Real;

pub type Vec2 = math::Vec2<f64>;
pub type Vec3 = math::Vec3<f64>;
pub type Mesh = shapegen::TriangleMesh<f64>;
pub type Curve2 = nurbs::NurbsCurve<f64, math::Vec2<f64>>;
pub type Curve3 = nurbs::NurbsCurve<f64, math::Vec3<f64>>;
pub type Surface = nurbs::NurbsSurface<f64>;
pub type Field = noise::NoiseField<f64>;
