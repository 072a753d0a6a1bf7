use std::f64::consts::PI;

use crate::materials::Rgb;
use crate::math::Vec3;

type V = Vec3<f64>;

/// Diffuse lobe: `(1 - metallic) * base / pi`.
pub fn lambert(base: Rgb, metallic: f64) -> Rgb {
    base * ((1.0 - metallic) / PI)
}

pub fn schlick_fresnel(f0: Rgb, cos_theta: f64) -> Rgb {
    let m = (1.0 - cos_theta.clamp(0.0, 1.0)).powi(5);
    f0 + (Vec3::splat(1.0) - f0) * m
}

/// Smith masking for GGX with `alpha = roughness^2`.
pub fn smith_g1(n_dot_x: f64, alpha: f64) -> f64 {
    let c = n_dot_x.max(1e-9);
    let a2 = alpha * alpha;
    2.0 * c / (c + (a2 + (1.0 - a2) * c * c).sqrt())
}

/// GGX microfacet specular term as a BRDF value (without the cosine factor).
pub fn ggx_specular(n: V, wo: V, wi: V, base: Rgb, roughness: f64, metallic: f64) -> Rgb {
    let n_o = n.dot(wo);
    let n_i = n.dot(wi);
    if n_o <= 0.0 || n_i <= 0.0 {
        return Vec3::splat(0.0);
    }
    let Some(h) = (wo + wi).try_normalized(1e-12) else {
        return Vec3::splat(0.0);
    };
    let alpha = (roughness * roughness).max(1e-3);
    let a2 = alpha * alpha;
    let n_h = n.dot(h).max(0.0);
    let denom = n_h * n_h * (a2 - 1.0) + 1.0;
    let d = a2 / (PI * denom * denom);
    let g = smith_g1(n_o, alpha) * smith_g1(n_i, alpha);
    let f0 = Vec3::splat(0.04) * (1.0 - metallic) + base * metallic;
    let f = schlick_fresnel(f0, wo.dot(h));
    f * (d * g / (4.0 * n_o * n_i))
}
