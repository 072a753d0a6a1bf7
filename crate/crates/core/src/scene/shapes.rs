use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SizeClass;
use crate::materials::MaterialConfig;
use crate::noise::NoiseField;
use crate::seed::{uniform, uniform_usize};
use crate::shapegen::{DisplaceSpec, LoftSpec, ProfileSpec, ShapeRecipe, StemSpec};

/// Ranges for lofted shapes. Lengths are in profile or stem units before the
/// mesh is normalized to the unit sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapeConfig {
    pub starfish_probability: f64,
    pub profile_points: (usize, usize),
    pub profile_degree: (usize, usize),
    pub radial_sigma: (f64, f64),
    pub tangential_sigma: (f64, f64),
    pub reptile_steps: (usize, usize),
    pub reptile_step: (f64, f64),
    pub reptile_radius: (f64, f64),
    /// Control points of the closed curve fitted to a reptile outline.
    pub reptile_control_points: usize,
    /// Outline samples fed to that fit.
    pub reptile_fit_samples: usize,
    /// Distinct profiles drawn per shape.
    pub distinct_profiles: (usize, usize),
    pub stem_steps: (usize, usize),
    pub stem_step: (f64, f64),
    /// Direction noise of the stem walk; smaller values give straighter stems.
    pub stem_turn_sigma: f64,
    pub stem_degree: (usize, usize),
    pub sections: (usize, usize),
    pub section_scale: (f64, f64),
    pub large_resolution: (usize, usize),
    pub small_resolution: (usize, usize),
    pub tiny_resolution: (usize, usize),
    /// Subdivision passes for large objects before displacement.
    pub subdivision_level: u32,
}

impl Default for ShapeConfig {
    fn default() -> Self {
        Self {
            starfish_probability: 0.5,
            profile_points: (5, 12),
            profile_degree: (1, 3),
            radial_sigma: (0.05, 0.3),
            tangential_sigma: (0.0, 0.2),
            reptile_steps: (2, 6),
            reptile_step: (0.4, 1.0),
            reptile_radius: (0.25, 0.6),
            reptile_control_points: 16,
            reptile_fit_samples: 128,
            distinct_profiles: (2, 4),
            stem_steps: (2, 6),
            stem_step: (0.5, 1.5),
            stem_turn_sigma: 0.5,
            stem_degree: (1, 3),
            sections: (4, 8),
            section_scale: (0.4, 1.0),
            large_resolution: (64, 64),
            small_resolution: (24, 12),
            tiny_resolution: (12, 6),
            subdivision_level: 1,
        }
    }
}

fn ordered<T: PartialOrd + std::fmt::Display + Copy>(
    name: &str,
    (lo, hi): (T, T),
) -> Result<(), String> {
    if lo <= hi {
        Ok(())
    } else {
        Err(format!("{name} = [{lo}, {hi}] is inverted"))
    }
}

impl ShapeConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.starfish_probability) {
            return Err("starfish_probability must lie in [0, 1]".into());
        }
        ordered("profile_points", self.profile_points)?;
        if self.profile_points.0 < 4 {
            return Err("profile_points must be at least 4".into());
        }
        for (name, r) in [
            ("profile_degree", self.profile_degree),
            ("stem_degree", self.stem_degree),
        ] {
            ordered(name, r)?;
            if r.0 < 1 || r.1 > 3 {
                return Err(format!("{name} must lie in [1, 3]"));
            }
        }
        for (name, r) in [
            ("radial_sigma", self.radial_sigma),
            ("tangential_sigma", self.tangential_sigma),
        ] {
            ordered(name, r)?;
            if r.0 < 0.0 {
                return Err(format!("{name} must be non-negative"));
            }
        }
        for (name, r) in [
            ("reptile_step", self.reptile_step),
            ("reptile_radius", self.reptile_radius),
            ("stem_step", self.stem_step),
            ("section_scale", self.section_scale),
        ] {
            ordered(name, r)?;
            if !(r.0 > 0.0) {
                return Err(format!("{name} must be positive"));
            }
        }
        ordered("reptile_steps", self.reptile_steps)?;
        if self.reptile_steps.0 < 1 {
            return Err("reptile_steps must be at least 1".into());
        }
        if self.reptile_control_points < 4 || self.reptile_fit_samples < self.reptile_control_points
        {
            return Err("reptile fit needs at least 4 control points and as many samples".into());
        }
        ordered("distinct_profiles", self.distinct_profiles)?;
        if self.distinct_profiles.0 < 1 {
            return Err("distinct_profiles must be at least 1".into());
        }
        ordered("stem_steps", self.stem_steps)?;
        if self.stem_steps.0 < 2 {
            return Err("stem_steps must be at least 2".into());
        }
        if !(self.stem_turn_sigma >= 0.0) {
            return Err("stem_turn_sigma must be non-negative".into());
        }
        ordered("sections", self.sections)?;
        if self.sections.0 < 2 {
            return Err("sections must be at least 2".into());
        }
        for (name, (u, v)) in [
            ("large_resolution", self.large_resolution),
            ("small_resolution", self.small_resolution),
            ("tiny_resolution", self.tiny_resolution),
        ] {
            if u < 3 || v < 2 {
                return Err(format!("{name} must be at least [3, 2]"));
            }
        }
        if self.subdivision_level > 3 {
            return Err("subdivision_level must be at most 3".into());
        }
        Ok(())
    }
}

/// Displacement ranges, relative to the unit-sphere-normalized shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisplacementConfig {
    pub enabled: bool,
    pub coarse_magnitude: (f64, f64),
    pub fine_magnitude: (f64, f64),
    pub coarse_scale: (f64, f64),
    pub fine_scale: (f64, f64),
    pub octaves: u32,
}

impl Default for DisplacementConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            coarse_magnitude: (0.005, 0.03),
            fine_magnitude: (0.001, 0.005),
            coarse_scale: (2.0, 20.0),
            fine_scale: (20.0, 60.0),
            octaves: 3,
        }
    }
}

impl DisplacementConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, r) in [
            ("coarse_magnitude", self.coarse_magnitude),
            ("fine_magnitude", self.fine_magnitude),
        ] {
            ordered(name, r)?;
            if r.0 < 0.0 {
                return Err(format!("{name} must be non-negative"));
            }
        }
        for (name, r) in [
            ("coarse_scale", self.coarse_scale),
            ("fine_scale", self.fine_scale),
        ] {
            ordered(name, r)?;
            if !(r.0 > 0.0) {
                return Err(format!("{name} must be positive"));
            }
        }
        if self.octaves == 0 || self.octaves > 8 {
            return Err("octaves must lie in [1, 8]".into());
        }
        Ok(())
    }
}

/// A Perlin, wave or brick field at spatial frequency drawn from `scale`.
fn displacement_field<R: Rng + ?Sized>(
    rng: &mut R,
    scale: (f64, f64),
    octaves: u32,
) -> NoiseField<f64> {
    let config = MaterialConfig {
        field_scale: scale,
        perlin_octaves: (octaves, octaves),
        brick_width: (1.0 / scale.1, 1.0 / scale.0),
        ..MaterialConfig::default()
    };
    crate::materials::sample_field(rng, &config).0
}

fn profile_spec<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ShapeConfig,
    starfish: bool,
    degree: usize,
) -> ProfileSpec<f64> {
    if starfish {
        let n = uniform_usize(rng, config.profile_points).max(degree + 1);
        ProfileSpec::starfish(
            n,
            uniform(rng, config.radial_sigma),
            uniform(rng, config.tangential_sigma),
            degree,
        )
    } else {
        let mut spec = ProfileSpec::reptile(
            uniform_usize(rng, config.reptile_steps),
            uniform(rng, config.reptile_step),
            uniform(rng, config.reptile_radius),
            degree,
        );
        spec.n_points = config.reptile_control_points;
        spec.fit_samples = config.reptile_fit_samples;
        spec
    }
}

/// Draws the full set of shape parameters for one object of `class`.
pub fn sample_recipe<R: Rng + ?Sized>(
    rng: &mut R,
    shapes: &ShapeConfig,
    displacement: &DisplacementConfig,
    class: SizeClass,
) -> ShapeRecipe<f64> {
    let starfish = rng.random::<f64>() < shapes.starfish_probability;
    let degree = uniform_usize(rng, shapes.profile_degree);
    let n_profiles = uniform_usize(rng, shapes.distinct_profiles);
    let profiles = (0..n_profiles)
        .map(|_| profile_spec(rng, shapes, starfish, degree))
        .collect();
    let stem = StemSpec {
        n_steps: uniform_usize(rng, shapes.stem_steps),
        step_sigma: uniform(rng, shapes.stem_step),
        turn_sigma: shapes.stem_turn_sigma,
        degree: uniform_usize(rng, shapes.stem_degree),
    };
    let loft = LoftSpec {
        n_profiles: uniform_usize(rng, shapes.sections),
        scale_range: shapes.section_scale,
    };
    let (res_u, res_v) = match class {
        SizeClass::Large => shapes.large_resolution,
        SizeClass::Small => shapes.small_resolution,
        SizeClass::Tiny => shapes.tiny_resolution,
    };
    let displace = (displacement.enabled && class != SizeClass::Tiny).then(|| DisplaceSpec {
        coarse_field: displacement_field(rng, displacement.coarse_scale, displacement.octaves),
        coarse_magnitude: uniform(rng, displacement.coarse_magnitude),
        fine_field: displacement_field(rng, displacement.fine_scale, displacement.octaves),
        fine_magnitude: uniform(rng, displacement.fine_magnitude),
        subdivision_level: if class == SizeClass::Large {
            shapes.subdivision_level
        } else {
            0
        },
    });
    ShapeRecipe {
        profiles,
        stem,
        loft,
        res_u,
        res_v,
        displace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use crate::shapegen::build_shape;

    #[test]
    fn sampled_recipes_build() {
        let shapes = ShapeConfig {
            large_resolution: (24, 16),
            ..ShapeConfig::default()
        };
        let displacement = DisplacementConfig::default();
        for seed in 0..40 {
            let mut rng = rng_from(seed);
            let recipe = sample_recipe(&mut rng, &shapes, &displacement, SizeClass::Large);
            let mesh = build_shape(&mut rng, &recipe).unwrap();
            assert!(mesh.triangle_count() > 0);
        }
    }

    #[test]
    fn defaults_validate() {
        ShapeConfig::default().validate().unwrap();
        DisplacementConfig::default().validate().unwrap();
    }
}
