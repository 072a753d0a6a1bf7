use rand::Rng;
use serde::{Deserialize, Serialize};

use super::displace::{displace_mesh, DisplaceSpec};
use super::loft::{loft, LoftSpec};
use super::mesh::{tessellate, TriangleMesh};
use super::profile::{gen_profile, ProfileSpec};
use super::stem::{gen_stem, StemSpec};
use super::Result;
use crate::real::Real;

/// Everything needed to turn a seeded generator into one displaced shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRecipe<T> {
    /// Distinct cross-section curves shared by the loft.
    pub profiles: Vec<ProfileSpec<T>>,
    pub stem: StemSpec<T>,
    pub loft: LoftSpec<T>,
    pub res_u: usize,
    pub res_v: usize,
    /// Applied after the lofted mesh is scaled into the unit sphere.
    pub displace: Option<DisplaceSpec<T>>,
}

/// Lofts, tessellates, normalizes to the unit sphere, displaces and caps the tube ends.
///
/// The finished mesh is normalized once more, so its bounding sphere is the unit sphere.
pub fn build_shape<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    recipe: &ShapeRecipe<T>,
) -> Result<TriangleMesh<T>> {
    let profiles = recipe
        .profiles
        .iter()
        .map(|spec| gen_profile(rng, spec))
        .collect::<Result<Vec<_>>>()?;
    let stem = gen_stem(rng, &recipe.stem)?;
    let surface = loft(&profiles, &stem, &recipe.loft, rng)?;
    let mut mesh = tessellate(&surface, recipe.res_u, recipe.res_v)?;
    mesh.normalize_to_unit_sphere();
    if let Some(spec) = &recipe.displace {
        mesh = displace_mesh(&mesh, spec)?;
    }
    mesh.cap_boundary_loops();
    mesh.remove_degenerate(T::lit(1e-12));
    mesh.normalize_to_unit_sphere();
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseField;
    use crate::seed::rng_from;

    fn recipe() -> ShapeRecipe<f64> {
        ShapeRecipe {
            profiles: vec![
                ProfileSpec::starfish(10, 0.15, 0.1, 3),
                ProfileSpec::reptile(4, 0.5, 0.4, 3),
            ],
            stem: StemSpec {
                n_steps: 5,
                step_sigma: 0.6,
                turn_sigma: 0.5,
                degree: 3,
            },
            loft: LoftSpec {
                n_profiles: 5,
                scale_range: (0.4, 1.0),
            },
            res_u: 32,
            res_v: 16,
            displace: Some(DisplaceSpec {
                coarse_field: NoiseField::Perlin {
                    seed: 3,
                    scale: 4.0,
                    octaves: 3,
                },
                coarse_magnitude: 0.02,
                fine_field: NoiseField::unit_wave_z(30.0, 0.0),
                fine_magnitude: 0.005,
                subdivision_level: 1,
            }),
        }
    }

    #[test]
    fn shape_is_closed_and_deterministic() {
        let a = build_shape(&mut rng_from(11), &recipe()).unwrap();
        let b = build_shape(&mut rng_from(11), &recipe()).unwrap();
        assert_eq!(a, b);
        let (_, r) = a.bounding_sphere();
        assert!((r - 1.0).abs() < 1e-12);
        // no open boundary after capping
        let mut count = std::collections::HashMap::new();
        for t in &a.triangles {
            for k in 0..3 {
                let (p, q) = (
                    a.positions[t[k] as usize],
                    a.positions[t[(k + 1) % 3] as usize],
                );
                let key = |v: crate::math::Vec3<f64>| (v.x.to_bits(), v.y.to_bits(), v.z.to_bits());
                let e = if key(p) < key(q) {
                    (key(p), key(q))
                } else {
                    (key(q), key(p))
                };
                *count.entry(e).or_insert(0) += 1;
            }
        }
        assert!(count.values().all(|&c| c % 2 == 0));
    }
}
