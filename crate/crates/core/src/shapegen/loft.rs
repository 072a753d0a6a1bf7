use rand::Rng;
use serde::{Deserialize, Serialize};

use super::frame::parallel_transport_frames;
use super::profile::Profile;
use super::stem::Stem;
use super::{Result, ShapeError};
use crate::math::{vec3, Vec3};
use crate::nurbs::{fit_closed_curve, KnotVector, NurbsSurface};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoftSpec<T> {
    /// Cross-sections placed along the stem.
    pub n_profiles: usize,
    pub scale_range: (T, T),
}

impl<T: Real> LoftSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_profiles < 2 {
            return Err(ShapeError::Invalid(
                "loft needs at least 2 cross-sections".into(),
            ));
        }
        let (lo, hi) = self.scale_range;
        if !(lo > T::zero() && hi >= lo && hi.is_finite()) {
            return Err(ShapeError::Invalid(format!(
                "loft scale range ({lo}, {hi}) must be positive and ordered"
            )));
        }
        Ok(())
    }
}

const HARMONIZE_SAMPLES: usize = 128;

/// Refits profiles so they all share the largest control count and degree.
pub fn harmonize_profiles<T: Real>(profiles: &[Profile<T>]) -> Result<Vec<Profile<T>>> {
    if profiles.is_empty() {
        return Err(ShapeError::Invalid(
            "loft needs at least one profile".into(),
        ));
    }
    if let Some(open) = profiles.iter().find(|p| !p.is_closed()) {
        return Err(ShapeError::Invalid(format!(
            "profile of degree {} is not closed",
            open.degree()
        )));
    }
    let n = profiles
        .iter()
        .map(|p| p.control_points().len())
        .max()
        .unwrap();
    let degree = profiles.iter().map(|p| p.degree()).max().unwrap();
    profiles
        .iter()
        .map(|p| {
            if p.control_points().len() == n && p.degree() == degree {
                Ok(p.clone())
            } else {
                let samples = p.sample(HARMONIZE_SAMPLES.max(4 * n));
                Ok(fit_closed_curve(&samples, degree, n)?)
            }
        })
        .collect()
}

fn stem_tangent<T: Real>(stem: &Stem<T>, t: T) -> Result<Vec3<T>> {
    let (a, b) = stem.domain();
    let eps = (b - a) * T::lit(1e-4);
    let mid = (a + b) * T::lit(0.5);
    let mut s = t;
    for _ in 0..8 {
        let (_, d) = stem.point_and_tangent(s)?;
        if let Some(tan) = d.try_normalized(T::lit(1e-12)) {
            return Ok(tan);
        }
        // coincident control points: step toward the interior
        s = if s < mid { s + eps } else { s - eps };
    }
    Err(ShapeError::Invalid("stem tangent vanishes".into()))
}

/// Sweeps cross-sections along `stem` into a surface closed in `u`.
///
/// Each of `spec.n_profiles` sections sits at a uniform stem parameter, uses one
/// of `profiles` (in order when the counts match, otherwise drawn at random) and
/// a scale drawn from `spec.scale_range`. The profile's `(x, y)` map to the
/// frame's `(normal, binormal)`, so counter-clockwise profiles yield outward
/// surface normals.
pub fn loft<T: Real, R: Rng + ?Sized>(
    profiles: &[Profile<T>],
    stem: &Stem<T>,
    spec: &LoftSpec<T>,
    rng: &mut R,
) -> Result<NurbsSurface<T>> {
    spec.validate()?;
    let profiles = harmonize_profiles(profiles)?;
    let sections = spec.n_profiles;
    let (a, b) = stem.domain();
    let params: Vec<T> = (0..sections)
        .map(|k| a + (b - a) * T::from_usize_lossy(k) / T::from_usize_lossy(sections - 1))
        .collect();
    let centers = params
        .iter()
        .map(|&t| stem.point(t))
        .collect::<crate::nurbs::Result<Vec<_>>>()?;
    let tangents = params
        .iter()
        .map(|&t| stem_tangent(stem, t))
        .collect::<Result<Vec<_>>>()?;
    let frames = parallel_transport_frames(&tangents, vec3(T::zero(), T::zero(), T::one()));

    let (lo, hi) = spec.scale_range;
    let mut chosen = Vec::with_capacity(sections);
    for _ in 0..sections {
        let pick = if profiles.len() == sections {
            chosen.len()
        } else {
            rng.random_range(0..profiles.len())
        };
        let scale = if hi > lo {
            T::lit(rng.random_range(lo.as_f64()..=hi.as_f64()))
        } else {
            lo
        };
        chosen.push((pick, scale));
    }

    let count_u = profiles[0].control_points().len();
    let degree_u = profiles[0].degree();
    let mut net = vec![Vec3::splat(T::zero()); count_u * sections];
    for (k, &(pick, scale)) in chosen.iter().enumerate() {
        let f = &frames[k];
        for (i, q) in profiles[pick].control_points().iter().enumerate() {
            net[i * sections + k] = centers[k] + (f.normal * q.x + f.binormal * q.y) * scale;
        }
    }
    let degree_v = if sections >= 4 { 3 } else { sections - 1 };
    Ok(NurbsSurface::new(
        net,
        vec![T::one(); count_u * sections],
        count_u,
        sections,
        KnotVector::periodic_uniform(count_u, degree_u)?,
        KnotVector::clamped_uniform(sections, degree_v)?,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nurbs::NurbsCurve;
    use crate::seed::rng_from;
    use crate::shapegen::profile::{gen_starfish_profile, ProfileSpec};

    fn straight_stem() -> Stem<f64> {
        NurbsCurve::open(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(0.3, 0.4, 1.0),
                vec3(0.6, 0.8, 2.0),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn constant_scale_tube_radius() {
        let profile =
            gen_starfish_profile(&mut rng_from(1), &ProfileSpec::starfish(12, 0.0, 0.0, 3))
                .unwrap();
        let dense = profile.sample(2048);
        let r_star = dense.iter().map(|p| p.norm()).sum::<f64>() / dense.len() as f64;
        let s = 0.7;
        let spec = LoftSpec {
            n_profiles: 5,
            scale_range: (s, s),
        };
        let stem = straight_stem();
        let surf = loft(&[profile], &stem, &spec, &mut rng_from(2)).unwrap();
        let axis = vec3(0.6, 0.8, 2.0).normalized();
        for iu in 0..64 {
            for iv in 0..=16 {
                let p = surf
                    .point(iu as f64 * 12.0 / 64.0, iv as f64 / 16.0)
                    .unwrap();
                let radial = (p - axis * p.dot(axis)).norm();
                assert!((radial - s * r_star).abs() < 0.01 * s, "{radial}");
            }
        }
    }

    #[test]
    fn surface_is_periodic_in_u() {
        let spec = ProfileSpec::starfish(8, 0.2, 0.1, 3);
        let profiles = [
            gen_starfish_profile(&mut rng_from(4), &spec).unwrap(),
            gen_starfish_profile(&mut rng_from(5), &spec).unwrap(),
        ];
        let loft_spec = LoftSpec {
            n_profiles: 6,
            scale_range: (0.5, 1.2),
        };
        let surf = loft(&profiles, &straight_stem(), &loft_spec, &mut rng_from(6)).unwrap();
        assert_eq!(surf.degree_v(), 3);
        for k in 0..20 {
            let u = k as f64 * 0.37;
            let v = k as f64 / 19.0;
            let d = surf.point(u, v).unwrap() - surf.point(u + 8.0, v).unwrap();
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_profiles_are_refit() {
        let a =
            gen_starfish_profile(&mut rng_from(4), &ProfileSpec::starfish(8, 0.1, 0.1, 2)).unwrap();
        let b = gen_starfish_profile(&mut rng_from(5), &ProfileSpec::starfish(12, 0.1, 0.1, 3))
            .unwrap();
        let out = harmonize_profiles(&[a, b]).unwrap();
        assert!(out
            .iter()
            .all(|p| p.control_points().len() == 12 && p.degree() == 3));
    }

    #[test]
    fn two_sections_are_linear() {
        let p =
            gen_starfish_profile(&mut rng_from(4), &ProfileSpec::starfish(8, 0.1, 0.1, 2)).unwrap();
        let spec = LoftSpec {
            n_profiles: 2,
            scale_range: (1.0, 1.0),
        };
        let surf = loft(&[p], &straight_stem(), &spec, &mut rng_from(1)).unwrap();
        assert_eq!(surf.degree_v(), 1);
    }
}
