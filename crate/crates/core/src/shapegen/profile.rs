use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::offset::{is_simple_polygon, offset_outline, resample_closed};
use super::{Result, ShapeError};
use crate::math::{vec2, Vec2};
use crate::nurbs::{fit_closed_curve, NurbsCurve, MAX_DEGREE};
use crate::real::Real;

pub type Profile<T> = NurbsCurve<T, Vec2<T>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileStyle {
    Starfish,
    Reptile,
}

/// Parameters for one closed cross-section curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec<T> {
    pub style: ProfileStyle,
    /// Control points of the profile (both styles).
    pub n_points: usize,
    pub radial_sigma: T,
    pub tangential_sigma: T,
    pub walk_steps: usize,
    pub step_sigma: T,
    pub offset_radius: T,
    /// Outline samples fed to the closed-curve fit (reptile only).
    pub fit_samples: usize,
    pub degree: usize,
}

impl<T: Real> ProfileSpec<T> {
    pub fn starfish(n_points: usize, radial_sigma: T, tangential_sigma: T, degree: usize) -> Self {
        Self {
            style: ProfileStyle::Starfish,
            n_points,
            radial_sigma,
            tangential_sigma,
            walk_steps: 0,
            step_sigma: T::zero(),
            offset_radius: T::one(),
            fit_samples: 128,
            degree,
        }
    }

    pub fn reptile(walk_steps: usize, step_sigma: T, offset_radius: T, degree: usize) -> Self {
        Self {
            style: ProfileStyle::Reptile,
            n_points: 16,
            radial_sigma: T::zero(),
            tangential_sigma: T::zero(),
            walk_steps,
            step_sigma,
            offset_radius,
            fit_samples: 128,
            degree,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 || self.degree > MAX_DEGREE {
            return Err(ShapeError::Invalid(format!(
                "profile degree {} outside [1, 3]",
                self.degree
            )));
        }
        if self.n_points < self.degree + 1 {
            return Err(ShapeError::Invalid(format!(
                "profile needs at least {} points, got {}",
                self.degree + 1,
                self.n_points
            )));
        }
        if !(self.radial_sigma >= T::zero() && self.tangential_sigma >= T::zero()) {
            return Err(ShapeError::Invalid(
                "profile sigmas must be non-negative".into(),
            ));
        }
        if self.style == ProfileStyle::Reptile {
            if !(self.offset_radius > T::zero()) {
                return Err(ShapeError::Invalid(
                    "reptile offset radius must be positive".into(),
                ));
            }
            if self.walk_steps < 1 || !(self.step_sigma > T::zero()) {
                return Err(ShapeError::Invalid(
                    "reptile walk needs steps and a positive sigma".into(),
                ));
            }
            if self.fit_samples < self.n_points {
                return Err(ShapeError::Invalid(
                    "reptile fit needs at least n_points samples".into(),
                ));
            }
        }
        Ok(())
    }
}

const MAX_RETRIES: usize = 16;
const MIN_RADIUS: f64 = 0.05;

#[inline]
pub(crate) fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Jittered unit-circle control polygon, closed in `spec.degree`.
pub fn gen_starfish_profile<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ProfileSpec<T>,
) -> Result<Profile<T>> {
    if spec.style != ProfileStyle::Starfish {
        return Err(ShapeError::Invalid("spec style is not starfish".into()));
    }
    spec.validate()?;
    let n = spec.n_points;
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let angle = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n);
        let radial = vec2(angle.cos(), angle.sin());
        let tangential = radial.perp();
        let mut attempt = 0;
        let p = loop {
            let r = T::one() + spec.radial_sigma * gaussian(rng);
            let t = spec.tangential_sigma * gaussian::<T, _>(rng);
            let p = radial * r + tangential * t;
            // a point pushed through the center would fold the polygon
            if r > T::lit(MIN_RADIUS) && p.dot(radial) > T::lit(MIN_RADIUS) {
                break p;
            }
            attempt += 1;
            if attempt >= MAX_RETRIES {
                break radial * T::lit(MIN_RADIUS);
            }
        };
        points.push(p);
    }
    Ok(NurbsCurve::closed(points, spec.degree)?)
}

/// Closed profile from an offset outline around a 2D random walk, normalized to unit radius.
pub fn gen_reptile_profile<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ProfileSpec<T>,
) -> Result<Profile<T>> {
    if spec.style != ProfileStyle::Reptile {
        return Err(ShapeError::Invalid("spec style is not reptile".into()));
    }
    spec.validate()?;
    for _ in 0..MAX_RETRIES {
        let mut walk = vec![vec2(T::zero(), T::zero())];
        for _ in 0..spec.walk_steps {
            let last = *walk.last().unwrap();
            let step = vec2(gaussian::<T, _>(rng), gaussian::<T, _>(rng)) * spec.step_sigma;
            walk.push(last + step);
        }
        let degree = spec.degree.min(walk.len() - 1);
        let spine = NurbsCurve::open(walk, degree)?;
        if let Ok(profile) = profile_from_spine(&spine, spec) {
            return Ok(normalize_profile(&profile));
        }
    }
    // a straight walk always yields a valid stadium
    let spine = NurbsCurve::open(
        vec![vec2(T::zero(), T::zero()), vec2(spec.step_sigma, T::zero())],
        1,
    )?;
    Ok(normalize_profile(&profile_from_spine(&spine, spec)?))
}

/// Offsets `spine` by `spec.offset_radius` and fits a closed curve of `spec.n_points` controls.
pub fn profile_from_spine<T: Real>(
    spine: &NurbsCurve<T, Vec2<T>>,
    spec: &ProfileSpec<T>,
) -> Result<Profile<T>> {
    let outline = offset_outline(spine, spec.offset_radius, 256)?;
    if !is_simple_polygon(&outline) {
        return Err(ShapeError::Invalid("offset outline self-intersects".into()));
    }
    let samples = resample_closed(&outline, spec.fit_samples);
    Ok(fit_closed_curve(&samples, spec.degree, spec.n_points)?)
}

/// Centers a profile on its dense-sample centroid and scales its farthest point to radius 1.
pub fn normalize_profile<T: Real>(profile: &Profile<T>) -> Profile<T> {
    let dense = profile.sample(256);
    let n = T::from_usize_lossy(dense.len());
    let centroid = dense.iter().fold(vec2(T::zero(), T::zero()), |a, &p| a + p) / n;
    let radius = dense
        .iter()
        .map(|&p| (p - centroid).norm())
        .fold(T::zero(), T::max);
    let scale = if radius > T::zero() {
        T::one() / radius
    } else {
        T::one()
    };
    profile.map_points(|&p| (p - centroid) * scale)
}

pub fn gen_profile<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ProfileSpec<T>,
) -> Result<Profile<T>> {
    match spec.style {
        ProfileStyle::Starfish => gen_starfish_profile(rng, spec),
        ProfileStyle::Reptile => gen_reptile_profile(rng, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use crate::shapegen::offset::{signed_area, stadium_deviation};

    #[test]
    fn zero_noise_starfish_is_round() {
        let spec = ProfileSpec::starfish(12, 0.0, 0.0, 3);
        let c = gen_starfish_profile(&mut rng_from(1), &spec).unwrap();
        let radii: Vec<f64> = c.sample(2048).iter().map(|p| p.norm()).collect();
        let mean = radii.iter().sum::<f64>() / radii.len() as f64;
        let worst = radii.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
        assert!(worst < 0.01, "radius spread {worst}");
    }

    #[test]
    fn starfish_is_deterministic_and_ccw() {
        let spec = ProfileSpec::starfish(9, 0.2, 0.1, 2);
        let a = gen_starfish_profile(&mut rng_from(77), &spec).unwrap();
        let b = gen_starfish_profile(&mut rng_from(77), &spec).unwrap();
        assert_eq!(a, b);
        assert!(signed_area(&a.sample(200)) > 0.0);
    }

    #[test]
    fn starfish_degree_out_of_range() {
        for degree in [0, 4] {
            let spec = ProfileSpec::starfish(12, 0.1, 0.1, degree);
            assert!(gen_starfish_profile(&mut rng_from(0), &spec).is_err());
        }
    }

    #[test]
    fn stadium_fit_deviation() {
        let r = 0.5;
        let (a, b) = (vec2(0.0, 0.0), vec2(1.0, 0.0));
        let spine = NurbsCurve::open(vec![a, b], 1).unwrap();
        let spec = ProfileSpec::reptile(1, 1.0, r, 3);
        let fitted = profile_from_spine(&spine, &spec).unwrap();
        let worst = fitted
            .sample(2048)
            .iter()
            .map(|&q| stadium_deviation(q, a, b, r))
            .fold(0.0, f64::max);
        assert!(worst < 0.02 * r, "stadium deviation {worst}");
    }

    #[test]
    fn reptile_is_deterministic_normalized_and_ccw() {
        let spec = ProfileSpec::reptile(4, 0.5, 0.35, 3);
        let a = gen_reptile_profile(&mut rng_from(5), &spec).unwrap();
        let b = gen_reptile_profile(&mut rng_from(5), &spec).unwrap();
        assert_eq!(a, b);
        let dense = a.sample(512);
        let max_r = dense.iter().map(|p| p.norm()).fold(0.0, f64::max);
        assert!((max_r - 1.0).abs() < 0.05);
        assert!(signed_area(&dense) > 0.0);
    }

    #[test]
    fn reptile_rejects_nonpositive_radius() {
        let spec = ProfileSpec::reptile(4, 0.5, 0.0, 3);
        assert!(gen_reptile_profile(&mut rng_from(5), &spec).is_err());
        let spec = ProfileSpec::reptile(4, 0.5, -1.0, 3);
        assert!(gen_reptile_profile(&mut rng_from(5), &spec).is_err());
    }
}
