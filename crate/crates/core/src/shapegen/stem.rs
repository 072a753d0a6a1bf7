use rand::Rng;
use serde::{Deserialize, Serialize};

use super::profile::gaussian;
use super::{Result, ShapeError};
use crate::math::{vec3, Vec3};
use crate::nurbs::{NurbsCurve, MAX_DEGREE};
use crate::real::Real;

pub type Stem<T> = NurbsCurve<T, Vec3<T>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StemSpec<T> {
    /// Number of control points along the walk.
    pub n_steps: usize,
    /// Length of every walk step.
    pub step_sigma: T,
    /// Spread of the Gaussian added to the previous direction before renormalizing.
    pub turn_sigma: T,
    pub degree: usize,
}

impl<T: Real> StemSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(ShapeError::Invalid("stem needs at least 2 points".into()));
        }
        if self.degree == 0 || self.degree > MAX_DEGREE {
            return Err(ShapeError::Invalid(format!(
                "stem degree {} outside [1, 3]",
                self.degree
            )));
        }
        if !(self.step_sigma > T::zero()) || !(self.turn_sigma >= T::zero()) {
            return Err(ShapeError::Invalid("stem step must be positive".into()));
        }
        Ok(())
    }
}

fn random_direction<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Vec3<T> {
    loop {
        let g = vec3(gaussian::<T, _>(rng), gaussian(rng), gaussian(rng));
        if let Some(d) = g.try_normalized(T::lit(1e-6)) {
            return d;
        }
    }
}

/// Persistent 3D random walk from the origin, as a clamped open curve.
///
/// The degree is lowered to `n_steps - 1` when there are too few points.
pub fn gen_stem<T: Real, R: Rng + ?Sized>(rng: &mut R, spec: &StemSpec<T>) -> Result<Stem<T>> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.n_steps);
    let mut p = Vec3::splat(T::zero());
    let mut dir = random_direction::<T, R>(rng);
    points.push(p);
    for _ in 1..spec.n_steps {
        let g = vec3(gaussian::<T, _>(rng), gaussian(rng), gaussian(rng)) * spec.turn_sigma;
        dir = (dir + g).try_normalized(T::lit(1e-9)).unwrap_or(dir);
        p += dir * spec.step_sigma;
        points.push(p);
    }
    let degree = spec.degree.min(spec.n_steps - 1);
    Ok(NurbsCurve::open(points, degree)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

    fn spec(n: usize) -> StemSpec<f64> {
        StemSpec {
            n_steps: n,
            step_sigma: 0.5,
            turn_sigma: 0.6,
            degree: 3,
        }
    }

    #[test]
    fn two_steps_is_a_segment() {
        let s = gen_stem(&mut rng_from(3), &spec(2)).unwrap();
        assert_eq!(s.degree(), 1);
        let a = s.point(0.0).unwrap();
        let b = s.point(1.0).unwrap();
        let mid = s.point(0.5).unwrap();
        assert!((mid - (a + b) * 0.5).norm() < 1e-12);
        assert!(((b - a).norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            gen_stem(&mut rng_from(8), &spec(6)).unwrap(),
            gen_stem(&mut rng_from(8), &spec(6)).unwrap()
        );
    }

    #[test]
    fn rejects_short_walks() {
        assert!(gen_stem(&mut rng_from(0), &spec(1)).is_err());
    }
}
