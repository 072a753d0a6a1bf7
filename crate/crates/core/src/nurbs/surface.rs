use serde::{Deserialize, Serialize};

use super::knots::KnotVector;
use super::{NurbsError, Result, MAX_DEGREE};
use crate::math::Vec3;
use crate::real::Real;

/// Tensor-product rational surface. The control net is stored row-major with
/// `u` as the slow index: entry `(i, j)` lives at `i * count_v + j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NurbsSurface<T> {
    control_net: Vec<Vec3<T>>,
    weights: Vec<T>,
    count_u: usize,
    count_v: usize,
    knots_u: KnotVector<T>,
    knots_v: KnotVector<T>,
}

/// Point, partial derivatives and unit normal at a surface parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceDerivatives<T> {
    pub point: Vec3<T>,
    pub tangent_u: Vec3<T>,
    pub tangent_v: Vec3<T>,
    /// `None` when the tangents are parallel (degenerate parameterization).
    pub normal: Option<Vec3<T>>,
}

impl<T: Real> NurbsSurface<T> {
    pub fn new(
        control_net: Vec<Vec3<T>>,
        weights: Vec<T>,
        count_u: usize,
        count_v: usize,
        knots_u: KnotVector<T>,
        knots_v: KnotVector<T>,
    ) -> Result<Self> {
        for p in [knots_u.degree(), knots_v.degree()] {
            if p == 0 || p > MAX_DEGREE {
                return Err(NurbsError::Degree(p));
            }
        }
        if control_net.len() != count_u * count_v || weights.len() != control_net.len() {
            return Err(NurbsError::Invalid(format!(
                "control net of {} points does not match {count_u}x{count_v}",
                control_net.len()
            )));
        }
        if count_u < knots_u.degree() + 1 || count_v < knots_v.degree() + 1 {
            return Err(NurbsError::TooFewControlPoints {
                needed: (knots_u.degree() + 1) * (knots_v.degree() + 1),
                got: control_net.len(),
            });
        }
        if knots_u.control_count() != count_u || knots_v.control_count() != count_v {
            return Err(NurbsError::Knots(
                "knot vectors do not match control net".into(),
            ));
        }
        if knots_v.is_periodic() {
            return Err(NurbsError::Knots(
                "only the u direction may be periodic".into(),
            ));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > T::zero())) {
            return Err(NurbsError::Weights);
        }
        Ok(Self {
            control_net,
            weights,
            count_u,
            count_v,
            knots_u,
            knots_v,
        })
    }

    pub fn count_u(&self) -> usize {
        self.count_u
    }

    pub fn count_v(&self) -> usize {
        self.count_v
    }

    pub fn control_point(&self, i: usize, j: usize) -> Vec3<T> {
        self.control_net[i * self.count_v + j]
    }

    pub fn control_net(&self) -> &[Vec3<T>] {
        &self.control_net
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn knots_u(&self) -> &KnotVector<T> {
        &self.knots_u
    }

    pub fn knots_v(&self) -> &KnotVector<T> {
        &self.knots_v
    }

    pub fn degree_u(&self) -> usize {
        self.knots_u.degree()
    }

    pub fn degree_v(&self) -> usize {
        self.knots_v.degree()
    }

    pub fn is_closed_u(&self) -> bool {
        self.knots_u.is_periodic()
    }

    pub fn domain_u(&self) -> (T, T) {
        self.knots_u.domain()
    }

    pub fn domain_v(&self) -> (T, T) {
        self.knots_v.domain()
    }

    fn locate(&self, u: T, v: T) -> Result<(usize, T, usize, T)> {
        let u = self.knots_u.wrap(u);
        Ok((self.knots_u.find_span(u)?, u, self.knots_v.find_span(v)?, v))
    }

    #[allow(clippy::needless_range_loop, clippy::assign_op_pattern)]
    pub fn point(&self, u: T, v: T) -> Result<Vec3<T>> {
        let (su, u, sv, v) = self.locate(u, v)?;
        let bu = self.knots_u.basis_functions(su, u);
        let bv = self.knots_v.basis_functions(sv, v);
        let (pu, pv) = (self.degree_u(), self.degree_v());
        let mut num = Vec3::splat(T::zero());
        let mut den = T::zero();
        for a in 0..=pu {
            let i = (su - pu + a) % self.count_u;
            for b in 0..=pv {
                let idx = i * self.count_v + (sv - pv + b);
                let w = self.weights[idx] * bu[a] * bv[b];
                num += self.control_net[idx] * w;
                den = den + w;
            }
        }
        Ok(num / den)
    }

    /// First partial derivatives via the quotient rule on homogeneous sums.
    pub fn derivatives(&self, u: T, v: T) -> Result<SurfaceDerivatives<T>> {
        let (su, u, sv, v) = self.locate(u, v)?;
        let (bu, dbu) = self.knots_u.basis_with_derivatives(su, u);
        let (bv, dbv) = self.knots_v.basis_with_derivatives(sv, v);
        let (pu, pv) = (self.degree_u(), self.degree_v());
        let zero = Vec3::splat(T::zero());
        let (mut a, mut au, mut av) = (zero, zero, zero);
        let (mut w, mut wu, mut wv) = (T::zero(), T::zero(), T::zero());
        for i in 0..=pu {
            let ci = (su - pu + i) % self.count_u;
            for j in 0..=pv {
                let idx = ci * self.count_v + (sv - pv + j);
                let wt = self.weights[idx];
                let cp = self.control_net[idx];
                let n = wt * bu[i] * bv[j];
                let nu = wt * dbu[i] * bv[j];
                let nv = wt * bu[i] * dbv[j];
                a += cp * n;
                au += cp * nu;
                av += cp * nv;
                w = w + n;
                wu = wu + nu;
                wv = wv + nv;
            }
        }
        let point = a / w;
        let tangent_u = (au - point * wu) / w;
        let tangent_v = (av - point * wv) / w;
        let cross = tangent_u.cross(tangent_v);
        let scale = tangent_u.norm() * tangent_v.norm();
        let normal = if scale > T::zero() && cross.norm() > T::lit(1e-10) * scale {
            Some(cross.normalized())
        } else {
            None
        };
        Ok(SurfaceDerivatives {
            point,
            tangent_u,
            tangent_v,
            normal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::vec3;

    fn bilinear() -> NurbsSurface<f64> {
        let net = vec![
            vec3(0.0, 0.0, 0.0),
            vec3(0.0, 1.0, 0.0),
            vec3(2.0, 0.0, 0.0),
            vec3(2.0, 1.0, 1.0),
        ];
        NurbsSurface::new(
            net,
            vec![1.0; 4],
            2,
            2,
            KnotVector::clamped_uniform(2, 1).unwrap(),
            KnotVector::clamped_uniform(2, 1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn bilinear_patch_center() {
        let s = bilinear();
        assert_eq!(s.point(0.5, 0.5).unwrap(), vec3(1.0, 0.5, 0.25));
    }

    #[test]
    fn planar_patch_normal() {
        let mut net = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                net.push(vec3(i as f64 + 0.1 * j as f64, j as f64 * 0.7, 2.0));
            }
        }
        let s = NurbsSurface::new(
            net,
            vec![1.0; 12],
            4,
            3,
            KnotVector::clamped_uniform(4, 3).unwrap(),
            KnotVector::clamped_uniform(3, 2).unwrap(),
        )
        .unwrap();
        for &(u, v) in &[(0.0, 0.0), (0.3, 0.8), (1.0, 1.0), (0.5, 0.5)] {
            let d = s.derivatives(u, v).unwrap();
            let n = d.normal.unwrap();
            assert!((n - vec3(0.0, 0.0, 1.0)).norm() < 1e-12);
            assert!((n.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pinched_point_flags_normal() {
        // every control point in the first column collapses to the origin
        let mut net = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                let a = i as f64 * std::f64::consts::FRAC_PI_2;
                let r = j as f64;
                net.push(vec3(r * a.cos(), r * a.sin(), j as f64));
            }
        }
        let s = NurbsSurface::new(
            net,
            vec![1.0; 12],
            4,
            3,
            KnotVector::periodic_uniform(4, 2).unwrap(),
            KnotVector::clamped_uniform(3, 2).unwrap(),
        )
        .unwrap();
        assert!(s.derivatives(0.3, 0.0).unwrap().normal.is_none());
        assert!(s.derivatives(0.3, 0.5).unwrap().normal.is_some());
    }

    #[test]
    fn rejects_periodic_v() {
        let net = vec![vec3(0.0, 0.0, 0.0); 12];
        let r = NurbsSurface::new(
            net,
            vec![1.0; 12],
            3,
            4,
            KnotVector::clamped_uniform(3, 2).unwrap(),
            KnotVector::periodic_uniform(4, 1).unwrap(),
        );
        assert!(r.is_err());
    }
}
