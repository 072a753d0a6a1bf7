use serde::{Deserialize, Serialize};

use super::knots::KnotVector;
use super::{NurbsError, Result, MAX_DEGREE};
use crate::math::VectorSpace;
use crate::real::Real;

/// Rational B-spline curve with 2D or 3D control points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NurbsCurve<T, P> {
    control_points: Vec<P>,
    weights: Vec<T>,
    knots: KnotVector<T>,
}

impl<T: Real, P: VectorSpace<T>> NurbsCurve<T, P> {
    pub fn new(control_points: Vec<P>, weights: Vec<T>, knots: KnotVector<T>) -> Result<Self> {
        let p = knots.degree();
        if p == 0 || p > MAX_DEGREE {
            return Err(NurbsError::Degree(p));
        }
        if control_points.len() < p + 1 {
            return Err(NurbsError::TooFewControlPoints {
                needed: p + 1,
                got: control_points.len(),
            });
        }
        if weights.len() != control_points.len()
            || weights.iter().any(|w| !(w.is_finite() && *w > T::zero()))
        {
            return Err(NurbsError::Weights);
        }
        if knots.control_count() != control_points.len() {
            return Err(NurbsError::Knots(format!(
                "knot vector expects {} control points, got {}",
                knots.control_count(),
                control_points.len()
            )));
        }
        Ok(Self {
            control_points,
            weights,
            knots,
        })
    }

    /// Clamped open curve with unit weights on the parameter domain `[0, 1]`.
    pub fn open(control_points: Vec<P>, degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(NurbsError::Degree(degree));
        }
        let knots = KnotVector::clamped_uniform(control_points.len(), degree)?;
        let weights = vec![T::one(); control_points.len()];
        Self::new(control_points, weights, knots)
    }

    /// Periodic closed curve with unit weights; its parameter period equals the point count.
    pub fn closed(control_points: Vec<P>, degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(NurbsError::Degree(degree));
        }
        let knots = KnotVector::periodic_uniform(control_points.len(), degree)?;
        let weights = vec![T::one(); control_points.len()];
        Self::new(control_points, weights, knots)
    }

    pub fn control_points(&self) -> &[P] {
        &self.control_points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn knots(&self) -> &KnotVector<T> {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn is_closed(&self) -> bool {
        self.knots.is_periodic()
    }

    pub fn domain(&self) -> (T, T) {
        self.knots.domain()
    }

    /// Control point behind basis function `i` (wraps for closed curves).
    #[inline]
    pub fn control_index(&self, i: usize) -> usize {
        i % self.control_points.len()
    }

    /// Span index and parameter after wrapping closed curves into their domain.
    fn locate(&self, t: T) -> Result<(usize, T)> {
        let t = self.knots.wrap(t);
        Ok((self.knots.find_span(t)?, t))
    }

    pub fn point(&self, t: T) -> Result<P> {
        let (span, t) = self.locate(t)?;
        let basis = self.knots.basis_functions(span, t);
        let p = self.degree();
        let mut num = P::zero();
        let mut den = T::zero();
        for (j, &b) in basis.iter().enumerate().take(p + 1) {
            let idx = self.control_index(span - p + j);
            let wb = self.weights[idx] * b;
            num = num + self.control_points[idx] * wb;
            den = den + wb;
        }
        Ok(num / den)
    }

    /// Point and first derivative with respect to the curve parameter.
    pub fn point_and_tangent(&self, t: T) -> Result<(P, P)> {
        let (span, t) = self.locate(t)?;
        let (basis, dbasis) = self.knots.basis_with_derivatives(span, t);
        let p = self.degree();
        let (mut a, mut da) = (P::zero(), P::zero());
        let (mut w, mut dw) = (T::zero(), T::zero());
        for j in 0..=p {
            let idx = self.control_index(span - p + j);
            let wi = self.weights[idx];
            let cp = self.control_points[idx];
            a = a + cp * (wi * basis[j]);
            da = da + cp * (wi * dbasis[j]);
            w = w + wi * basis[j];
            dw = dw + wi * dbasis[j];
        }
        let point = a / w;
        Ok((point, (da - point * dw) / w))
    }

    /// Evaluates `n` samples; closed curves sample `[start, end)`, open curves `[start, end]`.
    pub fn sample(&self, n: usize) -> Vec<P> {
        let (a, b) = self.domain();
        let denom = if self.is_closed() {
            n
        } else {
            n.saturating_sub(1).max(1)
        };
        (0..n)
            .map(|i| {
                let t = a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(denom);
                self.point(t.min(b))
                    .expect("sample parameter inside domain")
            })
            .collect()
    }

    /// Support interval `[knots[i], knots[i + p + 1])` of basis function `i`.
    pub fn support(&self, i: usize) -> (T, T) {
        let k = self.knots.knots();
        (k[i], k[i + self.degree() + 1])
    }

    pub fn map_points<Q: VectorSpace<T>>(&self, f: impl FnMut(&P) -> Q) -> NurbsCurve<T, Q> {
        NurbsCurve {
            control_points: self.control_points.iter().map(f).collect(),
            weights: self.weights.clone(),
            knots: self.knots.clone(),
        }
    }
}
