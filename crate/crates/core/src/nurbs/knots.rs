use serde::{Deserialize, Serialize};

use super::{NurbsError, Result};
use crate::real::Real;

/// Highest supported spline degree.
pub const MAX_DEGREE: usize = 3;

/// Basis values for one span; only the first `degree + 1` entries are used.
pub type BasisValues<T> = [T; MAX_DEGREE + 1];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotVector<T> {
    knots: Vec<T>,
    degree: usize,
    periodic: bool,
}

impl<T: Real> KnotVector<T> {
    pub fn new(knots: Vec<T>, degree: usize, periodic: bool) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(NurbsError::Degree(degree));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(NurbsError::Knots("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(NurbsError::Knots("knots must be non-decreasing".into()));
        }
        let p = degree;
        let min_len = if periodic { 3 * p + 2 } else { 2 * p + 2 };
        if knots.len() < min_len {
            return Err(NurbsError::Knots(format!(
                "{} knots is too few for degree {p}",
                knots.len()
            )));
        }
        let len = knots.len();
        if periodic {
            let n = len - 2 * p - 1;
            let period = knots[n] - knots[0];
            let tol = T::lit(1e-9) * (T::one() + period.abs());
            if period <= T::zero() {
                return Err(NurbsError::Knots(
                    "periodic knot vector is degenerate".into(),
                ));
            }
            for i in 0..=2 * p {
                if ((knots[i + n] - knots[i]) - period).abs() > tol {
                    return Err(NurbsError::Knots(format!(
                        "wrap condition fails at knot {i}"
                    )));
                }
            }
        } else {
            let first = knots[0];
            let last = knots[len - 1];
            if knots[..=p].iter().any(|&k| k != first)
                || knots[len - 1 - p..].iter().any(|&k| k != last)
            {
                return Err(NurbsError::Knots(format!(
                    "clamped knot vector must repeat end knots {} times",
                    p + 1
                )));
            }
            if last <= first {
                return Err(NurbsError::Knots("empty parameter domain".into()));
            }
        }
        Ok(Self {
            knots,
            degree,
            periodic,
        })
    }

    /// Clamped uniform knots on `[0, 1]` for `n_ctrl` control points.
    pub fn clamped_uniform(n_ctrl: usize, degree: usize) -> Result<Self> {
        if n_ctrl < degree + 1 {
            return Err(NurbsError::TooFewControlPoints {
                needed: degree + 1,
                got: n_ctrl,
            });
        }
        let spans = n_ctrl - degree;
        let inv = T::one() / T::from_usize_lossy(spans);
        let mut knots = Vec::with_capacity(n_ctrl + degree + 1);
        knots.extend(std::iter::repeat_n(T::zero(), degree + 1));
        knots.extend((1..spans).map(|i| T::from_usize_lossy(i) * inv));
        knots.extend(std::iter::repeat_n(T::one(), degree + 1));
        Self::new(knots, degree, false)
    }

    /// Uniform periodic knots with unit spacing; the domain is `[0, n_ctrl]`.
    pub fn periodic_uniform(n_ctrl: usize, degree: usize) -> Result<Self> {
        if n_ctrl < degree + 1 {
            return Err(NurbsError::TooFewControlPoints {
                needed: degree + 1,
                got: n_ctrl,
            });
        }
        let p = degree as i64;
        let knots = (0..(n_ctrl + 2 * degree + 1) as i64)
            .map(|i| T::lit((i - p) as f64))
            .collect();
        Self::new(knots, degree, true)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Number of basis functions (for periodic vectors this includes the wrapped ones).
    pub fn basis_count(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Number of distinct control points this knot vector expects.
    pub fn control_count(&self) -> usize {
        if self.periodic {
            self.knots.len() - 2 * self.degree - 1
        } else {
            self.basis_count()
        }
    }

    pub fn domain(&self) -> (T, T) {
        (
            self.knots[self.degree],
            self.knots[self.knots.len() - 1 - self.degree],
        )
    }

    pub fn period(&self) -> T {
        let (a, b) = self.domain();
        b - a
    }

    /// Maps `t` into the base domain of a periodic vector; identity when clamped.
    pub fn wrap(&self, t: T) -> T {
        if !self.periodic {
            return t;
        }
        let (a, b) = self.domain();
        let period = b - a;
        let offset = t - a;
        let w = offset - (offset / period).floor() * period + a;
        // the floor-based remainder can round up to exactly the period
        if w >= b || w < a {
            a
        } else {
            w
        }
    }

    /// Index `i` with `knots[i] <= t < knots[i + 1]`; the domain end belongs to the last span.
    pub fn find_span(&self, t: T) -> Result<usize> {
        let (a, b) = self.domain();
        if !(t >= a && t <= b) {
            return Err(NurbsError::Domain {
                t: t.as_f64(),
                start: a.as_f64(),
                end: b.as_f64(),
            });
        }
        let last = self.knots.len() - self.degree - 2;
        if t == b {
            let mut i = last;
            while i > self.degree && self.knots[i] >= self.knots[i + 1] {
                i -= 1;
            }
            return Ok(i);
        }
        let upper = self.knots.partition_point(|&k| k <= t);
        Ok((upper - 1).clamp(self.degree, last))
    }

    /// Nonzero basis values `N[span-p..=span](t)`.
    pub fn basis_functions(&self, span: usize, t: T) -> BasisValues<T> {
        let p = self.degree;
        let k = &self.knots;
        let mut n = [T::zero(); MAX_DEGREE + 1];
        let mut left = [T::zero(); MAX_DEGREE + 1];
        let mut right = [T::zero(); MAX_DEGREE + 1];
        n[0] = T::one();
        for j in 1..=p {
            left[j] = t - k[span + 1 - j];
            right[j] = k[span + j] - t;
            let mut saved = T::zero();
            for r in 0..j {
                let temp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        n
    }

    /// Basis values and their first derivatives on `span`.
    pub fn basis_with_derivatives(&self, span: usize, t: T) -> (BasisValues<T>, BasisValues<T>) {
        let p = self.degree;
        let k = &self.knots;
        // ndu[j][r]: basis values in the upper triangle, knot differences in the lower
        let mut ndu = [[T::zero(); MAX_DEGREE + 1]; MAX_DEGREE + 1];
        let mut left = [T::zero(); MAX_DEGREE + 1];
        let mut right = [T::zero(); MAX_DEGREE + 1];
        ndu[0][0] = T::one();
        for j in 1..=p {
            left[j] = t - k[span + 1 - j];
            right[j] = k[span + j] - t;
            let mut saved = T::zero();
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let mut values = [T::zero(); MAX_DEGREE + 1];
        let mut derivs = [T::zero(); MAX_DEGREE + 1];
        let pf = T::from_usize_lossy(p);
        for r in 0..=p {
            values[r] = ndu[r][p];
            let mut d = T::zero();
            if r >= 1 {
                d = d + ndu[r - 1][p - 1] / ndu[p][r - 1];
            }
            if r < p {
                d = d - ndu[r][p - 1] / ndu[p][r];
            }
            derivs[r] = d * pf;
        }
        (values, derivs)
    }
}
