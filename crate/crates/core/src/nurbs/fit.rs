use super::curve::NurbsCurve;
use super::knots::KnotVector;
use super::{NurbsError, Result, MAX_DEGREE};
use crate::math::VectorSpace;
use crate::real::Real;

/// Chord-length parameters of a closed polygon, scaled onto `[0, period)`.
pub fn chord_length_parameters<T: Real, P: VectorSpace<T>>(
    samples: &[P],
    period: T,
) -> Result<Vec<T>> {
    let m = samples.len();
    let mut cumulative = Vec::with_capacity(m);
    let mut total = T::zero();
    for j in 0..m {
        cumulative.push(total);
        total = total + (samples[(j + 1) % m] - samples[j]).norm();
    }
    if !(total > T::zero()) || !total.is_finite() {
        return Err(NurbsError::RankDeficient(
            "samples have zero perimeter".into(),
        ));
    }
    Ok(cumulative.into_iter().map(|c| c / total * period).collect())
}

/// Least-squares periodic curve with unit weights through an ordered closed outline.
///
/// Parameters are assigned by chord length in a single pass; the normal
/// equations are solved by Cholesky decomposition.
pub fn fit_closed_curve<T: Real, P: VectorSpace<T>>(
    samples: &[P],
    degree: usize,
    n_ctrl: usize,
) -> Result<NurbsCurve<T, P>> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(NurbsError::Degree(degree));
    }
    if n_ctrl < degree + 1 {
        return Err(NurbsError::TooFewControlPoints {
            needed: degree + 1,
            got: n_ctrl,
        });
    }
    if samples.len() < n_ctrl {
        return Err(NurbsError::Invalid(format!(
            "{} samples cannot determine {n_ctrl} control points",
            samples.len()
        )));
    }
    let knots = KnotVector::<T>::periodic_uniform(n_ctrl, degree)?;
    let params = chord_length_parameters(samples, knots.period())?;

    // normal equations A^T A x = A^T b, with A the (wrapped) basis matrix
    let mut normal = vec![T::zero(); n_ctrl * n_ctrl];
    let mut rhs = vec![P::zero(); n_ctrl];
    for (&t, &q) in params.iter().zip(samples) {
        let t = knots.wrap(t);
        let span = knots.find_span(t)?;
        let basis = knots.basis_functions(span, t);
        for a in 0..=degree {
            let ia = (span - degree + a) % n_ctrl;
            rhs[ia] = rhs[ia] + q * basis[a];
            for b in 0..=degree {
                let ib = (span - degree + b) % n_ctrl;
                normal[ia * n_ctrl + ib] = normal[ia * n_ctrl + ib] + basis[a] * basis[b];
            }
        }
    }
    let factor = cholesky(&normal, n_ctrl)?;
    let control = cholesky_solve(&factor, n_ctrl, &rhs);
    NurbsCurve::closed(control, degree)
}

/// Lower-triangular Cholesky factor of a dense symmetric matrix.
fn cholesky<T: Real>(a: &[T], n: usize) -> Result<Vec<T>> {
    let max_diag = (0..n).map(|i| a[i * n + i]).fold(T::zero(), T::max);
    let floor = max_diag * T::lit(1e-12);
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > floor) {
                    return Err(NurbsError::RankDeficient(format!("pivot {i} vanishes")));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

fn cholesky_solve<T: Real, P: VectorSpace<T>>(l: &[T], n: usize, b: &[P]) -> Vec<P> {
    let mut y = vec![P::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - y[k] * l[i * n + k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![P::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - x[k] * l[k * n + i];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{vec2, Vec2};

    fn circle(n: usize) -> Vec<Vec2<f64>> {
        (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                vec2(a.cos(), a.sin())
            })
            .collect()
    }

    #[test]
    fn circle_fit_radial_deviation() {
        let c = fit_closed_curve(&circle(128), 3, 16).unwrap();
        let worst = c
            .sample(4096)
            .iter()
            .map(|p| (p.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-3, "max radial deviation {worst}");
    }

    #[test]
    fn polygon_is_exact_in_degree_one() {
        // a square with evenly spaced samples on each edge
        let corners = [
            vec2(0.0, 0.0),
            vec2(1.0, 0.0),
            vec2(1.0, 1.0),
            vec2(0.0, 1.0),
        ];
        let mut samples = Vec::new();
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            for k in 0..8 {
                samples.push(a + (b - a) * (k as f64 / 8.0));
            }
        }
        let c = fit_closed_curve(&samples, 1, 4).unwrap();
        let params = chord_length_parameters(&samples, 4.0).unwrap();
        let residual = params
            .iter()
            .zip(&samples)
            .map(|(&t, q)| (c.point(t).unwrap() - *q).norm())
            .fold(0.0, f64::max);
        assert!(residual < 1e-9, "residual {residual}");
    }

    #[test]
    fn too_few_control_points() {
        assert_eq!(
            fit_closed_curve(&circle(32), 3, 3).unwrap_err(),
            NurbsError::TooFewControlPoints { needed: 4, got: 3 }
        );
    }

    #[test]
    fn coincident_samples_are_rank_deficient() {
        let mut s = vec![vec2(0.0, 0.0); 30];
        s.extend([vec2(1.0, 0.0), vec2(1.0, 1.0)]);
        assert!(matches!(
            fit_closed_curve(&s, 3, 12),
            Err(NurbsError::RankDeficient(_))
        ));
        let flat = vec![vec2(0.5, 0.5); 40];
        assert!(matches!(
            fit_closed_curve(&flat, 2, 8),
            Err(NurbsError::RankDeficient(_))
        ));
    }
}
