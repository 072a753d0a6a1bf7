use super::{Result, ShapeError};
use crate::math::Vec2;
use crate::nurbs::NurbsCurve;
use crate::real::Real;

/// Closed counter-clockwise outline at constant distance `radius` around an open 2D curve.
///
/// The spine is sampled at `n_samples` parameters; the outline runs along the
/// right-hand offset, around a semicircular cap at the far end, back along the
/// left-hand offset and around a cap at the start. Local loops from tight
/// turns are cut at their crossing points, and samples that end up closer
/// than `radius` to the spine are discarded.
pub fn offset_outline<T: Real>(
    curve: &NurbsCurve<T, Vec2<T>>,
    radius: T,
    n_samples: usize,
) -> Result<Vec<Vec2<T>>> {
    if !(radius > T::zero()) {
        return Err(ShapeError::Invalid(format!(
            "offset radius must be positive, got {radius}"
        )));
    }
    if n_samples < 8 {
        return Err(ShapeError::Invalid(
            "offset outline needs at least 8 samples".into(),
        ));
    }
    let mut spine = curve.sample(n_samples);
    spine.dedup_by(|a, b| (*a - *b).norm() <= T::epsilon());
    let length: T = spine
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .fold(T::zero(), |a, b| a + b);
    if spine.len() < 2 || !(length > T::lit(1e-9)) {
        return Err(ShapeError::Invalid(
            "spine curve is too short to offset".into(),
        ));
    }
    let tangents: Vec<Vec2<T>> = (0..spine.len())
        .map(|i| {
            let a = spine[i.saturating_sub(1)];
            let b = spine[(i + 1).min(spine.len() - 1)];
            (b - a).normalized()
        })
        .collect();
    let cap_points = (n_samples / 4).max(8);
    let mut outline = Vec::with_capacity(2 * spine.len() + 2 * cap_points);
    for (p, t) in spine.iter().zip(&tangents) {
        outline.push(*p - t.perp() * radius);
    }
    push_cap(
        &mut outline,
        *spine.last().unwrap(),
        *tangents.last().unwrap(),
        radius,
        cap_points,
    );
    for (p, t) in spine.iter().zip(&tangents).rev() {
        outline.push(*p + t.perp() * radius);
    }
    push_cap(&mut outline, spine[0], -tangents[0], radius, cap_points);

    let mut outline = prune_local_loops(outline);
    let floor = radius - T::lit(1e-6);
    outline.retain(|q| distance_to_polyline(*q, &spine) >= floor);
    if outline.len() < 3 {
        return Err(ShapeError::Invalid("offset outline collapsed".into()));
    }
    if signed_area(&outline) < T::zero() {
        outline.reverse();
    }
    Ok(outline)
}

/// Interior points of a counter-clockwise half circle around `center` that starts
/// on the right of `forward` and ends on its left.
fn push_cap<T: Real>(
    out: &mut Vec<Vec2<T>>,
    center: Vec2<T>,
    forward: Vec2<T>,
    radius: T,
    n: usize,
) {
    let right = -forward.perp();
    for k in 1..=n {
        let phi = T::PI() * T::from_usize_lossy(k) / T::from_usize_lossy(n + 1);
        out.push(center + (right * phi.cos() + forward * phi.sin()) * radius);
    }
}

pub fn signed_area<T: Real>(poly: &[Vec2<T>]) -> T {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].perp_dot(poly[(i + 1) % n]))
        .fold(T::zero(), |a, b| a + b)
        * T::lit(0.5)
}

pub fn perimeter<T: Real>(poly: &[Vec2<T>]) -> T {
    let n = poly.len();
    (0..n)
        .map(|i| (poly[(i + 1) % n] - poly[i]).norm())
        .fold(T::zero(), |a, b| a + b)
}

pub fn distance_to_segment<T: Real>(q: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > T::zero() {
        ((q - a).dot(ab) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    (q - (a + ab * t)).norm()
}

pub fn distance_to_polyline<T: Real>(q: Vec2<T>, line: &[Vec2<T>]) -> T {
    if line.len() == 1 {
        return (q - line[0]).norm();
    }
    line.windows(2)
        .map(|w| distance_to_segment(q, w[0], w[1]))
        .fold(T::infinity(), T::min)
}

/// Proper crossing point of segments `ab` and `cd`, if any.
pub fn segment_intersection<T: Real>(
    a: Vec2<T>,
    b: Vec2<T>,
    c: Vec2<T>,
    d: Vec2<T>,
) -> Option<Vec2<T>> {
    let r = b - a;
    let s = d - c;
    let denom = r.perp_dot(s);
    if denom == T::zero() {
        return None;
    }
    let t = (c - a).perp_dot(s) / denom;
    let u = (c - a).perp_dot(r) / denom;
    let (lo, hi) = (T::zero(), T::one());
    if t > lo && t < hi && u > lo && u < hi {
        Some(a + r * t)
    } else {
        None
    }
}

/// Cuts loops spanning less than half the polygon by joining at the crossing point.
fn prune_local_loops<T: Real>(poly: Vec<Vec2<T>>) -> Vec<Vec2<T>> {
    let n = poly.len();
    let window = n / 2;
    let mut out: Vec<Vec2<T>> = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        out.push(poly[i]);
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let mut cut = None;
        for j in (i + 2..(i + window).min(n)).rev() {
            if (j + 1) % n == i {
                continue;
            }
            if let Some(x) = segment_intersection(a, b, poly[j], poly[(j + 1) % n]) {
                cut = Some((j, x));
                break;
            }
        }
        match cut {
            Some((j, x)) => {
                out.push(x);
                i = j + 1;
            }
            None => i += 1,
        }
    }
    out
}

/// True if no two non-adjacent edges of the closed polygon cross.
pub fn is_simple_polygon<T: Real>(poly: &[Vec2<T>]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segment_intersection(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])
                .is_some()
            {
                return false;
            }
        }
    }
    true
}

/// Resamples a closed polygon at `n` points evenly spaced in arc length.
pub fn resample_closed<T: Real>(poly: &[Vec2<T>], n: usize) -> Vec<Vec2<T>> {
    let m = poly.len();
    let total = perimeter(poly);
    let step = total / T::from_usize_lossy(n);
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    let mut seg_start = T::zero();
    for k in 0..n {
        let target = step * T::from_usize_lossy(k);
        loop {
            let len = (poly[(seg + 1) % m] - poly[seg]).norm();
            if seg_start + len >= target || seg + 1 >= m {
                let t = if len > T::zero() {
                    ((target - seg_start) / len).min(T::one())
                } else {
                    T::zero()
                };
                out.push(poly[seg] + (poly[(seg + 1) % m] - poly[seg]) * t);
                break;
            }
            seg_start = seg_start + len;
            seg += 1;
        }
    }
    out
}

/// Signed distance-like error of `q` from the stadium around segment `ab`.
pub fn stadium_deviation<T: Real>(q: Vec2<T>, a: Vec2<T>, b: Vec2<T>, radius: T) -> T {
    (distance_to_segment(q, a, b) - radius).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::vec2;

    fn segment(len: f64) -> NurbsCurve<f64, Vec2<f64>> {
        NurbsCurve::open(vec![vec2(0.0, 0.0), vec2(len, 0.0)], 1).unwrap()
    }

    #[test]
    fn straight_segment_gives_stadium() {
        let (l, r) = (2.0, 0.5);
        let outline = offset_outline(&segment(l), r, 256).unwrap();
        let expected = 2.0 * l + std::f64::consts::TAU * r;
        let p = perimeter(&outline);
        assert!(
            (p - expected).abs() / expected < 0.01,
            "perimeter {p} vs {expected}"
        );
        assert!(signed_area(&outline) > 0.0);
        assert!(is_simple_polygon(&outline));
    }

    #[test]
    fn outline_keeps_clearance() {
        let spine = NurbsCurve::open(
            vec![
                vec2(0.0, 0.0),
                vec2(1.0, 0.0),
                vec2(1.0, 0.3),
                vec2(0.2, 0.35),
                vec2(0.4, 1.0),
            ],
            2,
        )
        .unwrap();
        let r = 0.2;
        let outline = offset_outline(&spine, r, 128).unwrap();
        let dense = spine.sample(128);
        for q in &outline {
            assert!(distance_to_polyline(*q, &dense) >= r - 1e-6);
        }
        assert!(signed_area(&outline) > 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(offset_outline(&segment(1.0), 0.0, 64).is_err());
        assert!(offset_outline(&segment(1.0), 0.1, 4).is_err());
        let dot = NurbsCurve::open(vec![vec2(1.0, 1.0), vec2(1.0, 1.0)], 1).unwrap();
        assert!(offset_outline(&dot, 0.1, 64).is_err());
    }

    #[test]
    fn resample_is_even() {
        let sq = vec![
            vec2(0.0, 0.0),
            vec2(1.0, 0.0),
            vec2(1.0, 1.0),
            vec2(0.0, 1.0),
        ];
        let r = resample_closed(&sq, 8);
        assert_eq!(r.len(), 8);
        assert!((r[1] - vec2(0.5, 0.0)).norm() < 1e-12);
        assert!((r[5] - vec2(0.5, 1.0)).norm() < 1e-12);
    }
}
