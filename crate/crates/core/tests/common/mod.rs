//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use procmvs::math::{vec3, Vec2, Vec3};
use procmvs::nurbs::{KnotVector, NurbsCurve, NurbsSurface};
use procmvs::render::Ray;
use rand::Rng;

/// Recursive Cox-de Boor basis `N_{i,p}(t)` over the full knot sequence,
/// with the final non-empty span closed on the right at `end`.
pub fn cox_de_boor(knots: &[f64], i: usize, p: usize, t: f64, end: f64) -> f64 {
    if p == 0 {
        let (a, b) = (knots[i], knots[i + 1]);
        return if (a <= t && t < b) || (t == end && a < b && b == end) {
            1.0
        } else {
            0.0
        };
    }
    let mut value = 0.0;
    let d1 = knots[i + p] - knots[i];
    if d1 > 0.0 {
        value += (t - knots[i]) / d1 * cox_de_boor(knots, i, p - 1, t, end);
    }
    let d2 = knots[i + p + 1] - knots[i + 1];
    if d2 > 0.0 {
        value += (knots[i + p + 1] - t) / d2 * cox_de_boor(knots, i + 1, p - 1, t, end);
    }
    value
}

/// All basis values at `t`; periodic bases are returned unwrapped.
pub fn oracle_basis(kv: &KnotVector<f64>, t: f64) -> Vec<f64> {
    let k = kv.knots();
    let p = kv.degree();
    let (_, end) = kv.domain();
    (0..k.len() - p - 1)
        .map(|i| cox_de_boor(k, i, p, t, end))
        .collect()
}

pub fn oracle_curve2(curve: &NurbsCurve<f64, Vec2<f64>>, t: f64) -> Vec2<f64> {
    let basis = oracle_basis(curve.knots(), t);
    let n = curve.control_points().len();
    let (mut num, mut den) = (Vec2 { x: 0.0, y: 0.0 }, 0.0);
    for (i, b) in basis.iter().enumerate() {
        let w = curve.weights()[i % n] * b;
        num += curve.control_points()[i % n] * w;
        den += w;
    }
    num / den
}

pub fn oracle_surface(s: &NurbsSurface<f64>, u: f64, v: f64) -> Vec3<f64> {
    let bu = oracle_basis(s.knots_u(), u);
    let bv = oracle_basis(s.knots_v(), v);
    let (nu, nv) = (s.count_u(), s.count_v());
    let (mut num, mut den) = (Vec3::splat(0.0), 0.0);
    for (i, a) in bu.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        for (j, b) in bv.iter().enumerate() {
            let idx = (i % nu) * nv + j;
            let w = s.weights()[idx] * a * b;
            num += s.control_net()[idx] * w;
            den += w;
        }
    }
    num / den
}

/// Clamped knots on `[0, 1]` with random interior knots (multiplicity up to `p`).
pub fn random_clamped_knots<R: Rng>(rng: &mut R, n_ctrl: usize, p: usize) -> KnotVector<f64> {
    let interior = n_ctrl - p - 1;
    let mut inner: Vec<f64> = Vec::with_capacity(interior);
    while inner.len() < interior {
        let k = rng.random_range(0.02..0.98);
        let mult = rng.random_range(1..=p.min(interior - inner.len()));
        inner.extend(std::iter::repeat_n(k, mult));
    }
    inner.sort_by(f64::total_cmp);
    let mut knots = vec![0.0; p + 1];
    knots.extend(inner);
    knots.extend(vec![1.0; p + 1]);
    KnotVector::new(knots, p, false).unwrap()
}

/// Periodic knots whose spacings repeat with period `n_ctrl`; knot `p` sits at 0.
pub fn random_periodic_knots<R: Rng>(rng: &mut R, n_ctrl: usize, p: usize) -> KnotVector<f64> {
    let gaps: Vec<f64> = (0..n_ctrl).map(|_| rng.random_range(0.3..1.7)).collect();
    let gap = |m: usize| gaps[(m + n_ctrl * p - p) % n_ctrl];
    let mut knots = vec![-(0..p).map(gap).sum::<f64>()];
    for m in 0..n_ctrl + 2 * p {
        knots.push(knots[m] + gap(m));
    }
    KnotVector::new(knots, p, true).unwrap()
}

pub fn random_point3<R: Rng>(rng: &mut R) -> Vec3<f64> {
    vec3(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..2.0)).collect()
}

pub fn random_surface<R: Rng>(
    rng: &mut R,
    pu: usize,
    pv: usize,
    periodic_u: bool,
) -> NurbsSurface<f64> {
    let nu = rng.random_range(pu + 1..=9);
    let nv = rng.random_range(pv + 1..=9);
    let ku = if periodic_u {
        random_periodic_knots(rng, nu, pu)
    } else {
        random_clamped_knots(rng, nu, pu)
    };
    let kv = random_clamped_knots(rng, nv, pv);
    let net = (0..nu * nv).map(|_| random_point3(rng)).collect();
    NurbsSurface::new(net, random_weights(rng, nu * nv), nu, nv, ku, kv).unwrap()
}

/// Plane intersection followed by a same-side edge test; shares no code with the crate.
pub fn brute_force_triangle(ray: &Ray, [a, b, c]: [Vec3<f64>; 3], t_min: f64) -> Option<f64> {
    let n = (b - a).cross(c - a);
    let denom = n.dot(ray.dir);
    if denom == 0.0 {
        return None;
    }
    let t = n.dot(a - ray.origin) / denom;
    if t.is_nan() || t <= t_min {
        return None;
    }
    let q = ray.at(t);
    let inside = [(a, b), (b, c), (c, a)]
        .iter()
        .all(|&(u, v)| (v - u).cross(q - u).dot(n) >= 0.0);
    inside.then_some(t)
}

pub fn brute_force_nearest(ray: &Ray, tris: &[[Vec3<f64>; 3]], t_min: f64) -> Option<f64> {
    tris.iter()
        .filter_map(|&tri| brute_force_triangle(ray, tri, t_min))
        .min_by(f64::total_cmp)
}

/// Smallest positive `t` with `|origin + t dir - center| = radius`.
pub fn ray_sphere(ray: &Ray, center: Vec3<f64>, radius: f64) -> Option<f64> {
    let oc = ray.origin - center;
    let a = ray.dir.dot(ray.dir);
    let b = oc.dot(ray.dir);
    let c = oc.dot(oc) - radius * radius;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    [(-b - s) / a, (-b + s) / a].into_iter().find(|t| *t > 0.0)
}
