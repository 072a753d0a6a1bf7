//! Small fixed-size linear algebra over a generic [`Real`] scalar.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Operations a control point type must support for spline evaluation.
pub trait VectorSpace<T: Real>:
    Copy
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<T, Output = Self>
    + Div<T, Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    const DIM: usize;

    fn zero() -> Self;
    fn dot(self, other: Self) -> T;
    fn coord(self, axis: usize) -> T;
    fn from_fn(f: impl FnMut(usize) -> T) -> Self;

    #[inline]
    fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    fn norm(self) -> T {
        self.norm_squared().sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

#[inline]
pub fn vec2<T>(x: T, y: T) -> Vec2<T> {
    Vec2 { x, y }
}

#[inline]
pub fn vec3<T>(x: T, y: T, z: T) -> Vec3<T> {
    Vec3 { x, y, z }
}

macro_rules! impl_vector_ops {
    ($name:ident { $($field:ident),+ }) => {
        impl<T: Real> Add for $name<T> {
            type Output = Self;
            #[inline]
            fn add(self, o: Self) -> Self {
                $name { $($field: self.$field + o.$field),+ }
            }
        }
        impl<T: Real> Sub for $name<T> {
            type Output = Self;
            #[inline]
            fn sub(self, o: Self) -> Self {
                $name { $($field: self.$field - o.$field),+ }
            }
        }
        impl<T: Real> Mul<T> for $name<T> {
            type Output = Self;
            #[inline]
            fn mul(self, s: T) -> Self {
                $name { $($field: self.$field * s),+ }
            }
        }
        impl<T: Real> Div<T> for $name<T> {
            type Output = Self;
            #[inline]
            fn div(self, s: T) -> Self {
                $name { $($field: self.$field / s),+ }
            }
        }
        impl<T: Real> Neg for $name<T> {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self {
                $name { $($field: -self.$field),+ }
            }
        }
        impl<T: Real> AddAssign for $name<T> {
            #[inline]
            fn add_assign(&mut self, o: Self) {
                $(self.$field = self.$field + o.$field;)+
            }
        }
        impl<T: Real> SubAssign for $name<T> {
            #[inline]
            fn sub_assign(&mut self, o: Self) {
                $(self.$field = self.$field - o.$field;)+
            }
        }
    };
}

impl_vector_ops!(Vec2 { x, y });
impl_vector_ops!(Vec3 { x, y, z });

impl<T: Real> VectorSpace<T> for Vec2<T> {
    const DIM: usize = 2;

    #[inline]
    fn zero() -> Self {
        vec2(T::zero(), T::zero())
    }
    #[inline]
    fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }
    #[inline]
    fn coord(self, axis: usize) -> T {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => panic!("axis {axis} out of range for Vec2"),
        }
    }
    fn from_fn(mut f: impl FnMut(usize) -> T) -> Self {
        vec2(f(0), f(1))
    }
}

impl<T: Real> VectorSpace<T> for Vec3<T> {
    const DIM: usize = 3;

    #[inline]
    fn zero() -> Self {
        vec3(T::zero(), T::zero(), T::zero())
    }
    #[inline]
    fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }
    #[inline]
    fn coord(self, axis: usize) -> T {
        self[axis]
    }
    fn from_fn(mut f: impl FnMut(usize) -> T) -> Self {
        vec3(f(0), f(1), f(2))
    }
}

impl<T: Real> Vec2<T> {
    #[inline]
    pub fn dot(self, o: Self) -> T {
        VectorSpace::dot(self, o)
    }
    #[inline]
    pub fn norm(self) -> T {
        VectorSpace::norm(self)
    }
    /// 2D cross product (z component of the 3D cross product).
    #[inline]
    pub fn perp_dot(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }
    /// Counter-clockwise rotation by 90 degrees.
    #[inline]
    pub fn perp(self) -> Self {
        vec2(-self.y, self.x)
    }
    pub fn normalized(self) -> Self {
        self / self.norm()
    }
    pub fn extend(self, z: T) -> Vec3<T> {
        vec3(self.x, self.y, z)
    }
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn splat(v: T) -> Self {
        vec3(v, v, v)
    }
    #[inline]
    pub fn dot(self, o: Self) -> T {
        VectorSpace::dot(self, o)
    }
    #[inline]
    pub fn cross(self, o: Self) -> Self {
        vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }
    #[inline]
    pub fn norm(self) -> T {
        VectorSpace::norm(self)
    }
    #[inline]
    pub fn norm_squared(self) -> T {
        VectorSpace::norm_squared(self)
    }
    #[inline]
    pub fn normalized(self) -> Self {
        self / self.norm()
    }
    /// Normalizes unless the length is at or below `eps`.
    pub fn try_normalized(self, eps: T) -> Option<Self> {
        let n = self.norm();
        if n > eps && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }
    #[inline]
    pub fn mul_elem(self, o: Self) -> Self {
        vec3(self.x * o.x, self.y * o.y, self.z * o.z)
    }
    #[inline]
    pub fn min_elem(self, o: Self) -> Self {
        vec3(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }
    #[inline]
    pub fn max_elem(self, o: Self) -> Self {
        vec3(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }
    pub fn max_coord(self) -> T {
        self.x.max(self.y).max(self.z)
    }
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
    pub fn xy(self) -> Vec2<T> {
        vec2(self.x, self.y)
    }
    pub fn cast<U: Real>(self) -> Vec3<U> {
        vec3(
            U::lit(self.x.as_f64()),
            U::lit(self.y.as_f64()),
            U::lit(self.z.as_f64()),
        )
    }
    /// Any unit vector orthogonal to `self` (which must be unit length).
    pub fn any_orthonormal(self) -> Self {
        let helper = if self.x.abs() < T::lit(0.9) {
            vec3(T::one(), T::zero(), T::zero())
        } else {
            vec3(T::zero(), T::one(), T::zero())
        };
        let o = helper - self * helper.dot(self);
        o.normalized()
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("axis {i} out of range for Vec3"),
        }
    }
}

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T> {
    pub rows: [Vec3<T>; 3],
}

impl<T: Real> Mat3<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self::from_rows(vec3(o, z, z), vec3(z, o, z), vec3(z, z, o))
    }

    pub fn from_rows(r0: Vec3<T>, r1: Vec3<T>, r2: Vec3<T>) -> Self {
        Self { rows: [r0, r1, r2] }
    }

    pub fn from_cols(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        Self::from_rows(c0, c1, c2).transpose()
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        vec3(self.rows[0][j], self.rows[1][j], self.rows[2][j])
    }

    pub fn transpose(&self) -> Self {
        Self::from_rows(self.col(0), self.col(1), self.col(2))
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        vec3(
            self.rows[0].dot(v),
            self.rows[1].dot(v),
            self.rows[2].dot(v),
        )
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let c = [o.col(0), o.col(1), o.col(2)];
        let row = |r: Vec3<T>| vec3(r.dot(c[0]), r.dot(c[1]), r.dot(c[2]));
        Self::from_rows(row(self.rows[0]), row(self.rows[1]), row(self.rows[2]))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i][j]
    }

    /// Rotation about a unit `axis` by `angle` radians (Rodrigues).
    pub fn rotation(axis: Vec3<T>, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let t = T::one() - c;
        let Vec3 { x, y, z } = axis;
        Self::from_rows(
            vec3(t * x * x + c, t * x * y - s * z, t * x * z + s * y),
            vec3(t * x * y + s * z, t * y * y + c, t * y * z - s * x),
            vec3(t * x * z - s * y, t * y * z + s * x, t * z * z + c),
        )
    }

    /// Minimal rotation taking unit vector `from` onto unit vector `to`.
    pub fn rotation_between(from: Vec3<T>, to: Vec3<T>) -> Self {
        let axis = from.cross(to);
        let sin = axis.norm();
        let cos = from.dot(to).max(-T::one()).min(T::one());
        if sin <= T::epsilon() {
            if cos > T::zero() {
                return Self::identity();
            }
            return Self::rotation(from.any_orthonormal(), T::PI());
        }
        Self::rotation(axis / sin, sin.atan2(cos))
    }

    /// Rotation from a unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(w: T, x: T, y: T, z: T) -> Self {
        let two = T::lit(2.0);
        let one = T::one();
        Self::from_rows(
            vec3(
                one - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ),
            vec3(
                two * (x * y + w * z),
                one - two * (x * x + z * z),
                two * (y * z - w * x),
            ),
            vec3(
                two * (x * z - w * y),
                two * (y * z + w * x),
                one - two * (x * x + y * y),
            ),
        )
    }
}

/// Uniform-scale rigid transform: `world = rotation * (scale * local) + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similarity<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
    pub scale: T,
}

impl<T: Real> Similarity<T> {
    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: Vec3::zero(),
            scale: T::one(),
        }
    }

    #[inline]
    pub fn apply_point(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p * self.scale) + self.translation
    }

    #[inline]
    pub fn apply_normal(&self, n: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(n)
    }

    pub fn inverse_point(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.transpose().mul_vec(p - self.translation) / self.scale
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn empty() -> Self {
        Self {
            min: Vec3::splat(T::infinity()),
            max: Vec3::splat(T::neg_infinity()),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3<T>>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(*p);
        }
        b
    }

    #[inline]
    pub fn grow(&mut self, p: Vec3<T>) {
        self.min = self.min.min_elem(p);
        self.max = self.max.max_elem(p);
    }

    pub fn union(&self, o: &Self) -> Self {
        Self {
            min: self.min.min_elem(o.min),
            max: self.max.max_elem(o.max),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn center(&self) -> Vec3<T> {
        (self.min + self.max) * T::lit(0.5)
    }

    pub fn extent(&self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn surface_area(&self) -> T {
        if self.is_empty() {
            return T::zero();
        }
        let e = self.extent();
        T::lit(2.0) * (e.x * e.y + e.y * e.z + e.z * e.x)
    }

    pub fn contains(&self, p: Vec3<T>) -> bool {
        p.x >= self.min.x
            && p.y >= self.min.y
            && p.z >= self.min.z
            && p.x <= self.max.x
            && p.y <= self.max.y
            && p.z <= self.max.z
    }

    pub fn contains_strictly(&self, p: Vec3<T>) -> bool {
        p.x > self.min.x
            && p.y > self.min.y
            && p.z > self.min.z
            && p.x < self.max.x
            && p.y < self.max.y
            && p.z < self.max.z
    }

    pub fn contains_box_strictly(&self, o: &Self) -> bool {
        self.contains_strictly(o.min) && self.contains_strictly(o.max)
    }

    /// Slab test; returns the entry/exit interval clipped to `[t_min, t_max]`.
    #[inline]
    pub fn intersect_ray(
        &self,
        origin: Vec3<T>,
        inv_dir: Vec3<T>,
        t_min: T,
        t_max: T,
    ) -> Option<(T, T)> {
        let mut lo = t_min;
        let mut hi = t_max;
        for a in 0..3 {
            let t0 = (self.min[a] - origin[a]) * inv_dir[a];
            let t1 = (self.max[a] - origin[a]) * inv_dir[a];
            let (near, far) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            // NaN from 0 * inf falls through the comparisons and leaves the bound untouched
            if near > lo {
                lo = near;
            }
            if far < hi {
                hi = far;
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_between_maps_from_to() {
        let a = vec3(1.0, 2.0, -0.5).normalized();
        let b = vec3(-0.3, 0.1, 0.9).normalized();
        let r = Mat3::rotation_between(a, b);
        assert!((r.mul_vec(a) - b).norm() < 1e-12);
        let r = Mat3::rotation_between(a, -a);
        assert!((r.mul_vec(a) + a).norm() < 1e-12);
    }

    #[test]
    fn quaternion_rotation_is_orthonormal() {
        let (w, x, y, z) = (0.5f64, 0.5, -0.5, 0.5);
        let r = Mat3::from_quaternion(w, x, y, z);
        let i = r.mul_mat(&r.transpose());
        for a in 0..3 {
            for b in 0..3 {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((i.get(a, b) - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn similarity_inverse_roundtrip() {
        let s = Similarity {
            rotation: Mat3::rotation(vec3(0.0, 0.0, 1.0), 0.7),
            translation: vec3(1.0, -2.0, 3.0),
            scale: 2.5,
        };
        let p = vec3(0.3, 0.4, -0.2);
        assert!((s.inverse_point(s.apply_point(p)) - p).norm() < 1e-12);
    }

    #[test]
    fn slab_test_handles_axis_parallel_rays() {
        let b = Aabb {
            min: vec3(-1.0, -1.0, -1.0),
            max: vec3(1.0, 1.0, 1.0),
        };
        let d = vec3(1.0, 0.0, 0.0);
        let inv = vec3(1.0 / d.x, 1.0 / d.y, 1.0 / d.z);
        let hit = b
            .intersect_ray(vec3(-5.0, 0.0, 0.0), inv, 0.0, f64::INFINITY)
            .unwrap();
        assert_eq!(hit, (4.0, 6.0));
        assert!(b
            .intersect_ray(vec3(-5.0, 2.0, 0.0), inv, 0.0, f64::INFINITY)
            .is_none());
    }
}
