use crate::math::{Mat3, Vec3};
use crate::real::Real;

/// Orthonormal frame; `normal x binormal = tangent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame<T> {
    pub tangent: Vec3<T>,
    pub normal: Vec3<T>,
    pub binormal: Vec3<T>,
}

/// Rotation-minimizing frames along unit `tangents`.
///
/// The first frame aligns its normal with `up` projected off the tangent (or any
/// orthogonal direction when they are parallel); each later normal is the
/// previous one carried by the minimal rotation between consecutive tangents.
pub fn parallel_transport_frames<T: Real>(tangents: &[Vec3<T>], up: Vec3<T>) -> Vec<Frame<T>> {
    let mut frames = Vec::with_capacity(tangents.len());
    let Some(&t0) = tangents.first() else {
        return frames;
    };
    let n0 = (up - t0 * up.dot(t0))
        .try_normalized(T::lit(1e-6))
        .unwrap_or_else(|| t0.any_orthonormal());
    frames.push(Frame {
        tangent: t0,
        normal: n0,
        binormal: t0.cross(n0),
    });
    for &t in &tangents[1..] {
        let prev = frames.last().unwrap();
        let r = Mat3::rotation_between(prev.tangent, t);
        let n = r.mul_vec(prev.normal);
        // re-orthogonalize against drift
        let n = (n - t * n.dot(t)).normalized();
        frames.push(Frame {
            tangent: t,
            normal: n,
            binormal: t.cross(n),
        });
    }
    frames
}
