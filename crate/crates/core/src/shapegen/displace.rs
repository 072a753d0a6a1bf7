use serde::{Deserialize, Serialize};

use super::mesh::TriangleMesh;
use super::{Result, ShapeError};
use crate::noise::NoiseField;
use crate::real::Real;

/// Two-scale displacement along vertex normals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplaceSpec<T> {
    pub coarse_field: NoiseField<T>,
    pub coarse_magnitude: T,
    pub fine_field: NoiseField<T>,
    pub fine_magnitude: T,
    pub subdivision_level: u32,
}

impl<T: Real> DisplaceSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.coarse_magnitude >= T::zero() && self.fine_magnitude >= T::zero()) {
            return Err(ShapeError::Invalid(
                "displacement magnitudes must be non-negative".into(),
            ));
        }
        self.coarse_field.validate().map_err(ShapeError::Invalid)?;
        self.fine_field.validate().map_err(ShapeError::Invalid)?;
        Ok(())
    }

    pub fn max_travel(&self) -> T {
        self.coarse_magnitude + self.fine_magnitude
    }
}

/// Subdivides `subdivision_level` times, then moves every vertex along its
/// normal by the weighted sum of both fields at its undisplaced position.
/// Normals are recomputed from the displaced faces.
pub fn displace_mesh<T: Real>(
    mesh: &TriangleMesh<T>,
    spec: &DisplaceSpec<T>,
) -> Result<TriangleMesh<T>> {
    spec.validate()?;
    let mut out = mesh.clone();
    for _ in 0..spec.subdivision_level {
        out = out.subdivide();
    }
    if spec.max_travel() == T::zero() {
        return Ok(out);
    }
    for (p, n) in out.positions.iter_mut().zip(&out.normals) {
        let h = spec.coarse_magnitude * spec.coarse_field.eval(*p)
            + spec.fine_magnitude * spec.fine_field.eval(*p);
        *p += *n * h;
    }
    out.recompute_normals();
    Ok(out)
}
