//! Shape generation: closed profile curves, random-walk stems, lofting into
//! NURBS surfaces, tessellation and normal-direction displacement.
//!
//! Profiles are counter-clockwise in their plane and sit in rotation-minimizing
//! frames along the stem, so lofted surfaces have outward normals.

mod build;
mod displace;
mod frame;
mod loft;
mod mesh;
pub mod offset;
mod profile;
mod stem;

pub use build::{build_shape, ShapeRecipe};
pub use displace::{displace_mesh, DisplaceSpec};
pub use frame::{parallel_transport_frames, Frame};
pub use loft::{harmonize_profiles, loft, LoftSpec};
pub use mesh::{tessellate, TriangleMesh};
pub use offset::offset_outline;
pub use profile::{
    gen_profile, gen_reptile_profile, gen_starfish_profile, normalize_profile, profile_from_spine,
    Profile, ProfileSpec, ProfileStyle,
};
pub use stem::{gen_stem, Stem, StemSpec};

use thiserror::Error;

use crate::nurbs::NurbsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error(transparent)]
    Nurbs(#[from] NurbsError),
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("invalid shape parameters: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ShapeError>;
