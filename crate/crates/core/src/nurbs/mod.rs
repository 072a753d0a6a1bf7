//! NURBS curves and surfaces: knot vectors, basis evaluation, rational
//! curve/surface evaluation with first derivatives, and least-squares fitting
//! of closed (periodic) curves.
//!
//! Closed curves store only their distinct control points. The periodic knot
//! vector carries `degree` extra spans and control indices wrap modulo the
//! control-point count, so a closed curve of `n` points has period `n` in
//! parameter space.

mod curve;
mod fit;
mod knots;
mod surface;

pub use curve::NurbsCurve;
pub use fit::{chord_length_parameters, fit_closed_curve};
pub use knots::{KnotVector, MAX_DEGREE};
pub use surface::{NurbsSurface, SurfaceDerivatives};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NurbsError {
    #[error("parameter {t} outside domain [{start}, {end}]")]
    Domain { t: f64, start: f64, end: f64 },
    #[error("degree {0} outside supported range [1, {MAX_DEGREE}]")]
    Degree(usize),
    #[error("invalid knot vector: {0}")]
    Knots(String),
    #[error("need at least {needed} control points, got {got}")]
    TooFewControlPoints { needed: usize, got: usize },
    #[error("weights must be finite and positive")]
    Weights,
    #[error("fit is rank deficient: {0}")]
    RankDeficient(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, NurbsError>;
