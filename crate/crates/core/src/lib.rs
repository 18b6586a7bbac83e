//! Modeling toolkit for liquid-filled variable-focus plano-convex lenses.
//!
//! The bulged membrane of the lens is treated as a spherical cap over a
//! circular aperture. From there:
//!
//! - [`cap_geometry`] relates diameter, sag, radius, contact angle and volume,
//! - [`lens_model`] maps cap radius to focal length (thin-lens / lensmaker),
//! - [`ray_trace`] traces exact meridional rays for spherical aberration and
//!   the circle of least confusion,
//! - [`calibration`] fits measured pump-volume/contact-angle data and builds
//!   theory-vs-measurement comparison tables.
//!
//! Lengths are millimeters, volumes cubic millimeters (1 μl = 1 mm³) and angles
//! radians. Degrees only appear in explicitly named `*_deg` fields and
//! functions.
//!
//! The geometry, lens and ray-trace modules are generic over [`Scalar`]
//! (`f32` and `f64`); the aliases below fix the common `f64` instantiation.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cap_geometry;
pub mod error;
pub mod lens_model;
pub mod ray_trace;
pub mod scalar;
pub mod solve;

pub use error::{LensError, Result};
pub use scalar::Scalar;

pub type CapState = cap_geometry::CapState<f64>;
pub type AngleDecomposition = cap_geometry::AngleDecomposition<f64>;
pub type CapInput = cap_geometry::CapInput<f64>;
pub type LensConfig = lens_model::LensConfig<f64>;
pub type CurvePoint = lens_model::CurvePoint<f64>;
pub type Prescription = ray_trace::Prescription<f64>;
pub type MeridionalRay = ray_trace::MeridionalRay<f64>;
pub type SpotMetrics = ray_trace::SpotMetrics<f64>;
pub type Simulation = ray_trace::Simulation<f64>;

pub type CapStateF32 = cap_geometry::CapState<f32>;
pub type LensConfigF32 = lens_model::LensConfig<f32>;
pub type PrescriptionF32 = ray_trace::Prescription<f32>;
pub type SpotMetricsF32 = ray_trace::SpotMetrics<f32>;
