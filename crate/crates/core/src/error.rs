use thiserror::Error;

pub type Result<T, E = LensError> = std::result::Result<T, E>;

/// Domain and numerical failures from the geometry, lens and ray-trace code.
///
/// Values are carried as `f64` regardless of the scalar type used for the
/// computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LensError {
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("sag {sag} mm outside (0, D/2] for diameter {diameter} mm")]
    SagOutOfRange { sag: f64, diameter: f64 },

    #[error("contact angle {degrees}° outside (0°, 90°]")]
    AngleOutOfRange { degrees: f64 },

    #[error("volume {volume} mm³ exceeds hemispherical regime (max {max} mm³)")]
    ExceedsHemisphere { volume: f64, max: f64 },

    #[error("refractive index must exceed 1, got {index}")]
    InvalidIndex { index: f64 },

    #[error("surface radius must be nonzero")]
    ZeroRadius,

    #[error("unreachable focal length {focal} mm: at or below the hemisphere bound {bound} mm")]
    UnreachableFocal { focal: f64, bound: f64 },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("total internal reflection (sin of refracted angle {sin_out})")]
    TotalInternalReflection { sin_out: f64 },

    #[error("ray misses the curved surface")]
    Miss,

    #[error("ray is not converging toward the axis")]
    NonConverging,

    #[error("degenerate aperture radius {aperture} mm")]
    DegenerateAperture { aperture: f64 },

    #[error("aperture radius {aperture} mm exceeds curved-surface radius {radius} mm")]
    ApertureExceedsRadius { aperture: f64, radius: f64 },

    #[error("no ray of the fan could be traced")]
    EmptyFan,
}

impl LensError {
    pub(crate) fn non_positive(what: &'static str, value: f64) -> Self {
        LensError::NonPositive { what, value }
    }
}
