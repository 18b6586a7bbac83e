//! Thin-lens optics of the liquid cap.
//!
//! Light travels left to right and meets the curved cap first; its radius is
//! positive. The flat second face contributes no power, so the focal length is
//! `f = R / (n − 1)`.

use serde::Serialize;

use crate::cap_geometry::{self, CapInput, CapState};
use crate::{LensError, Result, Scalar};

pub const WATER_INDEX: f64 = 1.33;

/// Optical parameters of the lens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LensConfig<T> {
    pub diameter: T,
    pub index: T,
    /// Only used by the ray tracer. `None` means "use the cap sag".
    pub center_thickness: Option<T>,
}

impl<T: Scalar> LensConfig<T> {
    pub fn new(diameter: T, index: T) -> Result<Self> {
        let config = LensConfig {
            diameter,
            index,
            center_thickness: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_center_thickness(mut self, thickness: T) -> Result<Self> {
        self.center_thickness = Some(thickness);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diameter > T::zero() && self.diameter.is_finite()) {
            return Err(LensError::non_positive("diameter", self.diameter.as_f64()));
        }
        check_index(self.index)?;
        if let Some(t) = self.center_thickness {
            if !(t >= T::zero() && t.is_finite()) {
                return Err(LensError::non_positive("center thickness", t.as_f64()));
            }
        }
        Ok(())
    }

    /// Shortest focal length the cap can reach, at the hemisphere.
    pub fn hemisphere_focal_bound(&self) -> T {
        self.diameter / (T::lit(2.0) * (self.index - T::one()))
    }
}

impl Default for LensConfig<f64> {
    fn default() -> Self {
        LensConfig {
            diameter: 2.0,
            index: WATER_INDEX,
            center_thickness: None,
        }
    }
}

/// One sample of the theoretical volume/focal-length/contact-angle curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint<T> {
    pub volume: T,
    pub contact_angle_deg: T,
    pub focal_length: T,
    pub radius: T,
    pub sag: T,
}

/// Signed surface radius for the lensmaker equation. Positive when the center
/// of curvature lies to the right of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceRadius<T> {
    Finite(T),
    Flat,
}

impl<T: Scalar> SurfaceRadius<T> {
    fn curvature(self) -> Result<T> {
        match self {
            SurfaceRadius::Flat => Ok(T::zero()),
            SurfaceRadius::Finite(r) if r == T::zero() => Err(LensError::ZeroRadius),
            SurfaceRadius::Finite(r) => Ok(r.recip()),
        }
    }
}

/// Result of the lensmaker equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Focal<T> {
    Finite(T),
    /// Zero net power.
    Afocal,
}

impl<T: Scalar> Focal<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Focal::Finite(f) => Some(f),
            Focal::Afocal => None,
        }
    }
}

fn check_index<T: Scalar>(index: T) -> Result<()> {
    if index > T::one() && index.is_finite() {
        Ok(())
    } else {
        Err(LensError::InvalidIndex { index: index.as_f64() })
    }
}

fn check_positive<T: Scalar>(what: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(LensError::non_positive(what, value.as_f64()))
    }
}

/// `1/f = (n − 1)(1/R1 − 1/R2)`.
pub fn lensmaker<T: Scalar>(index: T, r1: SurfaceRadius<T>, r2: SurfaceRadius<T>) -> Result<Focal<T>> {
    check_index(index)?;
    let c1 = r1.curvature()?;
    let c2 = r2.curvature()?;
    let n1 = index - T::one();
    // A single flat face reduces to R/(n-1) directly.
    match (r1, r2) {
        (SurfaceRadius::Finite(r), SurfaceRadius::Flat) => return Ok(Focal::Finite(r / n1)),
        (SurfaceRadius::Flat, SurfaceRadius::Finite(r)) => return Ok(Focal::Finite(-r / n1)),
        _ => {}
    }
    let power = n1 * (c1 - c2);
    if power == T::zero() {
        Ok(Focal::Afocal)
    } else {
        Ok(Focal::Finite(power.recip()))
    }
}

/// `f = R / (n − 1)`.
pub fn plano_convex_focal<T: Scalar>(index: T, radius: T) -> Result<T> {
    check_index(index)?;
    check_positive("radius", radius)?;
    Ok(radius / (index - T::one()))
}

/// `R = f (n − 1)`.
pub fn radius_for_focal<T: Scalar>(index: T, focal: T) -> Result<T> {
    check_index(index)?;
    check_positive("focal length", focal)?;
    Ok(focal * (index - T::one()))
}

/// Index that makes a surface of `radius` focus at `focal`: `n = 1 + R/f`.
pub fn index_for_focal<T: Scalar>(radius: T, focal: T) -> Result<T> {
    check_positive("radius", radius)?;
    check_positive("focal length", focal)?;
    Ok(T::one() + radius / focal)
}

pub fn volume_to_cap<T: Scalar>(config: &LensConfig<T>, volume: T) -> Result<CapState<T>> {
    config.validate()?;
    cap_geometry::resolve_cap(config.diameter, CapInput::Volume(volume))
}

pub fn volume_to_focal<T: Scalar>(config: &LensConfig<T>, volume: T) -> Result<T> {
    let cap = volume_to_cap(config, volume)?;
    plano_convex_focal(config.index, cap.radius)
}

/// The cap that focuses at `focal`.
///
/// Closed form: `R = f(n − 1)`, `h = R − √(R² − a²)` (evaluated as
/// `a² / (R + √((R − a)(R + a)))`), then the contact angle and volume from
/// the sag.
pub fn focal_to_cap<T: Scalar>(config: &LensConfig<T>, focal: T) -> Result<CapState<T>> {
    config.validate()?;
    let bound = config.hemisphere_focal_bound();
    let unreachable = || LensError::UnreachableFocal {
        focal: focal.as_f64(),
        bound: bound.as_f64(),
    };
    if !(focal > T::zero() && focal.is_finite()) {
        return Err(unreachable());
    }
    let radius = radius_for_focal(config.index, focal)?;
    let rim = config.diameter / T::lit(2.0);
    if radius < rim {
        // admit round-off from a hemisphere-bound round trip
        if radius < rim * (T::one() - T::rel_floor(0.0)) {
            return Err(unreachable());
        }
    }
    let radius = radius.max(rim);
    let sag = rim * rim / (radius + ((radius - rim) * (radius + rim)).sqrt());
    let sag = sag.min(rim);
    Ok(CapState {
        diameter: config.diameter,
        sag,
        radius,
        contact_angle: cap_geometry::contact_angle_from_sag(config.diameter, sag)?,
        volume: cap_geometry::cap_volume_from_sag(config.diameter, sag)?,
    })
}

pub fn focal_to_volume<T: Scalar>(config: &LensConfig<T>, focal: T) -> Result<T> {
    Ok(focal_to_cap(config, focal)?.volume)
}

/// Radians.
pub fn focal_to_contact_angle<T: Scalar>(config: &LensConfig<T>, focal: T) -> Result<T> {
    Ok(focal_to_cap(config, focal)?.contact_angle)
}

/// Curve samples at `steps` uniformly spaced focal lengths in `[f_min, f_max]`.
pub fn theoretical_curve<T: Scalar>(config: &LensConfig<T>, f_min: T, f_max: T, steps: usize) -> Result<Vec<CurvePoint<T>>> {
    config.validate()?;
    if steps < 2 {
        return Err(LensError::InvalidRange(format!("need at least 2 steps, got {steps}")));
    }
    if !(f_min < f_max) || !f_max.is_finite() {
        return Err(LensError::InvalidRange(format!(
            "focal range [{}, {}] is empty",
            f_min.as_f64(),
            f_max.as_f64()
        )));
    }
    let bound = config.hemisphere_focal_bound();
    if f_min <= bound {
        return Err(LensError::UnreachableFocal {
            focal: f_min.as_f64(),
            bound: bound.as_f64(),
        });
    }
    let span = f_max - f_min;
    let last = T::lit((steps - 1) as f64);
    (0..steps)
        .map(|i| {
            let focal = if i == steps - 1 {
                f_max
            } else {
                f_min + span * T::lit(i as f64) / last
            };
            let cap = focal_to_cap(config, focal)?;
            Ok(CurvePoint {
                volume: cap.volume,
                contact_angle_deg: cap.contact_angle_deg(),
                focal_length: focal,
                radius: cap.radius,
                sag: cap.sag,
            })
        })
        .collect()
}
