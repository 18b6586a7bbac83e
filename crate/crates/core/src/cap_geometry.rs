//! Spherical-cap geometry of the bulged lens membrane.
//!
//! A cap of base diameter `D` and sag `h` sits on a sphere of radius
//! `R = (D² + 4h²) / (8h)`. The contact angle `θ` is the angle between the
//! base plane and the tangent at the rim, so `D/2 = R sin θ` and
//! `h = R (1 − cos θ)`. Only sub-hemispherical caps (`0 < h ≤ D/2`,
//! `0 < θ ≤ 90°`) are lenses in the plano-convex sense and everything here is
//! restricted to that regime.

use serde::Serialize;

use crate::solve::bisect;
use crate::{LensError, Result, Scalar};

/// Bisection termination for [`sag_from_volume`].
pub const SAG_SOLVE_REL_TOL: f64 = 1e-14;
pub const SAG_SOLVE_MAX_ITER: usize = 200;

/// Fully resolved cap. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapState<T> {
    pub diameter: T,
    pub sag: T,
    pub radius: T,
    pub contact_angle: T,
    pub volume: T,
}

impl<T: Scalar> CapState<T> {
    pub fn contact_angle_deg(&self) -> T {
        self.contact_angle.to_degrees()
    }

    pub fn rim_radius(&self) -> T {
        self.diameter / T::lit(2.0)
    }
}

/// Angles of the rim construction: `alpha` between the base plane and the
/// line from the rim to the sphere center, `beta` the chord angle to the apex,
/// `gamma = 90° − alpha − beta` and `theta = gamma + beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleDecomposition<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub theta: T,
}

/// The single quantity used to pin down a cap of known diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapInput<T> {
    Sag(T),
    /// Radians.
    ContactAngle(T),
    Volume(T),
}

fn check_diameter<T: Scalar>(diameter: T) -> Result<()> {
    if diameter > T::zero() && diameter.is_finite() {
        Ok(())
    } else {
        Err(LensError::non_positive("diameter", diameter.as_f64()))
    }
}

fn check_sag<T: Scalar>(diameter: T, sag: T) -> Result<()> {
    check_diameter(diameter)?;
    if sag > T::zero() && sag <= diameter / T::lit(2.0) {
        Ok(())
    } else {
        Err(LensError::SagOutOfRange {
            sag: sag.as_f64(),
            diameter: diameter.as_f64(),
        })
    }
}

/// Validates `theta` in (0, π/2]; a value within a few ulps above π/2 (as
/// produced by a degree round trip) is snapped to π/2.
pub(crate) fn check_angle<T: Scalar>(theta: T) -> Result<T> {
    let right = T::FRAC_PI_2();
    if theta > T::zero() && theta <= right {
        return Ok(theta);
    }
    if theta > right && theta <= right * (T::one() + T::rel_floor(0.0)) {
        return Ok(right);
    }
    Err(LensError::AngleOutOfRange {
        degrees: theta.as_f64().to_degrees(),
    })
}

/// Volume of the hemisphere on a base of the given diameter, the upper end of
/// the cap regime.
pub fn hemisphere_volume<T: Scalar>(diameter: T) -> T {
    let a = diameter / T::lit(2.0);
    T::lit(2.0) * T::PI() / T::lit(3.0) * a * a * a
}

/// `R = (D² + 4h²) / (8h)`.
pub fn radius_from_sag<T: Scalar>(diameter: T, sag: T) -> Result<T> {
    check_sag(diameter, sag)?;
    Ok((diameter * diameter + T::lit(4.0) * sag * sag) / (T::lit(8.0) * sag))
}

pub fn angle_decomposition<T: Scalar>(diameter: T, sag: T) -> Result<AngleDecomposition<T>> {
    let radius = radius_from_sag(diameter, sag)?;
    let half = diameter / T::lit(2.0);
    let alpha = ((radius - sag) / half).atan();
    let beta = (sag / half).atan();
    let gamma = T::FRAC_PI_2() - alpha - beta;
    let theta = gamma + beta;
    Ok(AngleDecomposition {
        alpha,
        beta,
        gamma,
        theta,
    })
}

/// Contact angle `θ = 90° − atan((2R − 2h)/D)`, evaluated as
/// `atan2(D, 2R − 2h)` so small angles keep full relative precision.
///
/// Equal to `2·atan(2h/D)`.
pub fn contact_angle_from_sag<T: Scalar>(diameter: T, sag: T) -> Result<T> {
    let radius = radius_from_sag(diameter, sag)?;
    Ok(diameter.atan2(T::lit(2.0) * (radius - sag)))
}

/// `h = (D/2)·tan(θ/2)`.
pub fn sag_from_contact_angle<T: Scalar>(diameter: T, theta: T) -> Result<T> {
    check_diameter(diameter)?;
    let theta = check_angle(theta)?;
    Ok(diameter / T::lit(2.0) * (theta / T::lit(2.0)).tan())
}

/// `R = (D/2) / sin θ`.
pub fn radius_from_contact_angle<T: Scalar>(diameter: T, theta: T) -> Result<T> {
    check_diameter(diameter)?;
    let theta = check_angle(theta)?;
    Ok(diameter / T::lit(2.0) / theta.sin())
}

/// `V = πR³/3 · (2 + cos θ)(1 − cos θ)²`.
///
/// `1 − cos θ` is computed as `2 sin²(θ/2)`.
pub fn cap_volume_from_angle<T: Scalar>(radius: T, theta: T) -> Result<T> {
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(LensError::non_positive("radius", radius.as_f64()));
    }
    let theta = check_angle(theta)?;
    let s = (theta / T::lit(2.0)).sin();
    let one_minus_cos = T::lit(2.0) * s * s;
    Ok(T::PI() * radius * radius * radius / T::lit(3.0) * (T::lit(2.0) + theta.cos()) * one_minus_cos * one_minus_cos)
}

/// `V = π h (3a² + h²) / 6` with `a = D/2`.
pub fn cap_volume_from_sag<T: Scalar>(diameter: T, sag: T) -> Result<T> {
    check_sag(diameter, sag)?;
    Ok(volume_polynomial(diameter / T::lit(2.0), sag))
}

fn volume_polynomial<T: Scalar>(rim: T, sag: T) -> T {
    T::PI() * sag * (T::lit(3.0) * rim * rim + sag * sag) / T::lit(6.0)
}

/// Sag of the cap holding `volume` on a base of `diameter`.
///
/// Bisection on the strictly increasing cubic `h (3a² + h²) = 6V/π` over
/// `(0, D/2]`.
pub fn sag_from_volume<T: Scalar>(diameter: T, volume: T) -> Result<T> {
    check_diameter(diameter)?;
    if !(volume > T::zero() && volume.is_finite()) {
        return Err(LensError::non_positive("volume", volume.as_f64()));
    }
    let max = hemisphere_volume(diameter);
    let rim = diameter / T::lit(2.0);
    if volume >= max {
        if volume <= max * (T::one() + T::rel_floor(0.0)) {
            return Ok(rim);
        }
        return Err(LensError::ExceedsHemisphere {
            volume: volume.as_f64(),
            max: max.as_f64(),
        });
    }
    let target = T::lit(6.0) * volume / T::PI();
    let cubic = |h: T| h * (T::lit(3.0) * rim * rim + h * h) - target;
    let root = bisect(cubic, T::zero(), rim, SAG_SOLVE_REL_TOL, SAG_SOLVE_MAX_ITER)
        .expect("cubic is negative at 0 and non-negative at the rim");
    Ok(root.x)
}

/// Build the full cap state from one known quantity.
pub fn resolve_cap<T: Scalar>(diameter: T, given: CapInput<T>) -> Result<CapState<T>> {
    let sag = match given {
        CapInput::Sag(h) => {
            check_sag(diameter, h)?;
            h
        }
        CapInput::ContactAngle(theta) => sag_from_contact_angle(diameter, theta)?,
        CapInput::Volume(v) => sag_from_volume(diameter, v)?,
    };
    let radius = radius_from_sag(diameter, sag)?;
    let contact_angle = match given {
        CapInput::ContactAngle(theta) => check_angle(theta)?,
        _ => contact_angle_from_sag(diameter, sag)?,
    };
    let volume = match given {
        CapInput::Volume(v) => v.min(hemisphere_volume(diameter)),
        _ => cap_volume_from_sag(diameter, sag)?,
    };
    Ok(CapState {
        diameter,
        sag,
        radius,
        contact_angle,
        volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn radius_examples() {
        assert_relative_eq!(radius_from_sag(2.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(radius_from_sag(2.0, 0.125).unwrap(), 4.0625);
        let mut prev = 0.0;
        for k in 1..=20 {
            let r = radius_from_sag(2.0, 1.0 / f64::from(k * k)).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn sag_domain_errors() {
        assert!(matches!(radius_from_sag(2.0, 0.0), Err(LensError::SagOutOfRange { .. })));
        assert!(matches!(radius_from_sag(2.0, -0.1), Err(LensError::SagOutOfRange { .. })));
        assert!(matches!(radius_from_sag(2.0, 1.0001), Err(LensError::SagOutOfRange { .. })));
        assert!(matches!(radius_from_sag(0.0, 0.1), Err(LensError::NonPositive { .. })));
        assert!(contact_angle_from_sag(2.0, 0.0).is_err());
        assert!(cap_volume_from_sag(2.0, 1.5).is_err());
    }

    #[test]
    fn decomposition_hemisphere() {
        let d = angle_decomposition(2.0f64, 1.0).unwrap();
        assert!(d.alpha.abs() < 1e-15);
        assert_relative_eq!(d.beta, deg(45.0), max_relative = 1e-15);
        assert_relative_eq!(d.gamma, deg(45.0), max_relative = 1e-15);
        assert_relative_eq!(d.theta, FRAC_PI_2, max_relative = 1e-15);
    }

    #[test]
    fn decomposition_small_cap() {
        let d = angle_decomposition(2.0, 0.125).unwrap();
        assert_relative_eq!(d.beta, 0.125f64.atan(), max_relative = 1e-15);
        assert_relative_eq!(d.beta.to_degrees(), 7.125, epsilon = 1e-3);
        assert_relative_eq!(d.theta.to_degrees(), 14.25, epsilon = 1e-3);
        assert_eq!(d.gamma, FRAC_PI_2 - d.alpha - d.beta);
        assert_eq!(d.theta, d.gamma + d.beta);
        assert_relative_eq!(d.theta, contact_angle_from_sag(2.0, 0.125).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn contact_angle_examples() {
        assert_relative_eq!(contact_angle_from_sag(2.0, 1.0).unwrap(), FRAC_PI_2);
        // 2·atan(0.125) = 14.2500327°
        assert_relative_eq!(contact_angle_from_sag(2.0f64, 0.125).unwrap().to_degrees(), 14.250_032_697_8, epsilon = 1e-9);
        // 2·atan(0.75036) = 73.7661926°
        assert_relative_eq!(contact_angle_from_sag(2.0f64, 0.75036).unwrap().to_degrees(), 73.766_192_625, epsilon = 1e-8);
    }

    #[test]
    fn sag_from_angle_examples() {
        assert_relative_eq!(sag_from_contact_angle(2.0, FRAC_PI_2).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(sag_from_contact_angle(2.0, deg(14.25)).unwrap(), 0.125, epsilon = 1e-5);
        assert_relative_eq!(sag_from_contact_angle(2.0, deg(49.02)).unwrap(), 0.455_937_053_345, epsilon = 1e-11);
        assert!(matches!(sag_from_contact_angle(2.0, 0.0), Err(LensError::AngleOutOfRange { .. })));
        assert!(matches!(sag_from_contact_angle(2.0, deg(90.5)), Err(LensError::AngleOutOfRange { .. })));
        // degree round trip of 90° lands within an ulp of π/2
        assert!(sag_from_contact_angle(2.0, 90f64.to_radians()).is_ok());
    }

    #[test]
    fn radius_from_angle_examples() {
        assert_relative_eq!(radius_from_contact_angle(2.0, FRAC_PI_2).unwrap(), 1.0);
        assert_relative_eq!(radius_from_contact_angle(2.0, deg(49.02)).unwrap(), 1.324_611_136_286_5, epsilon = 1e-12);
        assert_relative_eq!(radius_from_contact_angle(2.0, deg(14.25)).unwrap(), 4.062_509_128_741, epsilon = 1e-11);
        let h = sag_from_contact_angle(2.0, deg(33.0)).unwrap();
        assert_relative_eq!(
            radius_from_contact_angle(2.0, deg(33.0)).unwrap(),
            radius_from_sag(2.0, h).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn volume_from_angle_examples() {
        assert_relative_eq!(cap_volume_from_angle(1.0, FRAC_PI_2).unwrap(), 2.0 * PI / 3.0, max_relative = 1e-15);
        // hand evaluation of the closed form at R=4.0625, θ=14.25°
        assert_relative_eq!(cap_volume_from_angle(4.0625, deg(14.25)).unwrap(), 0.197_370_401_856, epsilon = 1e-11);
        assert!(cap_volume_from_angle(3.0, 1e-6).unwrap() < 1e-15);
        assert!(cap_volume_from_angle(0.0, 0.5).is_err());
        assert!(cap_volume_from_angle(1.0, 2.0).is_err());
    }

    #[test]
    fn volume_from_sag_examples() {
        assert_relative_eq!(cap_volume_from_sag(2.0, 1.0).unwrap(), 2.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(cap_volume_from_sag(2.0, 0.125).unwrap(), PI * 0.125 * 3.015625 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(cap_volume_from_sag(2.0, 0.125).unwrap(), 0.197_372_194_708, epsilon = 1e-11);
        assert_relative_eq!(cap_volume_from_sag(2.0, 0.75036).unwrap(), 1.399_874_204_191, epsilon = 1e-11);
    }

    #[test]
    fn sag_from_volume_examples() {
        assert_eq!(sag_from_volume(2.0, 2.0 * PI / 3.0).unwrap(), 1.0);
        // frozen from a 40-digit bisection of the cubic
        assert_relative_eq!(sag_from_volume(2.0, 0.2).unwrap(), 0.126_646_840_425_980_56, max_relative = 1e-13);
        assert_relative_eq!(sag_from_volume(2.0, 1.4).unwrap(), 0.750_411_234_851_746_9, max_relative = 1e-13);
    }

    #[test]
    fn sag_from_volume_errors() {
        let err = sag_from_volume(2.0, 3.0).unwrap_err();
        assert!(err.to_string().contains("exceeds hemispherical regime"));
        assert!(matches!(sag_from_volume(2.0, 0.0), Err(LensError::NonPositive { .. })));
        assert!(sag_from_volume(2.0, -1.0).is_err());
        assert!(sag_from_volume(2.0, f64::NAN).is_err());
    }

    #[test]
    fn resolve_cap_examples() {
        let hemi = resolve_cap(2.0, CapInput::Volume(2.0 * PI / 3.0)).unwrap();
        assert_eq!(hemi.sag, 1.0);
        assert_relative_eq!(hemi.radius, 1.0);
        assert_relative_eq!(hemi.contact_angle, FRAC_PI_2);

        let c = resolve_cap(2.0, CapInput::ContactAngle(deg(14.25))).unwrap();
        assert_relative_eq!(c.sag, 0.125, epsilon = 1e-5);
        assert_relative_eq!(c.radius, 4.0625, epsilon = 1e-5);
        assert_relative_eq!(c.volume, 0.1974, epsilon = 1e-4);

        let c = resolve_cap(2.0, CapInput::Sag(0.4557)).unwrap();
        assert_relative_eq!(c.contact_angle_deg(), 48.997_508_714, epsilon = 1e-8);
        assert_relative_eq!(c.radius, 1.325_063_078_78, epsilon = 1e-10);
        assert_relative_eq!(c.volume, 0.765_360_979_0, epsilon = 1e-9);
    }

    #[test]
    fn resolve_cap_propagates_errors() {
        assert!(resolve_cap(2.0, CapInput::Volume(5.0)).is_err());
        assert!(resolve_cap(2.0, CapInput::Sag(0.0)).is_err());
        assert!(resolve_cap(2.0, CapInput::ContactAngle(-0.2)).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let c = resolve_cap(2.0f32, CapInput::Volume(0.2f32)).unwrap();
        assert!((c.sag - 0.126_646_84).abs() < 1e-5);
        assert!((c.contact_angle_deg() - 14.4358).abs() < 1e-3);
    }
}
