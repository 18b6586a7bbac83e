use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Floating point scalar the geometry, lens and ray-trace code is written against.
///
/// Implemented for `f32` and `f64`. Tolerances that are stated in absolute
/// terms (solver termination, bracket widths) are floored at a few ulps of the
/// concrete type via [`Scalar::rel_floor`].
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Lift an `f64` literal into `Self`.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// `max(tol, 4 * epsilon)`.
    fn rel_floor(tol: f64) -> Self {
        let tol = Self::lit(tol);
        let floor = Self::epsilon() * Self::lit(4.0);
        if tol > floor {
            tol
        } else {
            floor
        }
    }
}

impl Scalar for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

pub fn deg_to_rad<T: Scalar>(deg: T) -> T {
    deg.to_radians()
}

pub fn rad_to_deg<T: Scalar>(rad: T) -> T {
    rad.to_degrees()
}
