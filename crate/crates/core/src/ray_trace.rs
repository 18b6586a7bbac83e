//! Exact meridional ray tracing through the plano-convex liquid lens.
//!
//! Coordinates are `(z, y)`: `z` along the optical axis (light travels toward
//! `+z`), `y` the signed height in the meridional plane. The curved surface has
//! its vertex at `z = 0` and its center of curvature at `z = R`; the flat exit
//! face sits at `z = center_thickness`. The object is at infinity, so every
//! entering ray is parallel to the axis.
//!
//! When a pupil wider than the physical rim is requested the sphere is traced
//! beyond the rim and, if the edge thickness goes negative, the exit plane is
//! reached by extending the ray line backwards. That keeps fixed-F/# studies
//! well defined at low fill volumes.

use std::fmt;

use serde::Serialize;

use crate::cap_geometry::{self, CapInput};
use crate::lens_model::LensConfig;
use crate::solve::golden_section_minimize;
use crate::{LensError, Result, Scalar};

pub const DEFAULT_RAY_COUNT: usize = 101;
/// Bracket width at which the best-focus search stops, mm.
pub const BEST_FOCUS_TOL_MM: f64 = 1e-9;
/// Height of the paraxial probe ray as a fraction of the surface radius.
pub const PARAXIAL_PROBE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Vec2<T> {
    /// Axial component.
    pub z: T,
    /// Transverse component.
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(z: T, y: T) -> Self {
        Vec2 { z, y }
    }

    pub fn dot(self, other: Self) -> T {
        self.z * other.z + self.y * other.y
    }

    pub fn norm(self) -> T {
        self.z.hypot(self.y)
    }

    pub fn scale(self, k: T) -> Self {
        Vec2::new(self.z * k, self.y * k)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Vec2::new(self.z / n, self.y / n)
    }

    fn add(self, other: Self) -> Self {
        Vec2::new(self.z + other.z, self.y + other.y)
    }
}

/// A ray in the meridional plane: the point `(origin_z, height)` and a unit
/// direction with positive axial component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeridionalRay<T> {
    pub origin_z: T,
    pub height: T,
    pub direction: Vec2<T>,
}

impl<T: Scalar> MeridionalRay<T> {
    /// Normalizes `direction`; rejects rays that do not travel toward `+z`.
    pub fn new(origin_z: T, height: T, direction: Vec2<T>) -> Result<Self> {
        let direction = direction.normalized();
        if !(direction.z > T::zero()) {
            return Err(LensError::NonConverging);
        }
        Ok(MeridionalRay {
            origin_z,
            height,
            direction,
        })
    }

    /// Ray at `height` travelling parallel to the axis, starting at `z`.
    pub fn parallel(z: T, height: T) -> Self {
        MeridionalRay {
            origin_z: z,
            height,
            direction: Vec2::new(T::one(), T::zero()),
        }
    }

    /// Transverse slope `dy/dz`.
    pub fn slope(&self) -> T {
        self.direction.y / self.direction.z
    }

    pub fn height_at(&self, z: T) -> T {
        self.height + (z - self.origin_z) * self.slope()
    }

    fn point(&self) -> Vec2<T> {
        Vec2::new(self.origin_z, self.height)
    }
}

/// Sequential description of the lens for tracing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prescription<T> {
    pub curved_radius: T,
    pub center_thickness: T,
    pub index: T,
    pub aperture_radius: T,
}

impl<T: Scalar> Prescription<T> {
    pub fn new(curved_radius: T, center_thickness: T, index: T, aperture_radius: T) -> Result<Self> {
        let p = Prescription {
            curved_radius,
            center_thickness,
            index,
            aperture_radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.curved_radius > T::zero() && self.curved_radius.is_finite()) {
            return Err(LensError::non_positive("curved radius", self.curved_radius.as_f64()));
        }
        if !(self.center_thickness >= T::zero() && self.center_thickness.is_finite()) {
            return Err(LensError::non_positive("center thickness", self.center_thickness.as_f64()));
        }
        if !(self.index > T::one() && self.index.is_finite()) {
            return Err(LensError::InvalidIndex {
                index: self.index.as_f64(),
            });
        }
        if !(self.aperture_radius > T::zero() && self.aperture_radius.is_finite()) {
            return Err(LensError::DegenerateAperture {
                aperture: self.aperture_radius.as_f64(),
            });
        }
        if self.aperture_radius > self.curved_radius {
            return Err(LensError::ApertureExceedsRadius {
                aperture: self.aperture_radius.as_f64(),
                radius: self.curved_radius.as_f64(),
            });
        }
        Ok(())
    }

    pub fn with_aperture(self, aperture_radius: T) -> Result<Self> {
        Prescription::new(self.curved_radius, self.center_thickness, self.index, aperture_radius)
    }

    /// `R / (n − 1)`.
    pub fn thin_lens_efl(&self) -> T {
        self.curved_radius / (self.index - T::one())
    }
}

/// Focus positions and blur metrics of a traced fan. Lengths in mm; `z` is
/// measured from the vertex of the curved surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotMetrics<T> {
    pub paraxial_focus_z: T,
    pub marginal_focus_z: T,
    /// Plane minimizing the largest transverse ray height over the fan.
    pub best_focus_z: T,
    /// Diameter of the circle of least confusion at `best_focus_z`.
    pub colc_diameter: T,
    /// Plane minimizing the RMS transverse height over the fan.
    pub rms_focus_z: T,
    pub rms_radius_at_best: T,
    pub rays_traced: usize,
    pub rays_dropped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TraceWarning {
    /// The F/#-derived pupil is wider than the physical lens.
    PupilOverfill { aperture_radius: f64, rim_radius: f64 },
    /// Rays removed from the fan (missed the surface or were totally reflected).
    RaysDropped { count: usize },
}

impl fmt::Display for TraceWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceWarning::PupilOverfill {
                aperture_radius,
                rim_radius,
            } => write!(
                f,
                "pupil exceeds lens rim: aperture radius {aperture_radius:.4} mm > rim radius {rim_radius:.4} mm"
            ),
            TraceWarning::RaysDropped { count } => write!(f, "{count} rays dropped from the fan"),
        }
    }
}

/// Output of [`simulate_volume`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation<T> {
    pub efl: T,
    pub prescription: Prescription<T>,
    pub metrics: SpotMetrics<T>,
    pub warnings: Vec<TraceWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    pub ray_count: usize,
    /// Limit the pupil to the physical rim instead of warning.
    pub clamp_to_rim: bool,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            ray_count: DEFAULT_RAY_COUNT,
            clamp_to_rim: false,
        }
    }
}

/// Intersection point and the outward unit normal there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceHit<T> {
    pub point: Vec2<T>,
    pub normal: Vec2<T>,
}

/// Vector form of Snell's law. `normal` may point either way across the
/// interface.
pub fn snell_refract<T: Scalar>(direction: Vec2<T>, normal: Vec2<T>, n_in: T, n_out: T) -> Result<Vec2<T>> {
    let mut normal = normal;
    let mut cos_in = -normal.dot(direction);
    if cos_in < T::zero() {
        normal = normal.scale(-T::one());
        cos_in = -cos_in;
    }
    let eta = n_in / n_out;
    let sin2_out = eta * eta * (T::one() - cos_in * cos_in).max(T::zero());
    if sin2_out > T::one() {
        return Err(LensError::TotalInternalReflection {
            sin_out: sin2_out.sqrt().as_f64(),
        });
    }
    let cos_out = (T::one() - sin2_out).sqrt();
    let refracted = direction.scale(eta).add(normal.scale(eta * cos_in - cos_out));
    Ok(refracted.normalized())
}

/// Nearest forward intersection of `ray` with the front half of the sphere
/// whose vertex is at `vertex_z` and center at `vertex_z + radius`.
pub fn intersect_curved_surface<T: Scalar>(ray: &MeridionalRay<T>, vertex_z: T, radius: T) -> Result<SurfaceHit<T>> {
    let center = Vec2::new(vertex_z + radius, T::zero());
    let w = Vec2::new(ray.origin_z - center.z, ray.height);
    let d = ray.direction;
    let b = w.dot(d);
    // |w|² − R², arranged to stay exact for rays starting on the vertex plane
    let c = (w.z - radius) * (w.z + radius) + w.y * w.y;
    let disc = b * b - c;
    if disc < T::zero() {
        return Err(LensError::Miss);
    }
    let root = disc.sqrt();
    // roots of s² + 2bs + c = 0 without cancellation
    let q = if b < T::zero() { -b + root } else { -b - root };
    let (s1, s2) = if q == T::zero() { (T::zero(), T::zero()) } else { (c / q, q) };
    let (near, far) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
    let s = if near >= T::zero() {
        near
    } else if far >= T::zero() {
        far
    } else {
        return Err(LensError::Miss);
    };
    let point = ray.point().add(d.scale(s));
    if point.z > center.z {
        return Err(LensError::Miss);
    }
    let normal = Vec2::new((point.z - center.z) / radius, point.y / radius);
    Ok(SurfaceHit { point, normal })
}

/// Trace a ray entering parallel to the axis at `entry_height` through both
/// faces. The returned ray is expressed at the exit plane.
pub fn trace<T: Scalar>(prescription: &Prescription<T>, entry_height: T) -> Result<MeridionalRay<T>> {
    prescription.validate()?;
    let limit = prescription.aperture_radius * (T::one() + T::rel_floor(0.0));
    if !(entry_height.abs() <= limit) {
        return Err(LensError::InvalidRange(format!(
            "entry height {} mm outside aperture radius {} mm",
            entry_height.as_f64(),
            prescription.aperture_radius.as_f64()
        )));
    }
    trace_unchecked(prescription, entry_height)
}

fn trace_unchecked<T: Scalar>(p: &Prescription<T>, entry_height: T) -> Result<MeridionalRay<T>> {
    let incoming = MeridionalRay::parallel(T::zero(), entry_height);
    let hit = intersect_curved_surface(&incoming, T::zero(), p.curved_radius)?;
    let inside = snell_refract(incoming.direction, hit.normal, T::one(), p.index)?;

    let exit_z = p.center_thickness;
    let height = hit.point.y + (exit_z - hit.point.z) * inside.y / inside.z;
    let out = snell_refract(inside, Vec2::new(-T::one(), T::zero()), p.index, T::one())?;
    MeridionalRay::new(exit_z, height, out)
}

/// Axial position where the ray crosses `y = 0`.
pub fn axial_crossing<T: Scalar>(ray: &MeridionalRay<T>) -> Result<T> {
    let slope = ray.slope();
    if ray.height == T::zero() && slope != T::zero() {
        return Ok(ray.origin_z);
    }
    if slope == T::zero() || (ray.height > T::zero()) == (slope > T::zero()) {
        return Err(LensError::NonConverging);
    }
    Ok(ray.origin_z - ray.height / slope)
}

fn probe_height<T: Scalar>(p: &Prescription<T>) -> T {
    p.curved_radius * T::lit(PARAXIAL_PROBE)
}

/// Richardson extrapolation of an even function of the ray height to zero
/// height from samples at `y` and `y/2`.
fn richardson<T: Scalar>(at_y: T, at_half: T) -> T {
    (T::lit(4.0) * at_half - at_y) / T::lit(3.0)
}

/// Effective focal length `−y / tan(u')` in the limit of vanishing entry
/// height.
pub fn paraxial_efl<T: Scalar>(prescription: &Prescription<T>) -> Result<T> {
    prescription.validate()?;
    let efl_at = |y: T| -> Result<T> {
        let ray = trace_unchecked(prescription, y)?;
        Ok(-y / ray.slope())
    };
    let y = probe_height(prescription);
    Ok(richardson(efl_at(y)?, efl_at(y / T::lit(2.0))?))
}

/// Axial crossing of the paraxial image, from the vertex.
pub fn paraxial_focus_z<T: Scalar>(prescription: &Prescription<T>) -> Result<T> {
    prescription.validate()?;
    let crossing_at = |y: T| -> Result<T> { axial_crossing(&trace_unchecked(prescription, y)?) };
    let y = probe_height(prescription);
    Ok(richardson(crossing_at(y)?, crossing_at(y / T::lit(2.0))?))
}

/// Entry heights `a·i/N` for `i = 1..=N`; the last is exactly the marginal ray.
pub fn fan_heights<T: Scalar>(aperture_radius: T, ray_count: usize) -> Vec<T> {
    let n = T::lit(ray_count as f64);
    (1..=ray_count)
        .map(|i| {
            if i == ray_count {
                aperture_radius
            } else {
                aperture_radius * (T::lit(i as f64) / n)
            }
        })
        .collect()
}

/// Trace every height; per-ray results come back in input order.
pub fn trace_fan<T: Scalar>(prescription: &Prescription<T>, heights: &[T]) -> Vec<Result<MeridionalRay<T>>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        heights.par_iter().map(|&y| trace_unchecked(prescription, y)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        heights.iter().map(|&y| trace_unchecked(prescription, y)).collect()
    }
}

fn max_height<T: Scalar>(rays: &[MeridionalRay<T>], z: T) -> T {
    rays.iter().fold(T::zero(), |m, r| m.max(r.height_at(z).abs()))
}

/// Circle of least confusion and related focus planes for a fan of
/// `ray_count` parallel rays spanning `(0, aperture_radius]`.
pub fn best_focus<T: Scalar>(prescription: &Prescription<T>, ray_count: usize) -> Result<SpotMetrics<T>> {
    if !(prescription.aperture_radius > T::zero()) {
        return Err(LensError::DegenerateAperture {
            aperture: prescription.aperture_radius.as_f64(),
        });
    }
    prescription.validate()?;
    if ray_count < 3 {
        return Err(LensError::InvalidRange(format!("ray fan needs at least 3 rays, got {ray_count}")));
    }
    let paraxial = paraxial_focus_z(prescription)?;

    let heights = fan_heights(prescription.aperture_radius, ray_count);
    let traced = trace_fan(prescription, &heights);
    let rays: Vec<MeridionalRay<T>> = traced.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let dropped = ray_count - rays.len();
    let marginal = rays
        .iter()
        .rev()
        .find_map(|r| axial_crossing(r).ok())
        .ok_or(LensError::EmptyFan)?;

    let (lo, hi) = if marginal <= paraxial {
        (marginal, paraxial)
    } else {
        (paraxial, marginal)
    };
    let tol = T::lit(BEST_FOCUS_TOL_MM).max(T::rel_floor(0.0) * hi.abs());
    let best = golden_section_minimize(|z| max_height(&rays, z), lo, hi, tol, 500).x;
    let colc_radius = max_height(&rays, best);

    // least squares on the lines y_i(z) = p_i + q_i (z − z0)
    let z0 = rays[0].origin_z;
    let (pq, qq) = rays.iter().fold((T::zero(), T::zero()), |(pq, qq), r| {
        let q = r.slope();
        (pq + r.height_at(z0) * q, qq + q * q)
    });
    let rms_z = if qq > T::zero() { z0 - pq / qq } else { best };
    let count = T::lit(rays.len() as f64);
    let rms = (rays.iter().fold(T::zero(), |s, r| {
        let h = r.height_at(rms_z);
        s + h * h
    }) / count)
        .sqrt();

    Ok(SpotMetrics {
        paraxial_focus_z: paraxial,
        marginal_focus_z: marginal,
        best_focus_z: best,
        colc_diameter: T::lit(2.0) * colc_radius,
        rms_focus_z: rms_z,
        rms_radius_at_best: rms,
        rays_traced: rays.len(),
        rays_dropped: dropped,
    })
}

/// Build the lens for a fill volume, size the pupil from the F/#, and trace.
///
/// The pupil radius is `EFL / (2·F#)` with `EFL = R/(n − 1)`. A pupil wider
/// than the rim is kept (with a warning) unless `clamp_to_rim` is set.
pub fn simulate_volume<T: Scalar>(
    config: &LensConfig<T>,
    volume: T,
    f_number: T,
    options: SimulateOptions,
) -> Result<Simulation<T>> {
    config.validate()?;
    if !(f_number > T::zero() && f_number.is_finite()) {
        return Err(LensError::non_positive("f-number", f_number.as_f64()));
    }
    let cap = cap_geometry::resolve_cap(config.diameter, CapInput::Volume(volume))?;
    let thickness = config.center_thickness.unwrap_or(cap.sag);
    let thin_efl = cap.radius / (config.index - T::one());
    let rim = cap.rim_radius();
    let mut aperture = thin_efl / (T::lit(2.0) * f_number);

    let mut warnings = Vec::new();
    if aperture > rim {
        if options.clamp_to_rim {
            aperture = rim;
        } else {
            warnings.push(TraceWarning::PupilOverfill {
                aperture_radius: aperture.as_f64(),
                rim_radius: rim.as_f64(),
            });
        }
    }
    let prescription = Prescription::new(cap.radius, thickness, config.index, aperture)?;
    let efl = paraxial_efl(&prescription)?;
    let metrics = best_focus(&prescription, options.ray_count)?;
    if metrics.rays_dropped > 0 {
        warnings.push(TraceWarning::RaysDropped {
            count: metrics.rays_dropped,
        });
    }
    Ok(Simulation {
        efl,
        prescription,
        metrics,
        warnings,
    })
}
