//! Measured pump-volume / contact-angle data: ingestion, the empirical linear
//! law, a two-parameter volume calibration, and theory-vs-measurement tables.
//!
//! Pumped volumes are kept in whatever unit the data states. The geometric cap
//! volume (mm³) is reached through `effective = scale · (V − dead_volume)`.

use std::io::Read;

use serde::Serialize;
use thiserror::Error;

use crate::cap_geometry::{self, CapInput};
use crate::lens_model::{self, LensConfig};
use crate::LensError;

/// Sample dataset: six pumped volumes (μl) and the measured contact angles.
pub const SAMPLE_CSV: &str = include_str!("../data/sample_measurements.csv");
pub const CSV_HEADER: [&str; 2] = ["volume", "contact_angle_deg"];

/// Scale of the default reporting interpretation: the stated μl read as nl,
/// i.e. 0.001 mm³ of cap per pumped unit.
pub const FIXED_SCALE: f64 = 1e-3;

/// Published focal-length endpoints for the sample dataset (mm), low-volume
/// side last.
pub const REFERENCE_FOCAL_RANGE_MM: (f64, f64) = (3.95, 9.69);

/// Relative tolerance used when checking computed focal lengths against
/// [`REFERENCE_FOCAL_RANGE_MM`].
pub const ENDPOINT_REL_TOL: f64 = 0.02;

/// Index window in which the low-volume endpoint is expected to be reproducible.
pub const ALT_INDEX_RANGE: (f64, f64) = (1.41, 1.42);

const GRID_SCALE_STEPS: usize = 160;
const GRID_DEAD_STEPS: usize = 120;
const GRID_SCALE_DECADES: f64 = 5.0;
const DESCENT_REL_TOL: f64 = 1e-6;
const DESCENT_MAX_SWEEPS: usize = 200;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("expected header `volume,contact_angle_deg`, found `{found}`")]
    Header { found: String },

    #[error("no data rows")]
    Empty,

    #[error("invalid measurement series:\n{}", format_issues(.0))]
    Validation(Vec<RowIssue>),

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("no feasible (scale, dead volume) keeps every effective volume inside the cap regime")]
    NoFeasibleModel,

    #[error(transparent)]
    Lens(#[from] LensError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_issues(issues: &[RowIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  row {}: {}", i.row, i.message))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A single validation failure. `row` is 1-based over data rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowIssue {
    pub row: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    pub pumped_volume: f64,
    pub contact_angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementSeries {
    points: Vec<Measurement>,
    pub volume_unit_label: String,
    pub source: String,
}

impl MeasurementSeries {
    /// Validates ≥ 2 points, strictly increasing volumes and angles in (0°, 90°).
    pub fn new(
        points: Vec<Measurement>,
        volume_unit_label: impl Into<String>,
        source: impl Into<String>,
    ) -> Result<Self, CalibrationError> {
        let mut issues = Vec::new();
        if points.len() < 2 {
            issues.push(RowIssue {
                row: points.len(),
                message: format!("need at least 2 points, got {}", points.len()),
            });
        }
        for (i, p) in points.iter().enumerate() {
            let row = i + 1;
            if !p.pumped_volume.is_finite() {
                issues.push(RowIssue {
                    row,
                    message: format!("volume {} is not finite", p.pumped_volume),
                });
            }
            if !(p.contact_angle_deg > 0.0 && p.contact_angle_deg < 90.0) {
                issues.push(RowIssue {
                    row,
                    message: format!("contact angle {}° outside (0°, 90°)", p.contact_angle_deg),
                });
            }
            if i > 0 && !(p.pumped_volume > points[i - 1].pumped_volume) {
                issues.push(RowIssue {
                    row,
                    message: format!(
                        "volume {} not greater than previous volume {}",
                        p.pumped_volume,
                        points[i - 1].pumped_volume
                    ),
                });
            }
        }
        if !issues.is_empty() {
            return Err(CalibrationError::Validation(issues));
        }
        Ok(MeasurementSeries {
            points,
            volume_unit_label: volume_unit_label.into(),
            source: source.into(),
        })
    }

    pub fn points(&self) -> &[Measurement] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn volumes(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.pumped_volume)
    }

    pub fn angles_deg(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.contact_angle_deg)
    }
}

/// Parse the `volume,contact_angle_deg` CSV format.
pub fn load_measurements<R: Read>(source: R, source_name: &str) -> Result<MeasurementSeries, CalibrationError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(source);
    let headers = reader.headers().map_err(|e| csv_error(&e, 1))?.clone();
    if headers.is_empty() {
        return Err(CalibrationError::Empty);
    }
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(CalibrationError::Header {
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, CalibrationError> {
            let raw = record.get(i).unwrap_or_default();
            raw.parse::<f64>().map_err(|_| CalibrationError::Parse {
                line,
                message: format!("cannot parse {name} `{raw}`"),
            })
        };
        points.push(Measurement {
            pumped_volume: field(0, "volume")?,
            contact_angle_deg: field(1, "contact angle")?,
        });
    }
    if points.is_empty() {
        return Err(CalibrationError::Empty);
    }
    MeasurementSeries::new(points, "ul", source_name)
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> CalibrationError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    CalibrationError::Parse {
        line,
        message: e.to_string(),
    }
}

/// The built-in six-point dataset.
pub fn sample_series() -> MeasurementSeries {
    load_measurements(SAMPLE_CSV.as_bytes(), "embedded sample").expect("embedded sample is valid")
}

/// Ordinary least squares `θ = slope·V + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

impl LinearFit {
    pub fn predict(&self, volume: f64) -> f64 {
        self.slope * volume + self.intercept
    }

    pub fn sum_squared_residuals(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

pub fn linear_fit(series: &MeasurementSeries) -> Result<LinearFit, CalibrationError> {
    fit_line(&series.volumes().collect::<Vec<_>>(), &series.angles_deg().collect::<Vec<_>>())
}

pub(crate) fn fit_line(x: &[f64], y: &[f64]) -> Result<LinearFit, CalibrationError> {
    if x.len() < 2 || x.len() != y.len() {
        return Err(CalibrationError::Degenerate("need at least 2 paired points".into()));
    }
    let n = x.len() as f64;
    let x_mean = x.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - x_mean).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - x_mean) * (b - y_mean)).sum();
    if sxx == 0.0 {
        return Err(CalibrationError::Degenerate("all volumes are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - y_mean).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        residuals,
    })
}

/// Map from pumped volume to cap volume, `effective = scale · (V − dead_volume)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeCalibration {
    /// Cap mm³ per pumped volume unit.
    pub scale: f64,
    /// In the pumped volume unit.
    pub dead_volume: f64,
    /// Degrees.
    pub rms_residual: f64,
}

impl VolumeCalibration {
    /// Evaluate the residual of a given transform on `series`.
    pub fn evaluate(series: &MeasurementSeries, diameter: f64, scale: f64, dead_volume: f64) -> Result<Self, CalibrationError> {
        let mut sse = 0.0;
        for p in series.points() {
            let theta = predict_theta_raw(scale, dead_volume, diameter, p.pumped_volume)?;
            sse += (theta - p.contact_angle_deg).powi(2);
        }
        Ok(VolumeCalibration {
            scale,
            dead_volume,
            rms_residual: (sse / series.len() as f64).sqrt(),
        })
    }

    /// Scale 0.001, no dead volume.
    pub fn fixed_interpretation(series: &MeasurementSeries, diameter: f64) -> Result<Self, CalibrationError> {
        Self::evaluate(series, diameter, FIXED_SCALE, 0.0)
    }

    pub fn effective_volume(&self, pumped_volume: f64) -> f64 {
        self.scale * (pumped_volume - self.dead_volume)
    }
}

fn predict_theta_raw(scale: f64, dead_volume: f64, diameter: f64, pumped_volume: f64) -> Result<f64, LensError> {
    let effective = scale * (pumped_volume - dead_volume);
    let cap = cap_geometry::resolve_cap(diameter, CapInput::Volume(effective))?;
    Ok(cap.contact_angle_deg())
}

/// Contact angle (degrees) of the cap fed by `pumped_volume`.
pub fn predict_theta(calibration: &VolumeCalibration, diameter: f64, pumped_volume: f64) -> Result<f64, LensError> {
    predict_theta_raw(calibration.scale, calibration.dead_volume, diameter, pumped_volume)
}

/// Fit `(scale, dead_volume)` by least squares on the contact angle.
///
/// Volumes are normalized by the largest one so the search is invariant under
/// a change of volume unit. A log-spaced grid over the feasible scales times a
/// uniform grid over feasible dead volumes seeds an alternating golden-section
/// coordinate descent, which is finished with damped Gauss-Newton steps.
pub fn fit_volume_model(series: &MeasurementSeries, diameter: f64) -> Result<VolumeCalibration, CalibrationError> {
    if !(diameter > 0.0 && diameter.is_finite()) {
        return Err(LensError::non_positive("diameter", diameter).into());
    }
    let v_max = series.volumes().fold(f64::NEG_INFINITY, f64::max);
    let v_min = series.volumes().fold(f64::INFINITY, f64::min);
    if !(v_min > 0.0) {
        return Err(CalibrationError::NoFeasibleModel);
    }
    let problem = Normalized {
        u: series.volumes().map(|v| v / v_max).collect(),
        theta: series.angles_deg().map(f64::to_radians).collect(),
        diameter,
        hemisphere: cap_geometry::hemisphere_volume(diameter),
    };
    let u_min = v_min / v_max;

    // grid: dead fraction d ∈ [0, u_min), scale s ∈ [s_max·1e-5, s_max(d)]
    let mut best: Option<(f64, f64, f64)> = None;
    for j in 0..GRID_DEAD_STEPS {
        let d = u_min * j as f64 / GRID_DEAD_STEPS as f64;
        let s_max = problem.scale_ceiling(d);
        for i in 0..GRID_SCALE_STEPS {
            let frac = i as f64 / (GRID_SCALE_STEPS - 1) as f64;
            let s = s_max * 10f64.powf(-GRID_SCALE_DECADES * (1.0 - frac));
            if let Some(sse) = problem.sse(s, d) {
                let better = match best {
                    None => true,
                    // ties go to the lower scale, then the lower dead volume
                    Some((b, bs, bd)) => sse < b || (sse == b && (s, d) < (bs, bd)),
                };
                if better {
                    best = Some((sse, s, d));
                }
            }
        }
    }
    let (_, mut s, mut d) = best.ok_or(CalibrationError::NoFeasibleModel)?;

    let dead_hi = u_min * (1.0 - 1e-12);
    let mut s_step = 10f64.powf(GRID_SCALE_DECADES / (GRID_SCALE_STEPS - 1) as f64);
    let mut d_step = u_min / GRID_DEAD_STEPS as f64;
    for _ in 0..DESCENT_MAX_SWEEPS {
        let (s_prev, d_prev) = (s, d);

        let lo = (s / s_step).ln();
        let hi = (s * s_step).min(problem.scale_ceiling(d)).ln();
        let ln_s = crate::solve::golden_section_minimize(|x: f64| problem.sse_or_inf(x.exp(), d), lo, hi, 1e-13, 200).x;
        if problem.sse_or_inf(ln_s.exp(), d) <= problem.sse_or_inf(s, d) {
            s = ln_s.exp();
        }

        let lo = (d - d_step).max(problem.dead_floor(s));
        let hi = (d + d_step).min(dead_hi);
        if hi > lo {
            let nd = crate::solve::golden_section_minimize(|x: f64| problem.sse_or_inf(s, x), lo, hi, 1e-15, 200).x;
            if problem.sse_or_inf(s, nd) <= problem.sse_or_inf(s, d) {
                d = nd;
            }
        }

        let ds = ((s - s_prev) / s).abs();
        let dd = (d - d_prev).abs();
        s_step = s_step.powf(0.5).max(1.0 + 1e-9);
        d_step = (d_step * 0.5).max(1e-12);
        if ds < DESCENT_REL_TOL && dd < DESCENT_REL_TOL * u_min {
            break;
        }
    }

    let (s, d) = problem.gauss_newton_polish(s, d, dead_hi);
    VolumeCalibration::evaluate(series, diameter, s / v_max, d * v_max)
}

/// Fitting problem in normalized volumes `u = V / V_max`, angles in radians.
struct Normalized {
    u: Vec<f64>,
    theta: Vec<f64>,
    diameter: f64,
    hemisphere: f64,
}

impl Normalized {
    /// Largest scale keeping every effective volume inside the hemisphere.
    fn scale_ceiling(&self, d: f64) -> f64 {
        self.hemisphere / (1.0 - d)
    }

    /// Smallest dead fraction allowed at scale `s`.
    fn dead_floor(&self, s: f64) -> f64 {
        (1.0 - self.hemisphere / s).max(0.0)
    }

    fn sse(&self, s: f64, d: f64) -> Option<f64> {
        if !(s > 0.0) || d < 0.0 {
            return None;
        }
        let mut total = 0.0;
        for (u, t) in self.u.iter().zip(&self.theta) {
            let cap = cap_geometry::resolve_cap(self.diameter, CapInput::Volume(s * (u - d))).ok()?;
            total += (cap.contact_angle - t).to_degrees().powi(2);
        }
        Some(total)
    }

    fn sse_or_inf(&self, s: f64, d: f64) -> f64 {
        self.sse(s, d).unwrap_or(f64::INFINITY)
    }

    /// Residuals (deg) and their derivatives with respect to (s, d).
    fn jacobian(&self, s: f64, d: f64) -> Option<Vec<(f64, f64, f64)>> {
        let rim = self.diameter / 2.0;
        self.u
            .iter()
            .zip(&self.theta)
            .map(|(u, t)| {
                let cap = cap_geometry::resolve_cap(self.diameter, CapInput::Volume(s * (u - d))).ok()?;
                let h = cap.sag;
                // θ = 2 atan(h/a), V = π h (3a² + h²)/6
                let dtheta_dh = 2.0 * rim / (rim * rim + h * h);
                let dv_dh = std::f64::consts::PI * (rim * rim + h * h) / 2.0;
                let dtheta_dv = (dtheta_dh / dv_dh).to_degrees();
                let r = (cap.contact_angle - t).to_degrees();
                Some((r, dtheta_dv * (u - d), -dtheta_dv * s))
            })
            .collect()
    }

    fn gauss_newton_polish(&self, mut s: f64, mut d: f64, dead_hi: f64) -> (f64, f64) {
        let mut current = self.sse_or_inf(s, d);
        let mut damping = 1e-6;
        for _ in 0..100 {
            let Some(rows) = self.jacobian(s, d) else { break };
            let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (r, js, jd) in &rows {
                a11 += js * js;
                a12 += js * jd;
                a22 += jd * jd;
                g1 += js * r;
                g2 += jd * r;
            }
            let mut improved = false;
            for _ in 0..30 {
                let b11 = a11 * (1.0 + damping);
                let b22 = a22 * (1.0 + damping);
                let det = b11 * b22 - a12 * a12;
                if det == 0.0 || !det.is_finite() {
                    damping *= 10.0;
                    continue;
                }
                let step_s = -(b22 * g1 - a12 * g2) / det;
                let step_d = -(b11 * g2 - a12 * g1) / det;
                let ns = s + step_s;
                let nd = (d + step_d).clamp(0.0, dead_hi);
                let candidate = self.sse_or_inf(ns, nd);
                if candidate < current {
                    let converged = (ns - s).abs() <= 1e-15 * s && (nd - d).abs() <= 1e-15;
                    s = ns;
                    d = nd;
                    current = candidate;
                    damping = (damping * 0.3).max(1e-12);
                    improved = !converged;
                    break;
                }
                damping *= 10.0;
            }
            if !improved {
                break;
            }
        }
        (s, d)
    }
}

/// One row of the theory-vs-measurement table. `None` marks a value that could
/// not be computed; the reason is in `issues`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub volume: f64,
    pub theta_meas_deg: f64,
    /// Fixed 0.001 interpretation.
    pub theta_theory_deg: Option<f64>,
    pub theta_fitted_deg: Option<f64>,
    /// Focal length implied by the measured angle.
    pub f_meas_mm: Option<f64>,
    /// Focal length of the fixed-interpretation cap.
    pub f_theory_mm: Option<f64>,
    pub delta_theta_deg: Option<f64>,
    pub rel_delta_theta: Option<f64>,
    pub delta_f_mm: Option<f64>,
    pub rel_delta_f: Option<f64>,
    pub issues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub diameter: f64,
    pub index: f64,
    pub fixed: VolumeCalibration,
    pub fitted: Option<VolumeCalibration>,
    pub rows: Vec<ComparisonRow>,
}

fn focal_from_angle_deg(config: &LensConfig<f64>, theta_deg: f64) -> Result<f64, LensError> {
    let r = cap_geometry::radius_from_contact_angle(config.diameter, theta_deg.to_radians())?;
    lens_model::plano_convex_focal(config.index, r)
}

/// Per-point comparison of measured and theoretical contact angle and focal
/// length. Rows whose theory values fall outside the cap regime are kept and
/// marked.
pub fn compare_table(
    series: &MeasurementSeries,
    config: &LensConfig<f64>,
    calibration: Option<&VolumeCalibration>,
) -> Result<ComparisonTable, CalibrationError> {
    config.validate()?;
    let fixed = VolumeCalibration {
        scale: FIXED_SCALE,
        dead_volume: 0.0,
        rms_residual: f64::NAN,
    };
    let mut rows = Vec::with_capacity(series.len());
    let mut sse = 0.0;
    let mut fixed_ok = true;
    for p in series.points() {
        let mut issues = Vec::new();
        let mut keep = |r: Result<f64, LensError>, what: &str| match r {
            Ok(v) => Some(v),
            Err(e) => {
                issues.push(format!("{what}: {e}"));
                None
            }
        };
        let theta_theory = keep(predict_theta(&fixed, config.diameter, p.pumped_volume), "theory");
        let theta_fitted = calibration.and_then(|c| keep(predict_theta(c, config.diameter, p.pumped_volume), "fitted"));
        let f_meas = keep(focal_from_angle_deg(config, p.contact_angle_deg), "measured focal");
        let f_theory = theta_theory.and_then(|t| keep(focal_from_angle_deg(config, t), "theory focal"));

        match theta_theory {
            Some(t) => sse += (t - p.contact_angle_deg).powi(2),
            None => fixed_ok = false,
        }
        let delta_theta = theta_theory.map(|t| t - p.contact_angle_deg);
        let delta_f = f_theory.zip(f_meas).map(|(t, m)| t - m);
        rows.push(ComparisonRow {
            volume: p.pumped_volume,
            theta_meas_deg: p.contact_angle_deg,
            theta_theory_deg: theta_theory,
            theta_fitted_deg: theta_fitted,
            f_meas_mm: f_meas,
            f_theory_mm: f_theory,
            delta_theta_deg: delta_theta,
            rel_delta_theta: delta_theta.map(|d| d / p.contact_angle_deg),
            delta_f_mm: delta_f,
            rel_delta_f: delta_f.zip(f_meas).map(|(d, m)| d / m),
            issues,
        });
    }
    let fixed = VolumeCalibration {
        rms_residual: if fixed_ok { (sse / series.len() as f64).sqrt() } else { f64::NAN },
        ..fixed
    };
    Ok(ComparisonTable {
        diameter: config.diameter,
        index: config.index,
        fixed,
        fitted: calibration.copied(),
        rows,
    })
}

/// Check of a computed focal length against a published reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointCheck {
    pub contact_angle_deg: f64,
    pub reference_focal_mm: f64,
    pub computed_focal_mm: f64,
    pub rel_deviation: f64,
    pub within_tolerance: bool,
    /// Index that reproduces the reference exactly, `1 + R/f_ref`.
    pub index_to_match: f64,
    /// Sub-interval of [`ALT_INDEX_RANGE`] that brings the endpoint within tolerance.
    pub alt_index_window: Option<(f64, f64)>,
}

/// Compare the focal lengths implied by the extreme measured angles against
/// [`REFERENCE_FOCAL_RANGE_MM`]. Returns `(high_volume, low_volume)` checks.
pub fn endpoint_checks(series: &MeasurementSeries, config: &LensConfig<f64>) -> Result<(EndpointCheck, EndpointCheck), CalibrationError> {
    config.validate()?;
    let first = series.points().first().ok_or(CalibrationError::Empty)?;
    let last = series.points().last().ok_or(CalibrationError::Empty)?;
    let (f_short, f_long) = REFERENCE_FOCAL_RANGE_MM;
    Ok((
        endpoint_check(config, last.contact_angle_deg, f_short)?,
        endpoint_check(config, first.contact_angle_deg, f_long)?,
    ))
}

fn endpoint_check(config: &LensConfig<f64>, theta_deg: f64, reference: f64) -> Result<EndpointCheck, CalibrationError> {
    let radius = cap_geometry::radius_from_contact_angle(config.diameter, theta_deg.to_radians())?;
    let computed = lens_model::plano_convex_focal(config.index, radius)?;
    let rel = (computed - reference) / reference;
    // f = R/(n − 1) within ±tol of the reference ⇔ n ∈ [1 + R/(f(1+tol)), 1 + R/(f(1−tol))]
    let n_lo = 1.0 + radius / (reference * (1.0 + ENDPOINT_REL_TOL));
    let n_hi = 1.0 + radius / (reference * (1.0 - ENDPOINT_REL_TOL));
    let (a, b) = ALT_INDEX_RANGE;
    let window = (n_lo.max(a), n_hi.min(b));
    Ok(EndpointCheck {
        contact_angle_deg: theta_deg,
        reference_focal_mm: reference,
        computed_focal_mm: computed,
        rel_deviation: rel,
        within_tolerance: rel.abs() <= ENDPOINT_REL_TOL,
        index_to_match: lens_model::index_for_focal(radius, reference)?,
        alt_index_window: (window.0 <= window.1).then_some(window),
    })
}
