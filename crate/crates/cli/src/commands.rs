use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use liquilens::calibration::{self, ComparisonTable, EndpointCheck, LinearFit, MeasurementSeries, VolumeCalibration};
use liquilens::cap_geometry::{self, CapState};
use liquilens::lens_model::{self, CurvePoint, LensConfig};
use liquilens::ray_trace::{self, SimulateOptions, Simulation};
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::svg::{self, Panel, Series};
use crate::CliError;

/// Relative slack above the hemisphere volume accepted from the command line
/// (a volume typed to five significant digits).
const HEMISPHERE_INPUT_SLACK: f64 = 5e-5;

/// Text for stdout plus diagnostics for stderr.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub warnings: Vec<String>,
    /// Informational lines for stderr, printed without a prefix.
    pub notes: Vec<String>,
}

/// Optional transform from pump units to cap volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpUnits {
    pub scale: f64,
    pub dead_volume: f64,
}

impl PumpUnits {
    fn to_effective(self, pumped: f64) -> f64 {
        self.scale * (pumped - self.dead_volume)
    }

    fn to_pumped(self, effective: f64) -> f64 {
        effective / self.scale + self.dead_volume
    }
}

fn lens_config(cfg: &RunConfig) -> Result<LensConfig<f64>, CliError> {
    Ok(LensConfig::new(cfg.diameter, cfg.index)?)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn write_plot(cfg: &RunConfig, panels: &[Panel]) -> Result<(), CliError> {
    if let Some(path) = &cfg.plot_path {
        std::fs::write(path, svg::render(panels)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Resolve a command-line cap volume, snapping typed values just above the
/// hemisphere onto it.
fn cap_volume_input(cfg: &RunConfig, volume: f64, pump: Option<PumpUnits>, report: &mut Report) -> f64 {
    let effective = match pump {
        Some(p) => {
            let v = p.to_effective(volume);
            report
                .warnings
                .push(format!("pump units: {volume} -> effective cap volume {v} mm³ (scale {}, dead volume {})", p.scale, p.dead_volume));
            v
        }
        None => volume,
    };
    let hemi = cap_geometry::hemisphere_volume(cfg.diameter);
    if effective > hemi && effective <= hemi * (1.0 + HEMISPHERE_INPUT_SLACK) {
        report
            .warnings
            .push(format!("volume {effective} mm³ taken as the hemisphere volume {hemi} mm³"));
        return hemi;
    }
    effective
}

#[derive(Serialize)]
struct CapReport {
    diameter_mm: f64,
    index: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pumped_volume: Option<f64>,
    volume_mm3: f64,
    sag_mm: f64,
    radius_mm: f64,
    contact_angle_deg: f64,
    focal_mm: f64,
}

impl CapReport {
    fn new(cfg: &RunConfig, cap: &CapState<f64>, focal: f64, pumped_volume: Option<f64>) -> Self {
        CapReport {
            diameter_mm: cfg.diameter,
            index: cfg.index,
            pumped_volume,
            volume_mm3: cap.volume,
            sag_mm: cap.sag,
            radius_mm: cap.radius,
            contact_angle_deg: cap.contact_angle_deg(),
            focal_mm: focal,
        }
    }

    fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "diameter        {:.4} mm", self.diameter_mm);
        let _ = writeln!(s, "index           {}", self.index);
        if let Some(p) = self.pumped_volume {
            let _ = writeln!(s, "pumped volume   {p} (pump units)");
        }
        let _ = writeln!(s, "volume          {:.4} mm³", self.volume_mm3);
        let _ = writeln!(s, "sag             {:.4} mm", self.sag_mm);
        let _ = writeln!(s, "radius          {:.4} mm", self.radius_mm);
        let _ = writeln!(s, "contact angle   {:.2} deg", self.contact_angle_deg);
        let _ = writeln!(s, "focal length    {:.4} mm", self.focal_mm);
        s
    }
}

pub fn forward(cfg: &RunConfig, volume: f64, pump: Option<PumpUnits>) -> Result<Report, CliError> {
    let config = lens_config(cfg)?;
    let mut report = Report::default();
    let effective = cap_volume_input(cfg, volume, pump, &mut report);
    let cap = lens_model::volume_to_cap(&config, effective)?;
    let focal = lens_model::plano_convex_focal(config.index, cap.radius)?;
    let r = CapReport::new(cfg, &cap, focal, pump.map(|_| volume));
    report.stdout = match cfg.output_format {
        OutputFormat::Table => r.table(),
        OutputFormat::Csv => format!(
            "volume_mm3,sag_mm,radius_mm,contact_angle_deg,focal_mm\n{},{},{},{},{}\n",
            r.volume_mm3, r.sag_mm, r.radius_mm, r.contact_angle_deg, r.focal_mm
        ),
        OutputFormat::Json => json(&r),
    };
    Ok(report)
}

pub fn inverse(cfg: &RunConfig, focal: f64, pump: Option<PumpUnits>) -> Result<Report, CliError> {
    let config = lens_config(cfg)?;
    let cap = lens_model::focal_to_cap(&config, focal)?;
    let r = CapReport::new(cfg, &cap, focal, pump.map(|p| p.to_pumped(cap.volume)));
    let stdout = match cfg.output_format {
        OutputFormat::Table => r.table(),
        OutputFormat::Csv => format!(
            "focal_mm,volume_mm3,contact_angle_deg,sag_mm,radius_mm\n{},{},{},{},{}\n",
            r.focal_mm, r.volume_mm3, r.contact_angle_deg, r.sag_mm, r.radius_mm
        ),
        OutputFormat::Json => json(&r),
    };
    Ok(Report {
        stdout,
        ..Report::default()
    })
}

pub const CURVE_HEADER: &str = "focal_mm,volume_mm3,contact_angle_deg,radius_mm,sag_mm";

pub fn curve(cfg: &RunConfig, f_min: f64, f_max: f64, steps: usize) -> Result<Report, CliError> {
    let config = lens_config(cfg)?;
    let points = lens_model::theoretical_curve(&config, f_min, f_max, steps)?;
    write_plot(
        cfg,
        &[
            Panel {
                title: format!("Volume vs focal length (D = {} mm, n = {})", cfg.diameter, cfg.index),
                x_label: "cap volume (mm³)".into(),
                y_label: "focal length (mm)".into(),
                series: vec![Series::line("theory", points.iter().map(|p| (p.volume, p.focal_length)).collect())],
            },
            Panel {
                title: "Volume vs contact angle".into(),
                x_label: "cap volume (mm³)".into(),
                y_label: "contact angle (deg)".into(),
                series: vec![Series::line("theory", points.iter().map(|p| (p.volume, p.contact_angle_deg)).collect())],
            },
        ],
    )?;
    let stdout = match cfg.output_format {
        OutputFormat::Csv => {
            let mut s = format!("{CURVE_HEADER}\n");
            for p in &points {
                let _ = writeln!(s, "{},{},{},{},{}", p.focal_length, p.volume, p.contact_angle_deg, p.radius, p.sag);
            }
            s
        }
        OutputFormat::Table => {
            let mut s = format!("{:>10} {:>12} {:>10} {:>10} {:>10}\n", "f (mm)", "V (mm³)", "θ (deg)", "R (mm)", "h (mm)");
            for p in &points {
                let _ = writeln!(
                    s,
                    "{:>10.4} {:>12.4} {:>10.2} {:>10.4} {:>10.4}",
                    p.focal_length, p.volume, p.contact_angle_deg, p.radius, p.sag
                );
            }
            s
        }
        OutputFormat::Json => json(&points.iter().map(CurveRow::from).collect::<Vec<_>>()),
    };
    Ok(Report {
        stdout,
        ..Report::default()
    })
}

#[derive(Serialize)]
struct CurveRow {
    focal_mm: f64,
    volume_mm3: f64,
    contact_angle_deg: f64,
    radius_mm: f64,
    sag_mm: f64,
}

impl From<&CurvePoint<f64>> for CurveRow {
    fn from(p: &CurvePoint<f64>) -> Self {
        CurveRow {
            focal_mm: p.focal_length,
            volume_mm3: p.volume,
            contact_angle_deg: p.contact_angle_deg,
            radius_mm: p.radius,
            sag_mm: p.sag,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub rays: usize,
    pub clamp_to_rim: bool,
}

#[derive(Serialize)]
struct TraceReport {
    volume_mm3: f64,
    f_number: f64,
    efl_mm: f64,
    aperture_radius_mm: f64,
    center_thickness_mm: f64,
    paraxial_focus_z_mm: f64,
    marginal_focus_z_mm: f64,
    best_focus_z_mm: f64,
    colc_diameter_um: f64,
    rms_focus_z_mm: f64,
    rms_radius_um: f64,
    rays_traced: usize,
    rays_dropped: usize,
    warnings: Vec<String>,
}

impl TraceReport {
    fn new(volume: f64, cfg: &RunConfig, sim: &Simulation<f64>) -> Self {
        let m = &sim.metrics;
        TraceReport {
            volume_mm3: volume,
            f_number: cfg.f_number,
            efl_mm: sim.efl,
            aperture_radius_mm: sim.prescription.aperture_radius,
            center_thickness_mm: sim.prescription.center_thickness,
            paraxial_focus_z_mm: m.paraxial_focus_z,
            marginal_focus_z_mm: m.marginal_focus_z,
            best_focus_z_mm: m.best_focus_z,
            colc_diameter_um: m.colc_diameter * 1e3,
            rms_focus_z_mm: m.rms_focus_z,
            rms_radius_um: m.rms_radius_at_best * 1e3,
            rays_traced: m.rays_traced,
            rays_dropped: m.rays_dropped,
            warnings: sim.warnings.iter().map(ToString::to_string).collect(),
        }
    }
}

pub fn trace(cfg: &RunConfig, volume: f64, pump: Option<PumpUnits>, opts: TraceOptions) -> Result<Report, CliError> {
    let config = lens_config(cfg)?;
    let mut report = Report::default();
    let effective = cap_volume_input(cfg, volume, pump, &mut report);
    let sim = ray_trace::simulate_volume(
        &config,
        effective,
        cfg.f_number,
        SimulateOptions {
            ray_count: opts.rays,
            clamp_to_rim: opts.clamp_to_rim,
        },
    )?;
    let r = TraceReport::new(effective, cfg, &sim);
    report.warnings.extend(r.warnings.iter().cloned());

    if cfg.plot_path.is_some() {
        let heights = ray_trace::fan_heights(sim.prescription.aperture_radius, opts.rays);
        let rays: Vec<_> = heights
            .iter()
            .zip(ray_trace::trace_fan(&sim.prescription, &heights))
            .filter_map(|(&y, r)| r.ok().map(|r| (y, r)))
            .collect();
        let best = sim.metrics.best_focus_z;
        let fan = rays.iter().map(|(y, r)| (*y, r.height_at(best) * 1e3)).collect();
        let crossings = rays
            .iter()
            .filter_map(|(y, r)| ray_trace::axial_crossing(r).ok().map(|z| (*y, z)))
            .collect();
        write_plot(
            cfg,
            &[
                Panel {
                    title: format!("Ray fan at best focus, V = {effective} mm³, F/{}", cfg.f_number),
                    x_label: "entry height (mm)".into(),
                    y_label: "transverse height (μm)".into(),
                    series: vec![Series::line("ray fan", fan)],
                },
                Panel {
                    title: "Axial crossing vs entry height".into(),
                    x_label: "entry height (mm)".into(),
                    y_label: "crossing z (mm)".into(),
                    series: vec![Series::line("crossing", crossings)],
                },
            ],
        )?;
    }

    report.stdout = match cfg.output_format {
        OutputFormat::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "volume              {:.4} mm³", r.volume_mm3);
            let _ = writeln!(s, "f-number            {}", r.f_number);
            let _ = writeln!(s, "aperture radius     {:.4} mm", r.aperture_radius_mm);
            let _ = writeln!(s, "center thickness    {:.4} mm", r.center_thickness_mm);
            let _ = writeln!(s, "EFL                 {:.4} mm", r.efl_mm);
            let _ = writeln!(s, "paraxial focus z    {:.4} mm", r.paraxial_focus_z_mm);
            let _ = writeln!(s, "marginal focus z    {:.4} mm", r.marginal_focus_z_mm);
            let _ = writeln!(s, "best focus z        {:.4} mm", r.best_focus_z_mm);
            let _ = writeln!(s, "CoLC diameter       {:.3} μm", r.colc_diameter_um);
            let _ = writeln!(s, "RMS radius          {:.3} μm at z = {:.4} mm", r.rms_radius_um, r.rms_focus_z_mm);
            let _ = writeln!(s, "rays                {} traced, {} dropped", r.rays_traced, r.rays_dropped);
            s
        }
        OutputFormat::Csv => format!(
            "volume_mm3,efl_mm,aperture_radius_mm,paraxial_focus_z_mm,marginal_focus_z_mm,best_focus_z_mm,colc_diameter_um,rms_focus_z_mm,rms_radius_um,rays_traced,rays_dropped\n{},{},{},{},{},{},{},{},{},{},{}\n",
            r.volume_mm3,
            r.efl_mm,
            r.aperture_radius_mm,
            r.paraxial_focus_z_mm,
            r.marginal_focus_z_mm,
            r.best_focus_z_mm,
            r.colc_diameter_um,
            r.rms_focus_z_mm,
            r.rms_radius_um,
            r.rays_traced,
            r.rays_dropped
        ),
        OutputFormat::Json => json(&r),
    };
    Ok(report)
}

/// Where measurement data comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    Sample,
    File(PathBuf),
}

pub fn load(source: &DataSource) -> Result<MeasurementSeries, CliError> {
    match source {
        DataSource::Sample => Ok(calibration::sample_series()),
        DataSource::File(path) => {
            let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(calibration::load_measurements(file, &path.display().to_string())?)
        }
    }
}

pub fn export_sample(path: &Path) -> Result<(), CliError> {
    std::fs::write(path, calibration::SAMPLE_CSV).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct FitReport<'a> {
    source: &'a str,
    points: usize,
    volume_unit: &'a str,
    linear: &'a LinearFit,
    calibration: &'a VolumeCalibration,
    fixed_interpretation: Option<&'a VolumeCalibration>,
}

pub fn fit(cfg: &RunConfig, source: &DataSource) -> Result<Report, CliError> {
    let series = load(source)?;
    let linear = calibration::linear_fit(&series)?;
    let model = calibration::fit_volume_model(&series, cfg.diameter)?;
    let fixed = VolumeCalibration::fixed_interpretation(&series, cfg.diameter).ok();

    if cfg.plot_path.is_some() {
        let (v0, v1) = (series.points()[0].pumped_volume, series.points()[series.len() - 1].pumped_volume);
        let grid: Vec<f64> = (0..=100).map(|i| v0 + (v1 - v0) * f64::from(i) / 100.0).collect();
        let curve = |c: &VolumeCalibration| -> Vec<(f64, f64)> {
            grid.iter()
                .filter_map(|&v| calibration::predict_theta(c, cfg.diameter, v).ok().map(|t| (v, t)))
                .collect()
        };
        let mut series_list = vec![
            Series::markers("measured", series.points().iter().map(|p| (p.pumped_volume, p.contact_angle_deg)).collect()),
            Series::line("linear fit", grid.iter().map(|&v| (v, linear.predict(v))).collect()),
            Series::line("fitted cap model", curve(&model)),
        ];
        if let Some(f) = &fixed {
            series_list.push(Series::line("scale 0.001", curve(f)));
        }
        write_plot(
            cfg,
            &[Panel {
                title: "Pumped volume vs contact angle".into(),
                x_label: format!("pumped volume ({})", series.volume_unit_label),
                y_label: "contact angle (deg)".into(),
                series: series_list,
            }],
        )?;
    }

    let stdout = match cfg.output_format {
        OutputFormat::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "source              {} ({} points, {})", series.source, series.len(), series.volume_unit_label);
            let _ = writeln!(s, "linear fit          theta = slope * V + intercept");
            let _ = writeln!(s, "  slope             {:.6} deg/{}", linear.slope, series.volume_unit_label);
            let _ = writeln!(s, "  intercept         {:.2} deg", linear.intercept);
            let _ = writeln!(s, "  r²                {:.4}", linear.r_squared);
            let _ = writeln!(s, "volume calibration  effective mm³ = scale * (V - dead volume)");
            let _ = writeln!(s, "  scale             {:.6e}", model.scale);
            let _ = writeln!(s, "  dead volume       {:.4} {}", model.dead_volume, series.volume_unit_label);
            let _ = writeln!(s, "  rms residual      {:.2} deg", model.rms_residual);
            if let Some(f) = &fixed {
                let _ = writeln!(s, "  scale 0.001 rms   {:.2} deg", f.rms_residual);
            }
            s
        }
        OutputFormat::Csv => format!(
            "slope_deg_per_unit,intercept_deg,r_squared,scale,dead_volume,rms_residual_deg\n{},{},{},{},{},{}\n",
            linear.slope, linear.intercept, linear.r_squared, model.scale, model.dead_volume, model.rms_residual
        ),
        OutputFormat::Json => json(&FitReport {
            source: &series.source,
            points: series.len(),
            volume_unit: &series.volume_unit_label,
            linear: &linear,
            calibration: &model,
            fixed_interpretation: fixed.as_ref(),
        }),
    };
    Ok(Report {
        stdout,
        ..Report::default()
    })
}

pub const COMPARE_HEADER: &str = "volume,theta_meas_deg,theta_theory_deg,theta_fitted_deg,f_meas_mm,f_theory_mm";

fn cell(v: Option<f64>, requested: bool) -> String {
    match (v, requested) {
        (Some(v), _) => v.to_string(),
        (None, true) => "NA".into(),
        (None, false) => String::new(),
    }
}

fn endpoint_lines(index: f64, checks: &(EndpointCheck, EndpointCheck)) -> Vec<String> {
    let mut lines = vec![format!(
        "focal-length endpoints vs reference ({} mm, {} mm) at n = {index}:",
        checks.0.reference_focal_mm, checks.1.reference_focal_mm
    )];
    for c in [&checks.0, &checks.1] {
        let mut line = format!(
            "  theta {:.2} deg: f = {:.4} mm vs {} mm ({:+.2}%)",
            c.contact_angle_deg,
            c.computed_focal_mm,
            c.reference_focal_mm,
            c.rel_deviation * 100.0
        );
        if c.within_tolerance {
            let _ = write!(line, ", within {}%", calibration::ENDPOINT_REL_TOL * 100.0);
        } else {
            let _ = write!(
                line,
                ", NOT reproducible at n = {index}; n = {:.4} matches exactly",
                c.index_to_match
            );
            if let Some((a, b)) = c.alt_index_window {
                let _ = write!(line, "; n in [{a:.4}, {b:.4}] brings it within {}%", calibration::ENDPOINT_REL_TOL * 100.0);
            }
        }
        lines.push(line);
    }
    lines
}

#[derive(Serialize)]
struct CompareReport<'a> {
    table: &'a ComparisonTable,
    endpoints: [&'a EndpointCheck; 2],
}

pub fn compare(cfg: &RunConfig, source: &DataSource, with_fit: bool) -> Result<Report, CliError> {
    let config = lens_config(cfg)?;
    let series = load(source)?;
    let fitted = if with_fit {
        Some(calibration::fit_volume_model(&series, cfg.diameter)?)
    } else {
        None
    };
    let table = calibration::compare_table(&series, &config, fitted.as_ref())?;
    let endpoints = calibration::endpoint_checks(&series, &config)?;
    let notes = endpoint_lines(cfg.index, &endpoints);

    let mut warnings = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        for issue in &row.issues {
            warnings.push(format!("row {}: {issue}", i + 1));
        }
    }

    if cfg.plot_path.is_some() {
        let pts = |f: &dyn Fn(&calibration::ComparisonRow) -> Option<f64>| -> Vec<(f64, f64)> {
            table.rows.iter().filter_map(|r| f(r).map(|y| (r.volume, y))).collect()
        };
        let mut theta_series = vec![
            Series::markers("measured", pts(&|r| Some(r.theta_meas_deg))),
            Series::line("theory (scale 0.001)", pts(&|r| r.theta_theory_deg)),
        ];
        if with_fit {
            theta_series.push(Series::line("fitted calibration", pts(&|r| r.theta_fitted_deg)));
        }
        write_plot(
            cfg,
            &[
                Panel {
                    title: "Contact angle: theory vs measurement".into(),
                    x_label: format!("pumped volume ({})", series.volume_unit_label),
                    y_label: "contact angle (deg)".into(),
                    series: theta_series,
                },
                Panel {
                    title: format!("Focal length: theory vs measurement (n = {})", cfg.index),
                    x_label: format!("pumped volume ({})", series.volume_unit_label),
                    y_label: "focal length (mm)".into(),
                    series: vec![
                        Series::markers("from measured angle", pts(&|r| r.f_meas_mm)),
                        Series::line("theory (scale 0.001)", pts(&|r| r.f_theory_mm)),
                    ],
                },
            ],
        )?;
    }

    let mut csv_notes = Vec::new();
    let stdout = match cfg.output_format {
        OutputFormat::Csv => {
            csv_notes = notes;
            let mut s = format!("{COMPARE_HEADER}\n");
            for r in &table.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.volume,
                    r.theta_meas_deg,
                    cell(r.theta_theory_deg, true),
                    cell(r.theta_fitted_deg, with_fit),
                    cell(r.f_meas_mm, true),
                    cell(r.f_theory_mm, true)
                );
            }
            s
        }
        OutputFormat::Table => {
            let fmt = |v: Option<f64>, prec: usize| v.map_or("NA".to_string(), |v| format!("{v:.prec$}"));
            let mut s = format!(
                "{:>8} {:>10} {:>11} {:>11} {:>9} {:>11}\n",
                "volume", "θ meas", "θ theory", "θ fitted", "f meas", "f theory"
            );
            for r in &table.rows {
                let fitted = if with_fit { fmt(r.theta_fitted_deg, 2) } else { "-".into() };
                let _ = writeln!(
                    s,
                    "{:>8} {:>10.2} {:>11} {:>11} {:>9} {:>11}",
                    r.volume,
                    r.theta_meas_deg,
                    fmt(r.theta_theory_deg, 2),
                    fitted,
                    fmt(r.f_meas_mm, 4),
                    fmt(r.f_theory_mm, 4)
                );
            }
            let _ = writeln!(s, "angles in deg, focal lengths in mm; theory uses scale 0.001 (pumped units read as 0.001 mm³)");
            if let Some(f) = &table.fitted {
                let _ = writeln!(
                    s,
                    "fitted calibration: scale {:.6e}, dead volume {:.4}, rms {:.2} deg",
                    f.scale, f.dead_volume, f.rms_residual
                );
            }
            for line in &notes {
                let _ = writeln!(s, "{line}");
            }
            s
        }
        OutputFormat::Json => json(&CompareReport {
            table: &table,
            endpoints: [&endpoints.0, &endpoints.1],
        }),
    };
    Ok(Report {
        stdout,
        warnings,
        notes: csv_notes,
    })
}
