use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_liquilens");

fn liquilens(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("LIQUILENS_CONFIG").output().unwrap()
}

fn with_config(config: &Path, args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("LIQUILENS_CONFIG", config).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Second line of a two-line CSV, split into numbers.
fn csv_row(o: &Output) -> Vec<f64> {
    let text = stdout(o);
    let row = text.lines().nth(1).unwrap();
    row.split(',').map(|c| c.parse().unwrap()).collect()
}

#[test]
fn forward_then_inverse_round_trips() {
    for v in [0.05, 0.2, 0.7, 1.4, 2.0] {
        let fwd = liquilens(&["--format", "csv", "forward", "--volume", &v.to_string()]);
        assert_eq!(fwd.status.code(), Some(0));
        let focal = csv_row(&fwd)[4];
        let inv = liquilens(&["--format", "csv", "inverse", "--focal", &focal.to_string()]);
        assert_eq!(inv.status.code(), Some(0));
        let back = csv_row(&inv)[1];
        assert!((back - v).abs() / v < 1e-6, "{v} -> {focal} -> {back}");
    }
}

#[test]
fn forward_table_values() {
    let o = liquilens(&["forward", "--volume", "1.4"]);
    let text = stdout(&o);
    assert!(text.contains("sag             0.7504 mm"), "{text}");
    assert!(text.contains("contact angle   73.77 deg"));
    assert!(text.contains("focal length    3.1561 mm"));
}

#[test]
fn pump_units_match_direct_volume() {
    let direct = liquilens(&["--format", "csv", "forward", "--volume", "0.7"]);
    let pumped = liquilens(&["--format", "csv", "forward", "--volume", "800", "--pump-units", "--dead-volume", "100"]);
    assert_eq!(pumped.status.code(), Some(0));
    for (a, b) in csv_row(&direct).iter().zip(csv_row(&pumped)) {
        assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
    }
    assert!(stderr(&pumped).contains("effective cap volume 0.7"));
}

#[test]
fn scale_without_pump_units_is_usage_error() {
    assert_eq!(liquilens(&["forward", "--volume", "1", "--scale", "2"]).status.code(), Some(1));
}

#[test]
fn rounded_hemisphere_volume_is_accepted() {
    let o = liquilens(&["--format", "csv", "forward", "--volume", "2.0944"]);
    assert_eq!(o.status.code(), Some(0));
    let row = csv_row(&o);
    assert!((row[3] - 90.0).abs() < 1e-9);
    assert!(stderr(&o).contains("hemisphere"));
    assert_eq!(liquilens(&["forward", "--volume", "2.2"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_2_with_library_message() {
    let o = liquilens(&["forward", "--volume", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds hemispherical regime"));

    let o = liquilens(&["inverse", "--focal", "3.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unreachable focal length"));

    assert_eq!(liquilens(&["--index", "1.0", "forward", "--volume", "1"]).status.code(), Some(2));
    assert_eq!(liquilens(&["curve", "--f-min", "12", "--f-max", "4"]).status.code(), Some(2));
    assert_eq!(liquilens(&["--f-number", "0", "trace", "--volume", "1"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(liquilens(&[]).status.code(), Some(1));
    assert_eq!(liquilens(&["forward"]).status.code(), Some(1));
    assert_eq!(liquilens(&["--format", "xml", "forward", "--volume", "1"]).status.code(), Some(1));
    assert_eq!(liquilens(&["compare"]).status.code(), Some(1));
    assert_eq!(liquilens(&["--help"]).status.code(), Some(0));
    assert_eq!(liquilens(&["--version"]).status.code(), Some(0));
}

#[test]
fn curve_csv_layout() {
    let o = liquilens(&["--format", "csv", "curve", "--f-min", "3.95", "--f-max", "9.69", "--steps", "10"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("focal_mm,volume_mm3,contact_angle_deg,radius_mm,sag_mm"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0][0], 3.95);
    assert_eq!(rows[9][0], 9.69);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]), "volume decreases with focal length");
}

#[test]
fn trace_reports_overfill_warning_but_succeeds() {
    let o = liquilens(&["trace", "--volume", "0.2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("pupil exceeds lens rim"));
    assert!(stdout(&o).contains("CoLC diameter"));

    let clamped = liquilens(&["trace", "--volume", "0.2", "--clamp-to-rim"]);
    assert!(!stderr(&clamped).contains("pupil exceeds lens rim"));
}

#[test]
fn trace_json_is_valid() {
    let o = liquilens(&["--format", "json", "trace", "--volume", "1.4", "--rays", "51"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rays_traced"], 51);
    let colc = v["colc_diameter_um"].as_f64().unwrap();
    assert!(colc > 20.0 && colc < 40.0, "{colc}");
}

#[test]
fn malformed_header_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    std::fs::write(&path, "volume;contact_angle_deg\n200;14.25\n").unwrap();
    let o = liquilens(&["fit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("header"));
}

#[test]
fn bad_row_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    std::fs::write(&path, "volume,contact_angle_deg\n200,14.25\n400,abc\n").unwrap();
    let o = liquilens(&["compare", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('3'), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_2() {
    assert_eq!(liquilens(&["fit", "/nonexistent/data.csv"]).status.code(), Some(2));
}

#[test]
fn exported_sample_matches_embedded_results() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    assert_eq!(liquilens(&["fit", "--sample", "--export-sample", path.to_str().unwrap()]).status.code(), Some(0));
    let from_file = liquilens(&["--format", "csv", "fit", path.to_str().unwrap()]);
    let embedded = liquilens(&["--format", "csv", "fit", "--sample"]);
    assert_eq!(from_file.stdout, embedded.stdout);
    let row = csv_row(&embedded);
    assert!((row[2] - 0.9944874889541282).abs() < 1e-12);
}

#[test]
fn compare_csv_columns_and_no_fit() {
    let o = liquilens(&["--format", "csv", "compare", "--sample", "--no-fit"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("volume,theta_meas_deg,theta_theory_deg,theta_fitted_deg,f_meas_mm,f_theory_mm")
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "200");
    assert_eq!(first[3], "");
    assert!(stderr(&o).contains("NOT reproducible"));

    let fitted = liquilens(&["--format", "csv", "compare", "--sample"]);
    let text = stdout(&fitted);
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(first[3].parse::<f64>().is_ok());
}

#[test]
fn compare_marks_unreachable_rows_na() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.csv");
    std::fs::write(&path, "volume,contact_angle_deg\n200,14.25\n3000,60\n").unwrap();
    let o = liquilens(&["--format", "csv", "compare", path.to_str().unwrap(), "--no-fit"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[2], "NA");
    assert_eq!(row[5], "NA");
}

#[test]
fn compare_json_includes_endpoints() {
    let o = liquilens(&["--format", "json", "compare", "--sample"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let low = &v["endpoints"][1];
    assert_eq!(low["within_tolerance"], false);
    assert!(low["index_to_match"].as_f64().unwrap() > 1.41);
    assert_eq!(v["table"]["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("lens.toml");
    std::fs::write(&config, "diameter = 4.0\nformat = \"csv\"\n").unwrap();

    let from_file = with_config(&config, &["forward", "--volume", "1"]);
    assert_eq!(from_file.status.code(), Some(0));
    let row = csv_row(&from_file);
    let flagged = liquilens(&["--format", "csv", "--diameter", "4", "forward", "--volume", "1"]);
    assert_eq!(row, csv_row(&flagged));

    let overridden = with_config(&config, &["--diameter", "2", "forward", "--volume", "1"]);
    let default = liquilens(&["--format", "csv", "forward", "--volume", "1"]);
    assert_eq!(csv_row(&overridden), csv_row(&default));
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("lens.toml");
    std::fs::write(&config, "diametre = 4.0\n").unwrap();
    assert_eq!(with_config(&config, &["forward", "--volume", "1"]).status.code(), Some(1));
    let missing = dir.path().join("none.toml");
    assert_eq!(with_config(&missing, &["forward", "--volume", "1"]).status.code(), Some(1));
}

#[test]
fn plots_are_deterministic_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["curve", "--f-min", "3.5", "--f-max", "12"],
        &["trace", "--volume", "1.4"],
        &["fit", "--sample"],
        &["compare", "--sample"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a = dir.path().join(format!("{i}a.svg"));
        let b = dir.path().join(format!("{i}b.svg"));
        for p in [&a, &b] {
            let mut full = vec!["--plot", p.to_str().unwrap()];
            full.extend_from_slice(args);
            assert_eq!(liquilens(&full).status.code(), Some(0), "{args:?}");
        }
        let svg = std::fs::read_to_string(&a).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("NaN"));
        assert_eq!(svg, std::fs::read_to_string(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn unwritable_plot_path_exits_2() {
    let o = liquilens(&["--plot", "/nonexistent/dir/p.svg", "curve", "--f-min", "4", "--f-max", "9"]);
    assert_eq!(o.status.code(), Some(2));
}
