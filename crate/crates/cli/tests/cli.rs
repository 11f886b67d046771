use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const FIVE_WIRE: &str = r#"{
  "ion": "Ca40",
  "drive": { "V0_volts": 100.0, "omega_rad_s": 188495559.21538758 },
  "layout": {
    "kind": "five_wire",
    "center_width_m": 1e-4,
    "rf_width_left_m": 5e-5,
    "rf_width_right_m": 5e-5,
    "outer_width_m": 2e-4,
    "length_m": 2e-3,
    "dc_voltages": { "dc_center": -1.0 }
  }
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paultrap")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn analyze_writes_json_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trap.json", FIVE_WIRE);
    let out = dir.path().join("metrics.json");
    let o = run(&["--config", s(&cfg), "--out", s(&out), "analyze", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("trap depth"));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(m["depth_ev"].as_f64().unwrap() > 0.0);
    assert!(m["theta_rad"].as_f64().unwrap().abs() < 1e-6);
    assert!(m["sampling_check"]["min_psi_j"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["sampling_check"]["negative"], 0);
}

#[test]
fn malformed_config_is_input_error_and_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{ \"ion\": ");
    let out = dir.path().join("metrics.json");
    let o = run(&["--config", s(&cfg), "--out", s(&out), "analyze"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let missing = run(&["--config", "/nonexistent/trap.json", "analyze"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown_field = write_config(dir.path(), "u.json", &FIVE_WIRE.replace("\"drive\"", "\"drives\""));
    assert_eq!(run(&["--config", s(&unknown_field), "analyze"]).status.code(), Some(2));
    let bad_geometry = write_config(dir.path(), "g.json", &FIVE_WIRE.replace("\"center_width_m\": 1e-4", "\"center_width_m\": -1e-4"));
    assert_eq!(run(&["--config", s(&bad_geometry), "analyze"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--bogus"]).status.code(), Some(2));
}

#[test]
fn zero_rf_amplitude_reports_zero_depth_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trap.json", &FIVE_WIRE.replace("\"V0_volts\": 100.0", "\"V0_volts\": 0.0"));
    let o = run(&["--config", s(&cfg), "analyze"]);
    if o.status.code() == Some(0) {
        let m: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(m["depth_ev"].as_f64().unwrap(), 0.0);
        assert!(m["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("zero")));
    } else {
        // Without rf there is no nil to locate; that is a physics failure, not bad input.
        assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn asymmetric_rf_rails_rotate_the_axes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trap.json", &FIVE_WIRE.replace("\"rf_width_right_m\": 5e-5", "\"rf_width_right_m\": 1e-4"));
    let o = run(&["--config", s(&cfg), "analyze"]);
    assert_eq!(o.status.code(), Some(0));
    let m: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(m["theta_rad"].as_f64().unwrap().abs().to_degrees() > 1.0);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trap.json", FIVE_WIRE);
    let analyze = |threads: &str| stdout(&run(&["--config", s(&cfg), "--threads", threads, "--seed", "7", "analyze", "--samples", "50"]));
    assert_eq!(analyze("1"), analyze("1"));
    assert_eq!(analyze("1"), analyze("3"));
    let map = |threads: &str| stdout(&run(&["--threads", threads, "stability-map", "--na", "7", "--nq", "9"]));
    assert_eq!(map("1"), map("4"));
    let scan = |threads: &str| {
        stdout(&run(&["--config", s(&cfg), "--threads", threads, "scan", "--param", "drive.V0_volts", "--values", "60,80,100,120"]))
    };
    assert_eq!(scan("1"), scan("2"));
}

#[test]
fn stability_map_grid_and_boundary() {
    let (header, rows) = csv_rows(&stdout(&run(&["stability-map", "--na", "2", "--nq", "2"])));
    assert_eq!(header, ["a", "q", "stable_x", "stable_y", "stable_overlap"]);
    assert_eq!(rows.len(), 4);

    let o = run(&["stability-map", "--a-min", "0", "--a-max", "0", "--na", "2", "--q-min", "0.85", "--q-max", "0.95", "--nq", "101"]);
    let (_, rows) = csv_rows(&stdout(&o));
    let last_stable = rows
        .iter()
        .filter(|r| r[0] == "0" && r[2] == "1")
        .map(|r| r[1].parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((last_stable - 0.908).abs() < 2e-3, "boundary at {last_stable}");

    assert_eq!(run(&["stability-map", "--na", "1"]).status.code(), Some(2));
    assert_eq!(run(&["stability-map", "--q-min", "1", "--q-max", "0"]).status.code(), Some(2));
}

#[test]
fn scan_over_amplitude_scales_depth_quadratically() {
    let dir = tempfile::tempdir().unwrap();
    let rf_only = FIVE_WIRE.replace("\"dc_center\": -1.0", "\"dc_center\": 0.0");
    let cfg = write_config(dir.path(), "trap.json", &rf_only);
    let o = run(&["--config", s(&cfg), "scan", "--param", "drive.V0_volts", "--values", "50,100,200"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header[0], "drive.V0_volts");
    let k = column(&header, "depth_j");
    let d: Vec<f64> = rows.iter().map(|r| r[k].parse().unwrap()).collect();
    assert!((d[1] / d[0] - 4.0).abs() < 1e-9 && (d[2] / d[0] - 16.0).abs() < 1e-9, "{d:?}");
}

#[test]
fn scan_keeps_going_past_a_failed_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trap.json", FIVE_WIRE);
    let o = run(&["--config", s(&cfg), "scan", "--param", "layout.rf_width_left_m", "--values", "4e-5,-1e-5,6e-5"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    let e = column(&header, "error");
    let k = column(&header, "depth_ev");
    assert_eq!(rows.len(), 3);
    assert!(rows[0][e].is_empty() && rows[2][e].is_empty());
    assert!(!rows[1][e].is_empty() && rows[1][k].is_empty());
    assert!(rows[0][k].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn scan_rejects_unresolvable_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trap.json", FIVE_WIRE);
    let out = dir.path().join("scan.csv");
    let o = run(&["--config", s(&cfg), "--out", s(&out), "scan", "--param", "layout.nope", "--values", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = run(&["--config", s(&cfg), "scan", "--param", "layout.aspect_ratio", "--values", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn two_layer_aspect_ratio_scan_increases_efficiency_towards_wide_plates() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"ion":"Ca40","drive":{"V0_volts":200.0,"omega_rad_s":1.885e8},"layout":{"kind":"two_layer","w_m":4e-4,"d_m":1e-4}}"#;
    let cfg = write_config(dir.path(), "two.json", text);
    let o = run(&["--config", s(&cfg), "scan", "--param", "layout.aspect_ratio", "--values", "1,2,4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    let k = column(&header, "eta");
    let eta: Vec<f64> = rows.iter().map(|r| r[k].parse().unwrap()).collect();
    assert!(eta.windows(2).all(|w| w[1] < w[0]), "{eta:?}");
}

#[test]
fn trajectory_from_hyperbolic_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"ion":"Ca40","drive":{"V0_volts":250.0,"omega_rad_s":6.283185307179586e7},"layout":{"kind":"hyperbolic","r0_m":1e-3}}"#;
    let cfg = write_config(dir.path(), "h.json", text);
    let out = dir.path().join("t.csv");
    let o = run(&["--config", s(&cfg), "--out", s(&out), "trajectory", "--periods", "20", "--sample-every", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bounded"));
    let (header, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["t_s", "x_m", "y_m", "z_m", "vx", "vy", "vz"]);
    assert_eq!(rows.len(), 201);
    let xmax = rows.iter().map(|r| r[1].parse::<f64>().unwrap().abs()).fold(0.0, f64::max);
    assert!(xmax < 2e-6, "{xmax}");

    let coarse = run(&["--config", s(&cfg), "trajectory", "--steps-per-period", "20"]);
    assert_eq!(coarse.status.code(), Some(2));
    let unstable = write_config(dir.path(), "u.json", &text.replace("250.0", "1000.0"));
    let o = run(&["--config", s(&unstable), "--out", s(&out), "trajectory", "--periods", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("diverged"));
}

#[test]
fn heating_and_dissipation() {
    let o = run(&["heating", "--omega-m", "6.283e6", "--omega-rf", "1.885e8", "--s-e", "1e-12"]);
    assert_eq!(o.status.code(), Some(0));
    let h: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(h["ndot"].as_f64().unwrap() > 0.0);
    assert_eq!(run(&["heating", "--omega-m", "2e8", "--omega-rf", "1e8", "--s-e", "1e-12"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let m = write_config(dir.path(), "m.csv", "d_m,omega_rad_s,S_E_V2m2Hz\n1e-4,1e6,1e-10\n2e-4,1e6,6.25e-12\n4e-4,1e6,3.90625e-13\n");
    let fit: Value = serde_json::from_str(&stdout(&run(&["heating", "--measurements", s(&m)]))).unwrap();
    assert!((fit["exponent"].as_f64().unwrap() + 4.0).abs() < 1e-9);
    let bad = write_config(dir.path(), "b.csv", "distance,S\n1,2\n");
    assert_eq!(run(&["heating", "--measurements", s(&bad)]).status.code(), Some(2));

    let args = ["dissipation", "--v0", "100", "--omega", "2.199114857512855e8", "--capacitance", "1e-11", "--resistance", "1"];
    let o = run(&[&args[..], &["--tan-delta", "0.01"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let p: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(p["power"]["full_w"].as_f64().unwrap() > 0.0);
    assert!(p.get("breakdown").is_none());
    let o = run(&[&args[..], &["--material", "Rogers 4350B", "--e-ref", "3e7", "--d-ref", "1e-3", "--gap", "1e-4"]].concat());
    let p: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(p["breakdown"]["surface_v"].as_f64().unwrap() < p["breakdown"]["bulk_v"].as_f64().unwrap());
    assert_eq!(run(&[&args[..], &["--material", "unobtainium"]].concat()).status.code(), Some(2));
    assert_eq!(run(&args).status.code(), Some(2));
}
