use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use symphonic_cli::specfile::{builtin, SpecFile};
use symphonic_cli::table::parse_points;

fn symphonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symphonic")).args(args).env_remove("SYMPHONIC_SEED").output().expect("the binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn docs(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema: &str, instance: &Value) {
    let validator = jsonschema::validator_for(&docs(schema)).unwrap();
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema}: {errors:#?}");
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timing(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let cut = text.find("\"timing\"").expect("timing is present");
    text[..cut].to_string()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect::<Vec<_>>();
    let rows = parse_points(&lines.collect::<Vec<_>>().join("\n"), header.len()).unwrap();
    (header, rows)
}

fn write_spec(dir: &Path, name: &str) -> String {
    let spec = {
        let p = builtin(name).unwrap();
        SpecFile::from_problem(&p.map, &p.fields)
    };
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn unknown_case_is_a_usage_error() {
    let out = symphonic(&["verify", "--case", "nope"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown case"));
}

#[test]
fn sphere_case_passes() {
    let out = symphonic(&["verify", "--case", "sphere-inclusion-2"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("PASS sphere-inclusion-2"));
}

#[test]
fn help_documents_the_default_seed() {
    let out = symphonic(&["verify", "--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0x5EED"));
}

#[test]
fn verify_reports_validate_and_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = symphonic(&["verify", "--case", "power-curves", "--seed", "0x1234", "--json", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", stdout(&out));
    }
    let report = read_json(&a);
    assert_valid("report.schema.json", &report);
    assert_eq!(report["seed"], 0x1234);
    assert_eq!(report["cases"][0]["seed"], 0x1234);
    assert_eq!(without_timing(&a), without_timing(&b));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = Command::new(env!("CARGO_BIN_EXE_symphonic"))
        .args(["verify", "--case", "scalar-symphonic", "--json", path.to_str().unwrap()])
        .env("SYMPHONIC_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(&path)["seed"], 77);
}

#[test]
fn different_seeds_change_sample_points() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    symphonic(&["verify", "--case", "scalar-symphonic", "--seed", "1", "--json", a.to_str().unwrap()]);
    symphonic(&["verify", "--case", "scalar-symphonic", "--seed", "2", "--json", b.to_str().unwrap()]);
    assert_ne!(read_json(&a)["cases"][0]["checks"], read_json(&b)["cases"][0]["checks"]);
}

#[test]
fn huge_tolerance_scale_cannot_hide_negative_controls() {
    let out = symphonic(&["verify", "--case", "power-curves", "--tol-scale", "1e12"]);
    // Every control that would pass silently fails the case.
    let text = stdout(&out);
    assert!(text.contains("negative control"), "{text}");
    assert_eq!(code(&out), 1, "{text}");
}

#[test]
fn bad_tolerance_scale_is_a_usage_error() {
    assert_eq!(code(&symphonic(&["verify", "--tol-scale", "-1"])), 2);
}

#[test]
fn sphere_symphonic_tension_is_minus_two_position() {
    let out = symphonic(&["eval", "--spec", "builtin:sphere-2", "--op", "symphonic-tension", "--grid", "10"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["theta", "phi", "symphonic-tension[y1]", "symphonic-tension[y2]", "symphonic-tension[y3]"]);
    assert_eq!(rows.len(), 100);
    for r in rows {
        let (t, p) = (r[0], r[1]);
        let pos = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        for k in 0..3 {
            assert!((r[2 + k] + 2.0 * pos[k]).abs() < 1e-9, "{r:?}");
        }
    }
}

#[test]
fn linear_torus_bi_tension_vanishes() {
    let out = symphonic(&["eval", "--spec", "builtin:torus-linear", "--op", "bi-tension", "--grid", "6"]);
    assert_eq!(code(&out), 0);
    let (_, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| r[2..].iter().all(|v| v.abs() < 1e-12)));
}

#[test]
fn power_curve_bi_tension_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("t.txt");
    std::fs::write(&points, "t\n1\n").unwrap();
    let csv = dir.path().join("out.csv");
    let out = symphonic(&[
        "eval",
        "--spec",
        "builtin:power-curve:2",
        "--op",
        "bi-tension",
        "--points",
        points.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(header, ["t", "bi-tension[y]"]);
    // Three times the polynomial 2⁵·1·(132 − 178 + 60) = 448.
    assert!((rows[0][1] - 1344.0).abs() < 1e-9, "{rows:?}");
}

#[test]
fn energy_density_and_pullback_columns() {
    let out = symphonic(&["eval", "--spec", "builtin:annulus", "--op", "pullback", "--grid", "3"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header.len(), 2 + 4);
    for r in rows {
        // The flat embedding pulls back to dr² + r² dθ².
        assert!((r[2] - 1.0).abs() < 1e-12 && r[3].abs() < 1e-12 && (r[5] - r[0] * r[0]).abs() < 1e-12, "{r:?}");
    }
    let out = symphonic(&["eval", "--spec", "builtin:torus-linear", "--op", "energy-density", "--grid", "2"]);
    let (header, _) = csv_rows(&stdout(&out));
    assert_eq!(header, ["x1", "x2", "energy-density"]);
}

#[test]
fn jacobi_needs_a_field() {
    assert_eq!(code(&symphonic(&["eval", "--spec", "builtin:torus-test", "--op", "jacobi", "--grid", "4"])), 2);
    assert_eq!(code(&symphonic(&["eval", "--spec", "builtin:torus-test", "--op", "jacobi", "--field", "q", "--grid", "4"])), 2);
    let out = symphonic(&["eval", "--spec", "builtin:torus-test", "--op", "jacobi", "--field", "v", "--grid", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("x1,x2,jacobi[y1],jacobi[y2]"));
}

#[test]
fn grid_on_an_unbounded_chart_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "annulus");
    let mut spec = read_json(Path::new(&path));
    spec["source"].as_object_mut().unwrap().remove("domain");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = symphonic(&["eval", "--spec", &path, "--op", "tension", "--grid", "4"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--points"));
}

#[test]
fn points_outside_the_chart_give_nan_rows() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("p.txt");
    std::fs::write(&points, "0.5 1\n9 1\n").unwrap();
    let out = symphonic(&["eval", "--spec", "builtin:sphere-2", "--op", "tension", "--points", points.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(!lines[1].contains("NaN"));
    assert!(lines[2].ends_with("NaN,NaN,NaN"), "{}", lines[2]);
}

#[test]
fn missing_files_are_io_errors() {
    assert_eq!(code(&symphonic(&["eval", "--spec", "/nonexistent/spec.json", "--op", "tension", "--grid", "4"])), 3);
    let out = symphonic(&["verify", "--case", "scalar-symphonic", "--json", "/nonexistent/dir/r.json"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn spec_errors_name_the_offending_member() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "sphere-2");
    let mut spec = read_json(Path::new(&path));
    spec["map"]["components"][0] = Value::from("sin(q)");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = symphonic(&["eval", "--spec", &path, "--op", "tension", "--grid", "4"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/map/components/0") && err.contains("`q`"), "{err}");
}

#[test]
fn builtin_specs_validate_against_the_spec_schema() {
    for name in ["sphere-2", "sphere-4", "power-curve:4/3", "torus-test", "torus-linear", "torus-perturbed", "scalar-symphonic", "annulus"] {
        let spec = {
            let p = builtin(name).unwrap();
            SpecFile::from_problem(&p.map, &p.fields)
        };
        assert_valid("spec.schema.json", &serde_json::to_value(&spec).unwrap());
    }
}

#[test]
fn spec_files_on_disk_match_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "torus-test");
    let a = stdout(&symphonic(&["eval", "--spec", &path, "--op", "symphonic-tension", "--grid", "5"]));
    let b = stdout(&symphonic(&["eval", "--spec", "builtin:torus-test", "--op", "symphonic-tension", "--grid", "5"]));
    assert_eq!(a, b);
}

#[test]
fn first_variation_on_the_torus_test_map() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let out = symphonic(&["variation", "--spec", "builtin:torus-test", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = read_json(&json);
    assert_valid("report.schema.json", &report);
    assert!(report["results"]["variation"]["rel_discrepancy"].as_f64().unwrap() <= 1e-4);
    assert!(report["pass"].as_bool().unwrap());
}

#[test]
fn variation_at_a_symphonic_map_is_zero() {
    let out = symphonic(&["variation", "--spec", "builtin:torus-linear", "--field", "w"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn oversized_step_leaves_the_chart() {
    let out = symphonic(&["variation", "--spec", "builtin:sphere-2", "--grid", "4", "--fd-step", "10"]);
    // The sphere builtin carries no fields.
    assert_eq!(code(&out), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "annulus");
    let mut spec: Value = read_json(Path::new(&path));
    spec["target"]["domain"] = serde_json::json!({"intervals": [[-4, 4], [-4, 4]]});
    spec["fields"] = serde_json::json!([{"name": "v", "components": ["1", "0"]}]);
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = symphonic(&["variation", "--spec", &path, "--grid", "4", "--fd-step", "10"]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn flow_refuses_non_periodic_sources() {
    let out = symphonic(&["flow", "--spec", "builtin:annulus"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("periodic"));
}

#[test]
fn flow_from_a_symphonic_map_converges_immediately() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("f.json");
    let out = symphonic(&["flow", "--spec", "builtin:torus-linear", "--grid", "16", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = read_json(&json);
    assert_valid("report.schema.json", &report);
    assert_eq!(report["results"]["flow"]["steps"], 0);
    assert_eq!(report["results"]["flow"]["status"], "converged-symphonic");
}

#[test]
fn flow_budget_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (trace, json) = (dir.path().join("t.csv"), dir.path().join("f.json"));
    let args = [
        "flow",
        "--spec",
        "builtin:torus-perturbed",
        "--grid",
        "16",
        "--steps",
        "20",
        "--trace",
        trace.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ];
    let out = symphonic(&args);
    assert_eq!(code(&out), 1);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&trace).unwrap());
    assert_eq!(header, ["step", "epsilon", "E_sym", "max_tau_s_norm"]);
    assert_eq!(rows.len(), 21);
    assert!(rows.windows(2).all(|w| w[1][2] <= w[0][2]));
    let report = read_json(&json);
    assert_valid("report.schema.json", &report);
    assert_eq!(report["results"]["flow"]["monotone"], true);
    let again = dir.path().join("g.json");
    let mut args2 = args;
    args2[args2.len() - 1] = again.to_str().unwrap();
    symphonic(&args2);
    assert_eq!(without_timing(&json), without_timing(&again));
}

#[test]
fn bi_flow_trace_has_the_bi_energy_column() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = symphonic(&[
        "flow",
        "--spec",
        "builtin:torus-perturbed",
        "--grid",
        "8",
        "--steps",
        "3",
        "--energy",
        "bisym",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&trace).unwrap());
    assert_eq!(header.last().unwrap(), "E_2sym");
    assert!(rows.windows(2).all(|w| w[1][4] <= w[0][4]));
}

#[test]
fn flow_below_minimum_resolution_is_a_usage_error() {
    assert_eq!(code(&symphonic(&["flow", "--spec", "builtin:torus-perturbed", "--grid", "4"])), 2);
}
