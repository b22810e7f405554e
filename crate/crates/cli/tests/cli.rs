use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nfg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nfg"))
        .args(args)
        .env_remove("NFG_DUAL_BUDGET")
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn re(table: &Value) -> Vec<f64> {
    table["re"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn model_reports_triangle_scale_factor() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        &dir,
        "tri.json",
        r#"{"schema_version": 1, "family": "ising", "topology": {"ring": {"n": 3}}, "couplings": 0.5, "fields": 0.1}"#,
    );
    let v = json_of(&nfg(&["model", "--spec", &spec]));
    assert_eq!(v["alpha"], 2);
    assert_eq!(v["graph"]["betti"], 1);
    assert_eq!(v["duality_scale"], 8.0);
}

#[test]
fn dual_tables_of_potts_and_clock_edges() {
    let dir = TempDir::new().unwrap();
    let j: f64 = 0.7;
    let potts = write_spec(
        &dir,
        "potts.json",
        r#"{"schema_version": 1, "family": "potts", "q": 3, "topology": {"path": {"n": 2}}, "couplings": 0.7}"#,
    );
    let v = json_of(&nfg(&["model", "--spec", &potts]));
    let dual = re(&v["dual"]["edge_factors"][0]);
    let expected = [j.exp() - 1.0 + 3.0, j.exp() - 1.0, j.exp() - 1.0];
    for (a, b) in dual.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }

    let clock = write_spec(
        &dir,
        "clock.json",
        r#"{"schema_version": 1, "family": "clock", "q": 4, "topology": {"path": {"n": 2}}, "couplings": 0.7}"#,
    );
    let v = json_of(&nfg(&["model", "--spec", &clock]));
    let dual = re(&v["dual"]["edge_factors"][0]);
    let expected = [2.0 * (j.cosh() + 1.0), 2.0 * j.sinh(), 2.0 * (j.cosh() - 1.0), 2.0 * j.sinh()];
    for (a, b) in dual.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn exact_matches_ring_closed_form_and_prints_residual() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        &dir,
        "ring.json",
        r#"{"schema_version": 1, "family": "ising", "topology": {"ring": {"n": 6}}, "couplings": [0.3, 0.9, 1.4, 0.2, 0.6, 1.1]}"#,
    );
    let v = json_of(&nfg(&["exact", "--spec", &spec]));
    assert!(v["closed_form_max_error"].as_f64().unwrap() < 1e-12);
    assert!(v["duality_residual"].as_f64().unwrap() < 1e-10);
    assert!(v["duality_residual_alpha"].as_f64().unwrap() > 0.5);
}

#[test]
fn oversize_models_are_refused_with_guidance() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        &dir,
        "big.json",
        r#"{"schema_version": 1, "family": "ising", "topology": {"grid": {"rows": 6, "cols": 6, "periodic": true}}, "couplings": 0.3}"#,
    );
    let out = nfg(&["exact", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NFG_DUAL_BUDGET"));
}

#[test]
fn spec_errors_exit_with_code_four() {
    let dir = TempDir::new().unwrap();
    let bad = write_spec(&dir, "bad.json", r#"{"schema_version": 1, "family": "potts", "topology": {"ring": {"n": 3}}, "couplings": 0.3}"#);
    assert_eq!(nfg(&["model", "--spec", &bad]).status.code(), Some(4));
    let garbled = write_spec(&dir, "garbled.json", "{ not json");
    assert_eq!(nfg(&["exact", "--spec", &garbled]).status.code(), Some(4));
    assert_eq!(nfg(&["bp"]).status.code(), Some(4));
    let gaussian = write_spec(
        &dir,
        "g.json",
        r#"{"schema_version": 1, "family": "gaussian", "topology": {"ring": {"n": 4}}, "gaussian": {"s": 1.0, "sigma": 2.0}}"#,
    );
    assert_eq!(nfg(&["bp", "--spec", &gaussian]).status.code(), Some(4));
}

#[test]
fn bp_sampler_and_map_commands() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        &dir,
        "grid.json",
        r#"{"schema_version": 1, "family": "ising", "topology": {"grid": {"rows": 3, "cols": 3, "periodic": true}},
            "couplings": 0.3, "fields": 0.2}"#,
    );
    let exact = json_of(&nfg(&["exact", "--spec", &spec]));
    let p0 = re(&exact["primal"]["edges"][0])[0];

    let bp = json_of(&nfg(&["bp", "--spec", &spec, "--damping", "0.3", "--tol", "1e-10"]));
    assert_eq!(bp["primal"]["converged"], true);
    assert!((re(&bp["dual_mapped"]["edges"][0])[0] - re(&bp["primal"]["edges"][0])[0]).abs() < 1e-6);

    for cmd in ["gibbs", "swp"] {
        let v = json_of(&nfg(&[cmd, "--spec", &spec, "--samples", "20000", "--seed", "3"]));
        assert!((re(&v["via_dual"]["mapped"]["edges"][0])[0] - p0).abs() < 3e-2, "{cmd}");
    }

    let map = json_of(&nfg(&["map", "--spec", &spec]));
    assert!(map["max_abs_error"].as_f64().unwrap() < 1e-10);
    assert!(map["edges"][0]["lower_bounds"]["primal"].as_f64().unwrap() <= p0);
}

#[test]
fn swp_refuses_antiferromagnets() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        &dir,
        "af.json",
        r#"{"schema_version": 1, "family": "ising", "topology": {"ring": {"n": 4}}, "couplings": -0.3, "fields": 0.2}"#,
    );
    let out = nfg(&["swp", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn gaussian_command_agrees_across_routes() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        &dir,
        "g.json",
        r#"{"schema_version": 1, "family": "gaussian", "topology": {"grid": {"rows": 4, "cols": 4, "periodic": true}},
            "gaussian": {"s": 2.0, "sigma": 3.0}}"#,
    );
    let v = json_of(&nfg(&["gaussian", "--spec", &spec, "--samples", "200"]));
    let (a, b) = (&v["exact"], &v["exact_via_dual"]);
    for k in 0..16 {
        assert!((a[k].as_f64().unwrap() - b[k].as_f64().unwrap()).abs() < 1e-10);
    }
    assert_eq!(v["gibbs_primal"].as_array().unwrap().len(), 16);
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

fn cell(header: &[String], row: &[String], name: &str) -> f64 {
    let k = header.iter().position(|h| h == name).unwrap();
    row[k].parse().unwrap()
}

fn marked_row<'a>(header: &[String], rows: &'a [Vec<String>], marker: &str) -> &'a [String] {
    let k = header.iter().position(|h| h == "marker").unwrap();
    rows.iter().find(|r| r[k] == marker).unwrap()
}

#[test]
fn bounds_experiment_writes_csv_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bounds.csv");
    let o = nfg(&["experiment", "fig-bounds", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&out);
    let row = marked_row(&header, &rows, "ising_critical");
    let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    assert!((cell(&header, row, "ising_primal_bound") - half_sqrt2).abs() < 1e-12);
    assert!((cell(&header, row, "ising_dual_bound") - half_sqrt2).abs() < 1e-12);
    assert!((cell(&header, row, "ising_fixed_point") - 0.853553).abs() < 1e-6);

    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bounds.csv.columns.json")).unwrap()).unwrap();
    let names: Vec<&str> = side["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, header.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(side["experiment"], "fig-bounds");
}

#[test]
fn fixed_point_experiment_marks_potts_criticality() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fp.csv");
    assert!(nfg(&["experiment", "fig-fixed-points", "--out", out.to_str().unwrap()]).status.success());
    let (header, rows) = read_csv(&out);
    let row = marked_row(&header, &rows, "potts3_critical");
    assert_eq!(format!("{:.3}", cell(&header, row, "beta_j")), "1.005");
    assert_eq!(format!("{:.4}", cell(&header, row, "potts3_p0")), "0.7887");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
}

#[test]
fn gaussian_experiment_exact_column() {
    let o = nfg(&["experiment", "fig-gaussian", "--samples", "20"]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows: Vec<Vec<String>> = r.records().map(|x| x.unwrap().iter().map(str::to_owned).collect()).collect();
    let at40: Vec<&Vec<String>> = rows.iter().filter(|r| cell(&header, r, "s") == 40.0).collect();
    assert_eq!(at40.len(), 5);
    assert_eq!(format!("{:.4}", cell(&header, at40[0], "exact")), "23.5498");
}

#[test]
fn experiments_are_reproducible_and_seeded() {
    let run = |seed: &str| nfg(&["experiment", "fig-ising-fully", "--quick", "--seed", seed]).stdout;
    let a = run("5");
    assert!(!a.is_empty());
    assert_eq!(a, run("5"));
    assert_ne!(a, run("6"));
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let o = nfg(&["experiment", "fig-nothing"]);
    assert!(!o.status.success());
}

fn docs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs")
}

#[test]
fn shipped_specs_load_and_schema_matches() {
    for entry in std::fs::read_dir(docs().join("specs")).unwrap() {
        let path = entry.unwrap().path();
        let spec = nfg_cli::spec::ModelSpec::from_file(&path).unwrap();
        spec.build().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(docs().join("model-spec.schema.json")).unwrap()).unwrap();
    assert_eq!(schema["properties"]["schema_version"]["const"], nfg_cli::spec::SCHEMA_VERSION);
    let mut props: Vec<&str> = schema["properties"].as_object().unwrap().keys().map(String::as_str).collect();
    props.sort_unstable();
    assert_eq!(props, ["couplings", "family", "fields", "gaussian", "q", "schema_version", "topology"]);
    let topologies: Vec<&str> = schema["$defs"]["topology"]["properties"].as_object().unwrap().keys().map(String::as_str).collect();
    for t in &topologies {
        let text = match *t {
            "grid" => r#"{"rows": 2, "cols": 2, "periodic": false}"#,
            "edge_list" => r#"{"num_vertices": 2, "edges": [[0, 1]]}"#,
            _ => r#"{"n": 3}"#,
        };
        let spec = format!(r#"{{"schema_version": 1, "family": "ising", "topology": {{"{t}": {text}}}, "couplings": 0.1}}"#);
        nfg_cli::spec::ModelSpec::from_json(&spec).unwrap_or_else(|e| panic!("{t}: {e}"));
    }
    assert_eq!(topologies.len(), 5);
}
