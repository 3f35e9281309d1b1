//! End-to-end tests of the command-line interface: output formats, exit
//! codes and the stability guarantees of the file outputs.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lattice-energy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn energy_reproduces_the_quoted_union3_value() {
    let out = run(&[
        "energy",
        "union3:1/3,1/3;2/3,2/3",
        "--alpha",
        "3.5",
        "--pi-scaled",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.18279).abs() < 5e-5, "value {value}");
    assert!(v["trunc_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["pi_scaled"], serde_json::json!(true));
}

#[test]
fn energy_decays_for_sharp_gaussians() {
    let out = run(&["energy", "hexagonal@1", "--alpha", "1e6", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["value"].as_f64().unwrap() < 1e-100);
}

#[test]
fn agm_and_direct_paths_agree_from_the_cli() {
    let direct = run(&[
        "energy", "honeycomb", "--alpha", "1", "--pi-scaled", "--path", "direct", "--json",
    ]);
    let agm = run(&[
        "energy", "honeycomb", "--alpha", "1", "--pi-scaled", "--path", "agm", "--json",
    ]);
    assert!(direct.status.success() && agm.status.success());
    let d: serde_json::Value = serde_json::from_str(stdout(&direct).trim()).unwrap();
    let a: serde_json::Value = serde_json::from_str(stdout(&agm).trim()).unwrap();
    let gap = (d["value"].as_f64().unwrap() - a["value"].as_f64().unwrap()).abs();
    let budget = d["trunc_error"].as_f64().unwrap() + a["trunc_error"].as_f64().unwrap();
    assert!(gap <= budget.max(1e-10), "gap {gap}");
    assert_eq!(a["path"], serde_json::json!("agm"));
}

#[test]
fn parse_errors_exit_2() {
    let out = run(&["energy", "nonsense", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "energy",
        r#"{"dimension":2,"basis":[[1.0,1.0],[2.0,2.0]]}"#,
        "--alpha",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unattainable_tolerance_exits_3() {
    let out = run(&["energy", "square", "--alpha", "1", "--tol", "1e-20"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("convergence"), "stderr: {err}");
}

#[test]
fn sweep_is_bit_stable_and_margins_are_positive() {
    let args = [
        "sweep",
        "hexagonal@1",
        "honeycomb",
        "--alpha-grid",
        "0.5:50:12:log",
        "--pi-scaled",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.to_string())
            .collect()
    };
    // identical data rows across runs; only the '#' metadata carries a timestamp
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
    let rows = strip(&stdout(&a));
    assert_eq!(rows.len(), 13); // header + 12 rows
    assert!(rows[0].starts_with("alpha,"));
    assert!(rows[0].ends_with("margin[honeycomb]"));
    for row in &rows[1..] {
        let margin: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(margin > 0.0, "row {row}");
    }
}

#[test]
fn single_config_sweep_matches_energy_command() {
    let sweep = run(&["sweep", "square", "--alpha-grid", "2:2:1", "--tol", "1e-12"]);
    assert!(sweep.status.success());
    let binding = stdout(&sweep);
    let row = binding
        .lines()
        .find(|l| !l.starts_with('#') && !l.starts_with("alpha"))
        .unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let sweep_value: f64 = fields[1].parse().unwrap();
    let energy = run(&["energy", "square", "--alpha", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&energy).trim()).unwrap();
    assert_eq!(sweep_value, v["value"].as_f64().unwrap());
}

#[test]
fn optimize_targets_produce_expected_minima() {
    let out = run(&["optimize", "union2", "--lattice", "square", "--alpha", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let c = v["argmin_basis_coords"].as_array().unwrap();
    assert!((c[0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((c[1].as_f64().unwrap() - 0.5).abs() < 1e-6);

    let out = run(&["optimize", "union2", "--lattice", "hexagonal", "--alpha", "1"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let c = v["argmin_basis_coords"].as_array().unwrap();
    let x = c[0].as_f64().unwrap();
    assert!((x - 1.0 / 3.0).abs() < 1e-6 || (x - 2.0 / 3.0).abs() < 1e-6);

    let out = run(&["optimize", "1d", "--n", "3", "--alpha", "1"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    for gap in v["gaps"].as_array().unwrap() {
        assert!((gap.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-6);
    }
}

#[test]
fn curves_outputs_csv_and_svg() {
    let dir = std::env::temp_dir().join("lattice_energy_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("curves.csv");
    let svg_path = dir.join("curves.svg");
    let out = run(&[
        "curves",
        "--alpha",
        "2",
        "--grid",
        "256",
        "--out-csv",
        csv_path.to_str().unwrap(),
        "--out-svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.contains("# intersections=4"));
    assert!(csv.contains("x1,x2,curve,chain"));
    // intersections include (1/3, 1/3)
    let has_third = csv
        .lines()
        .filter(|l| l.starts_with("# intersection:"))
        .any(|l| {
            let coords = l.trim_start_matches("# intersection:").trim();
            let xy: Vec<&str> = coords.split_whitespace().next().unwrap().split(',').collect();
            let x: f64 = xy[0].parse().unwrap();
            let y: f64 = xy[1].parse().unwrap();
            (x - 1.0 / 3.0).abs() < 1e-6 && (y - 1.0 / 3.0).abs() < 1e-6
        });
    assert!(has_third, "missing (1/3,1/3) in:\n{csv}");
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("class=\"intersection\"").count(), 4);

    // inside the extra-crossing window the metadata carries a note
    let out = run(&[
        "curves",
        "--alpha",
        "3.0",
        "--grid",
        "256",
        "--out-csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.contains("# intersections=12"));
    assert!(csv.contains("differs from the generic four"));
}

#[test]
fn curves_json_output_parses() {
    let out = run(&["curves", "--alpha", "2", "--grid", "128", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["intersections"].as_array().unwrap().len(), 4);
    assert!(!v["c1"].as_array().unwrap().is_empty());
}

#[test]
fn render_emits_both_marker_classes() {
    let dir = std::env::temp_dir().join("lattice_energy_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let svg_path = dir.join("honeycomb.svg");
    let out = run(&[
        "render",
        "honeycomb",
        "--radius",
        "2.5",
        "--out-svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.contains(r#"data-class="0""#));
    assert!(svg.contains(r#"data-class="1""#));

    // square lattice within radius 1.1: the origin and its four neighbors
    let svg_path = dir.join("square.svg");
    let out = run(&[
        "render",
        "square",
        "--radius",
        "1.1",
        "--out-svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("<circle").count(), 5);
}

#[test]
fn verify_coarse_run_passes_and_writes_schema_conformant_report() {
    let dir = std::env::temp_dir().join("lattice_energy_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let report_path = dir.join("report.json");
    let out = run(&[
        "verify",
        "--tol",
        "1e-6",
        "--grid-points",
        "40",
        "--curve-grid",
        "128",
        "--report",
        report_path.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "verify output:\n{text}");
    assert!(text.contains("PASS"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["all_pass"], serde_json::json!(true));
    for check in report["checks"].as_array().unwrap() {
        assert!(check["name"].is_string());
        assert!(check["worst_margin"].is_number());
        assert!(check["error_budget"].is_number());
        assert!(check["pass"].is_boolean());
    }
}

#[test]
fn thread_cap_env_var_is_honored() {
    let out = bin()
        .env("LATTICE_ENERGY_THREADS", "1")
        .args(["sweep", "square", "hexagonal@1", "--alpha-grid", "0.5:4:6:log"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 7);
}

#[test]
fn verify_with_impossible_tolerance_exits_3() {
    let out = run(&[
        "verify",
        "--tol",
        "1e-20",
        "--grid-points",
        "10",
        "--curve-grid",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(3), "output:\n{}", stdout(&out));
    assert!(stdout(&out).contains("error:"));
}
