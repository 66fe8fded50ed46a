use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diracfem"))
        .args(args)
        .current_dir(dir)
        .env_remove("DIRACFEM_THREADS")
        .output()
        .expect("spawn diracfem")
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().expect("stdout line")).expect("stdout JSON")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn mesh_gen_square_counts() {
    let dir = TempDir::new().unwrap();
    let out = run(&["mesh", "gen", "--domain", "square", "--res", "2", "--out", "sq"], dir.path());
    assert_ok(&out);
    let report = stdout_json(&out);
    assert_eq!(report["vertices"], 9);
    assert_eq!(report["triangles"], 8);
    let node = fs::read_to_string(dir.path().join("sq.node")).unwrap();
    let ele = fs::read_to_string(dir.path().join("sq.ele")).unwrap();
    assert!(node.trim_start().starts_with("9 2"));
    assert!(ele.trim_start().starts_with("8 3"));
}

#[test]
fn solve_then_errors_on_a_stored_mesh() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run(&["mesh", "gen", "--domain", "disk", "--res", "8", "--out", "disk"], dir.path()));
    let solve = run(
        &[
            "solve", "--mesh", "disk.node", "--k", "2", "--rhs", "dirac", "--x0", "0,0", "--bc", "exact",
            "--out", "sol.json",
        ],
        dir.path(),
    );
    assert_ok(&solve);
    assert!(stdout_json(&solve)["relative_residual"].as_f64().unwrap() <= 1e-12);

    let errors = run(
        &[
            "errors", "--sol", "sol.json", "--exclude-r", "0.2", "--norms", "l2,h1semi,h1", "--field",
            "field.csv", "--out", "report.json",
        ],
        dir.path(),
    );
    assert_ok(&errors);
    let report = stdout_json(&errors);
    let h1 = report["values"]["h1"].as_f64().unwrap();
    let l2 = report["values"]["l2"].as_f64().unwrap();
    assert!(h1 > 0.0 && h1 < 0.05, "{report}");
    assert!(l2 < h1);
    let field = fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert_eq!(field.lines().next(), Some("elem,xc,yc,err2"));
    assert!(field.contains("nan"), "the element at the source has no finite error");
    let stored: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(stored, report);
}

#[test]
fn ball_solve_with_auto_radius() {
    let dir = TempDir::new().unwrap();
    let out = run(
        &[
            "solve", "--domain", "square", "--res", "8", "--k", "1", "--rhs", "ball", "--x0", "0.50314,0.49717",
            "--eps", "auto", "--out", "ball.json",
        ],
        dir.path(),
    );
    assert_ok(&out);
    let report = stdout_json(&out);
    assert_eq!(report["source"]["kind"], "ball");
    assert_eq!(report["source"]["contained"], true);
}

#[test]
fn study_conv_disk_k1_order() {
    let dir = TempDir::new().unwrap();
    let config = r#"{
        "domain": "disk", "x0": [0, 0], "orders": [1], "levels": [10, 15, 20, 30],
        "rhs": "dirac", "bc": "exact-data",
        "omega0": {"kind": "annulus", "center": [0, 0], "r_inner": 0.2, "r_outer": 1.0},
        "omega1": {"kind": "annulus", "center": [0, 0], "r_inner": 0.1, "r_outer": 1.0},
        "norms": ["h1", "l2"]
    }"#;
    fs::write(dir.path().join("disk_p1.json"), config).unwrap();
    let args = ["study", "conv", "--config", "disk_p1.json", "--out", "table.csv", "--json", "table.json"];
    let out = run(&args, dir.path());
    assert_ok(&out);
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(csv.starts_with("level,h_max,dofs,norm,value"));
    let fit = csv
        .lines()
        .find(|l| l.starts_with("# fit") && l.contains("norm=h1"))
        .expect("h1 fit line");
    let slope: f64 = fit
        .split_whitespace()
        .find_map(|w| w.strip_prefix("slope="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.85..=1.15).contains(&slope), "{fit}");
    let mirror: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("table.json")).unwrap()).unwrap();
    assert_eq!(mirror["config"]["levels"], serde_json::json!([10, 15, 20, 30]));

    // identical flags give identical bytes
    assert_ok(&run(&["study", "conv", "--config", "disk_p1.json", "--out", "again.csv"], dir.path()));
    assert_eq!(csv, fs::read_to_string(dir.path().join("again.csv")).unwrap());
}

#[test]
fn study_1d_orders() {
    let dir = TempDir::new().unwrap();
    let out = run(&["study", "1d", "--out", "one_d.csv"], dir.path());
    assert_ok(&out);
    let report = stdout_json(&out);
    let h1 = report["h1_order"].as_f64().unwrap();
    let l2 = report["l2_order"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&h1));
    assert!((1.40..=1.60).contains(&l2));
    assert!(dir.path().join("one_d.csv").exists());
}

#[test]
fn verify_batteries_pass() {
    let dir = TempDir::new().unwrap();
    for check in ["mean-value", "w1p-formula", "rhs-equality"] {
        let out = run(&["verify", check], dir.path());
        assert_ok(&out);
        assert_eq!(stdout_json(&out)["pass"], true, "{check}");
    }
    let out = run(&["--seed", "7", "verify", "inverse-ineq", "--orders", "1,2", "--out", "inv.json"], dir.path());
    assert_ok(&out);
    assert_eq!(stdout_json(&out)["seed"], 7);
    assert!(dir.path().join("inv.json").exists());
}

#[test]
fn verify_straddling_ball_is_reported_as_different() {
    let dir = TempDir::new().unwrap();
    let out = run(&["verify", "rhs-equality", "--levels", "32", "--forced-eps", "3"], dir.path());
    assert_ok(&out);
    let report = stdout_json(&out);
    assert_eq!(report["expected_difference"], true);
    assert!(report["max_rhs_diff"].as_f64().unwrap() > 1e-6);
}

#[test]
fn demo1d_tabulates_samples() {
    let dir = TempDir::new().unwrap();
    let out = run(&["demo1d", "--a", "0", "--b", "1", "--x0", "0.5", "--eps", "0.1", "--samples", "11"], dir.path());
    assert_ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,u_delta,u_eps"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn failures_are_one_line_with_a_kind() {
    let dir = TempDir::new().unwrap();
    let missing = run(&["errors", "--sol", "nope.json"], dir.path());
    assert!(!missing.status.success());
    let stderr = String::from_utf8_lossy(&missing.stderr);
    assert!(stderr.starts_with("error: io: "), "{stderr}");
    assert_eq!(stderr.trim_end().lines().count(), 1);

    let outside = run(
        &["solve", "--domain", "square", "--res", "4", "--k", "1", "--x0", "2,2", "--out", "s.json"],
        dir.path(),
    );
    assert!(!outside.status.success());
    assert!(String::from_utf8_lossy(&outside.stderr).starts_with("error: point-outside-mesh: "));

    let bad_order = run(
        &["solve", "--domain", "square", "--res", "4", "--k", "7", "--x0", "0.3,0.3", "--out", "s.json"],
        dir.path(),
    );
    assert!(String::from_utf8_lossy(&bad_order.stderr).starts_with("error: unsupported-order: "));

    let unknown = run(&["mesh", "gen", "--bogus"], dir.path());
    assert!(!unknown.status.success());

    let threads = Command::new(env!("CARGO_BIN_EXE_diracfem"))
        .args(["verify", "mean-value"])
        .env("DIRACFEM_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!threads.status.success());
    assert!(String::from_utf8_lossy(&threads.stderr).starts_with("error: parse: "));
}

#[test]
fn thread_cap_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_diracfem"))
        .args(["verify", "mean-value"])
        .env("DIRACFEM_THREADS", "2")
        .output()
        .unwrap();
    assert_ok(&out);
}
