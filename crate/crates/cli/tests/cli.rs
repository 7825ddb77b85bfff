use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_barrier-rhs"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_owned()
}

fn column(csv_bytes: &[u8], name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(csv_bytes);
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect("column present");
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn coeffs_free_case_transmits_fully() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model": {"a": 0, "b": 1, "v0": 0}}"#);
    let out = run(&["coeffs", "--config", &cfg, "--energies", "0.1,1,10,50"]);
    assert!(out.status.success());
    for t2 in column(&out.stdout, "abs_T2") {
        assert_eq!(t2, 1.0);
    }
}

#[test]
fn coeffs_table_schema_and_values() {
    let out = run(&["coeffs"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("E,k,re_T,im_T,re_Rl,im_Rl,re_Rr,im_Rr,abs_T2,abs_Rl2,unitarity_defect\r\n"));
    assert_eq!(column(&out.stdout, "E").len(), 50);
    assert!(column(&out.stdout, "unitarity_defect").iter().all(|d| *d < 1e-10));

    let one = run(&["coeffs", "--energies", "1"]);
    let t2 = column(&one.stdout, "abs_T2")[0];
    assert!((t2 - 1.0 / (1.0 + 1f64.sinh().powi(2))).abs() < 1e-8);
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = run(&["coeffs", "--energies", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    for field in row.split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
    }
}

#[test]
fn eigfun_free_case_has_constant_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model": {"a": 0, "b": 1, "v0": 0}}"#);
    let out = run(&["eigfun", "--config", &cfg, "--energy", "3", "--x", "-4:5:37"]);
    assert!(out.status.success());
    let abs2 = column(&out.stdout, "abs2_psi");
    let first = abs2[0];
    assert!(abs2.iter().all(|v| (v - first).abs() < 1e-14));
}

#[test]
fn eigfun_evanescent_interior_and_edges() {
    // Right incidence below the barrier: the modulus decays into the barrier from the right.
    let out = run(&["eigfun", "--energy", "0.5", "--channel", "r", "--sign", "+", "--x", "0:1:21"]);
    assert!(out.status.success());
    let x = column(&out.stdout, "x");
    let abs2 = column(&out.stdout, "abs2_psi");
    assert_eq!((x[0], x[20]), (0.0, 1.0));
    assert!(abs2.iter().all(|v| v.is_finite()));
    assert!(abs2.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn verify_default_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["verify", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let arr = reports.as_array().unwrap();
    assert!(arr.len() > 20);
    assert!(arr.iter().all(|r| r["passed"] == true && !r["witnesses"].as_array().unwrap().is_empty()));
}

#[test]
fn verify_with_machine_zero_tolerance_fails_with_names() {
    let out = run(&["verify", "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("eigen_equation_H"), "{stderr}");
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(reports.as_array().unwrap().iter().any(|r| r["passed"] == false));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(dir.path(), r#"{"verify": {"checks": []}}"#);
    assert_eq!(run(&["verify", "--config", &empty]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--energies", "1,-2"]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--energies", "1:2:0"]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--energies", "one"]).status.code(), Some(2));
    assert_eq!(run(&["eigfun", "--channel", "up"]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--kmax", "-1"]).status.code(), Some(2));
    let unknown = write_config(dir.path(), r#"{"model": {"a": 0, "b": 1, "v0": 2, "depth": 3}}"#);
    assert_eq!(run(&["coeffs", "--config", &unknown]).status.code(), Some(2));
}

#[test]
fn identical_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"reconstruct": {"packet": {"kind": "gaussian_packet", "center": 21, "width": 2, "momentum": -3}, "basis": "energy_minus", "x": {"start": 15, "stop": 27, "count": 7}}}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = run(&["reconstruct", "--config", &cfg, "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(column(&bytes, "abs_error").iter().all(|e| *e < 1e-8));
}

#[test]
fn transform_and_probe_outputs() {
    let t = run(&["transform", "--basis", "momentum", "--packet=-20,1,3", "--grid", "3"]);
    assert!(t.status.success());
    // Unit-height Gaussian of width 1: peak amplitude sqrt(π)/sqrt(2π).
    let re = column(&t.stdout, "re_a")[0];
    assert!((re - 0.5f64.sqrt()).abs() < 1e-4);

    let p = run(&["probe", "--packet=21,2,0", "--e-lo", "0"]);
    assert!(p.status.success());
    let v: serde_json::Value = serde_json::from_slice(&p.stdout).unwrap();
    assert!((v["probability"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}
