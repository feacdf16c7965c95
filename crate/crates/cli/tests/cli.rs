use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splinebound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn temp_file(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("splinebound-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn figure_one_maximal_smoothness_rows() {
    let o = run(&["constants", "--figure", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut seen = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (p, k): (i64, i64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        if k == p - 1 {
            assert_eq!(f[2], "3.2251534433199495e-2");
            seen += 1;
        }
    }
    assert_eq!(seen, 9);
}

#[test]
fn figure_written_to_file() {
    let out = std::env::temp_dir().join(format!("splinebound-{}-fig4.csv", std::process::id()));
    let o = run(&["constants", "--figure", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("p,r,"));
    assert_eq!(text, stdout(&run(&["constants", "--figure", "4"])));
}

#[test]
fn opnorm_poincare() {
    let o = run(&["opnorm", "--p", "0", "--k", "-1", "--N", "0", "--r", "1", "--grid", "400"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - std::f64::consts::FRAC_1_PI).abs() < 1e-3, "{value}");
}

#[test]
fn bound_reports_polynomial_argument_beyond_crossover() {
    let o = run(&["bound", "--p", "10", "--r", "11", "--h", "0.2", "--length", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["argmin"], "polynomial");
    let o = run(&["bound", "--p", "10", "--r", "11", "--h", "0.1", "--length", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["argmin"], "spline_h_power");
    let o = run(&["bound", "--p", "4", "--r", "2", "--h", "0.1", "--variants"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["candidates"].as_array().unwrap().len(), 5);
}

#[test]
fn project_passes_and_is_deterministic() {
    let cfg = config_path("verify_sin.json");
    let a = run(&["project", "--config", &cfg]);
    let b = run(&["project", "--config", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("p,k,q,ell,r,N,h,error,bound,effectivity,order\n"));
}

#[test]
fn convergence_passes() {
    let o = run(&["convergence", "--config", &config_path("convergence_ritz.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn preasymptotic_study_exits_one() {
    let cfg = temp_file(
        "runge.json",
        r#"{"domain":[-1.0,1.0],"degrees":[{"p":5}],"schedule":[1,2,3,4],"projector":"l2",
            "target":{"id":"runge","c":25.0},"r":[6]}"#,
    );
    let o = run(&["convergence", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(run(&["project", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--figure", "7"]).status.code(), Some(2));
    let cfg = temp_file("unknown.json", r#"{"degrees":[{"p":2}],"schedule":[4],"projector":"l2","target":{"id":"gauss"},"r":[2]}"#);
    let o = run(&["project", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gauss"));
    assert_eq!(run(&["project", "--config", "/nonexistent.json"]).status.code(), Some(2));
}
