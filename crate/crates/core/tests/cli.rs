use std::process::{Command, Output};

use zkernel::kernel::KernelMatrix;

fn zk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zk")).args(args).output().expect("spawn zk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

const PRINCIPAL: [&str; 6] = ["--z", "1+1i", "--zp", "1-1i", "--xi", "0.3"];

fn with_params<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(PRINCIPAL.iter()).chain(tail).copied().collect()
}

#[test]
fn empty_diagram_weight() {
    let o = zk(&with_params(&["weight"], &[]));
    assert!(o.status.success());
    let w = json(&o)["weight"].as_f64().unwrap();
    // (1 - 0.3)^2 rounded once per operation
    assert!((w - 0.49).abs() <= 2.0 * f64::EPSILON * 0.49, "{w}");
}

#[test]
fn sample_output_is_deterministic() {
    let args = with_params(&["sample"], &["--count", "200", "--seed", "11"]);
    let a = zk(&args);
    let b = zk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = zk(&with_params(&["sample"], &["--count", "200", "--seed", "12"]));
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let path_str = path.to_str().unwrap();
    let base = with_params(&["kernel"], &["--points=-1.5,0.5,2.5", "--format", "csv"]);
    let printed = zk(&base);
    let mut to_file = base.clone();
    to_file.extend(["--out", path_str]);
    let written = zk(&to_file);
    assert!(printed.status.success() && written.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), printed.stdout);
}

#[test]
fn kernel_json_round_trips() {
    let o = zk(&with_params(&["kernel"], &["--points=-0.5,0.5,1.5"]));
    assert!(o.status.success());
    let text = stdout(&o);
    let m = KernelMatrix::from_json(text.trim()).unwrap();
    assert_eq!(m.dim(), 3);
    assert_eq!(m.to_json(), text.trim());
    // the underlined kernel is symmetric
    let k = m.to_real();
    assert_eq!(k, k.transpose());
}

#[test]
fn correlation_methods_agree() {
    let pts = "--points=-0.5,1.5";
    let series = json(&zk(&with_params(&["corr"], &[pts])));
    let brute = json(&zk(&with_params(&["corr"], &[pts, "--method", "brute"])));
    let contour = json(&zk(&with_params(&["corr"], &[pts, "--method", "contour"])));
    let s = series["value"].as_f64().unwrap();
    let b = brute["value"].as_f64().unwrap();
    let tail = brute["tail_bound"].as_f64().unwrap();
    assert!((s - b).abs() <= tail + 1e-10, "{s} {b}");
    assert!((s - contour["value"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn psi_series_and_contour() {
    let a = json(&zk(&with_params(&["psi"], &["--a", "1.5", "--x=-0.5"])));
    let b = json(&zk(&with_params(&["psi"], &["--a", "1.5", "--x=-0.5", "--contour"])));
    assert!((a["psi"].as_f64().unwrap() - b["psi"].as_f64().unwrap()).abs() < 1e-10);
}

#[test]
fn ensemble_two_point() {
    let o = zk(&[
        "ensemble", "--family", "krawtchouk", "--particles", "2", "--p", "0.4", "--support", "3", "--points", "0,1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o)["value"].as_f64().unwrap();
    assert!(v > 0.0 && v < 1.0);
}

#[test]
fn grid_has_one_row_per_pair() {
    let o = zk(&with_params(&["grid"], &["--x-range=-1.5,1.5", "--y-range", "0.5,0.5", "--format", "csv"]));
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 4);
}

#[test]
fn verify_kernel_suite_passes() {
    let o = zk(&["verify", "--suite", "kernel"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn verify_json_lists_checks() {
    let o = zk(&["verify", "--suite", "partitions", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!(v.as_array().is_some_and(|a| a.len() == 5), "{v}");
}

#[test]
fn failed_check_exits_one() {
    let o = zk(&["verify", "--suite", "specfun", "--tol", "gamma_reflection=1e-300"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(zk(&["bogus"]).status.code(), Some(2));
    assert_eq!(zk(&["weight", "--z", "1+1i"]).status.code(), Some(2));
    // z = 1 + i with z' = 1 + i is not an admissible pair
    assert_eq!(zk(&["weight", "--z", "1+1i", "--zp", "1+1i", "--xi", "0.3"]).status.code(), Some(2));
    assert_eq!(zk(&with_params(&["weight"], &["--lambda", "1,3"])).status.code(), Some(2));
    assert_eq!(zk(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(zk(&["--help"]).status.code(), Some(0));
    assert_eq!(zk(&["--version"]).status.code(), Some(0));
}
