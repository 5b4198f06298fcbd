use std::process::{Command, Output};

fn weakval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn weakvalue_json_scheme_a() {
    let o = weakval(&["weakvalue", "--scheme", "a", "--alpha", "0.7853981633974483"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
    assert!((v["ab"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["prob"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn weakvalue_scheme_c_full_precision() {
    let o = weakval(&["weakvalue", "--scheme", "c", "--alpha", "0.002", "--beta", "0.002"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let re = v["re"].as_f64().unwrap();
    assert!((re - 250.000_666_667_911_1).abs() < 1e-8);
    assert!((v["im"].as_f64().unwrap() + 249.998_666_665_244_4).abs() < 1e-8);
    assert!((v["ab"].as_f64().unwrap() - 353.552_919_191_455_7).abs() < 1e-8);
    assert!((v["prob"].as_f64().unwrap() - 7.999_957_333_424_355e-6).abs() < 1e-16);
    // shortest round-trip printing keeps every significant digit
    let text = stdout(&o);
    let digits = text.split("\"re\":").nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(digits.parse::<f64>().unwrap(), re);
    assert!(digits.chars().filter(|c| c.is_ascii_digit()).count() >= 15);
}

#[test]
fn weakvalue_divergent_exits_2() {
    let o = weakval(&["weakvalue", "--scheme", "b", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "orthogonal postselection");
    assert!(o.stdout.is_empty());
}

#[test]
fn sweep_header_and_rows() {
    let o = weakval(&["sweep", "--scheme", "c", "--fix", "beta=0.002", "--grid", "1e-5:0.01:400:log"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha_rad,beta_rad,re_aw,im_aw,ab_aw,prob,ok"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| r.ends_with(",true") && r.split(',').count() == 7));
    assert!(!text.contains('\r'));
}

#[test]
fn syserr_three_estimators() {
    let o = weakval(&["syserr", "--beta-true", "0.002", "--alpha", "0.002"]);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let names: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    assert_eq!(names, ["im", "ab", "prob"]);
    let err: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!((err[0] - 2.0e-3).abs() < 1e-6);
    assert!((err[1] - 8.3e-4).abs() < 1e-5);
    assert!((err[2] - 8.3e-4).abs() < 1e-5);
}

#[test]
fn invert_two_roots() {
    let o = weakval(&["invert", "--alpha", "0.002", "--im", "200"]);
    let text = stdout(&o);
    let roots: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(roots.len(), 2);
    assert!((roots[0] - 0.001).abs() < 1e-6);
    assert!((roots[1] - 0.004).abs() < 1e-6);
}

#[test]
fn oracle_csv_and_output_file() {
    let dir = tempdir();
    let path = dir.join("oracle.csv");
    let o = weakval(&[
        "oracle", "--scheme", "b", "--beta", "0.1", "--taus", "1e-4,5e-5", "-o", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("tau,dq_exact,dq_first,dp_exact,dp_first,weakness,ok\n"));
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn oracle_resolution_exit_3() {
    let o = weakval(&["oracle", "--scheme", "a", "--alpha", "0.1", "--points", "8"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",false"));
}

#[test]
fn anomaly_json() {
    let o = weakval(&["anomaly", "--beta", "0.002", "--grid", "1e-5:0.01:400:log", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["alpha_peak"].as_f64().unwrap() - 0.002).abs() < 1e-6);
    assert_eq!(v["anomalous_interval"][0].as_f64(), Some(0.0));
}

#[test]
fn bad_grid_is_domain_error() {
    let o = weakval(&["sweep", "--grid", "0:1:10:log"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["kind"], "invalid_argument");
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("weakval-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
