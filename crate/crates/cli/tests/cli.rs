use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmc"))
        .args(args)
        .env("QMC_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn family_file(dir: &TempDir, args: &[&str], name: &str) -> String {
    let path = dir.path().join(name);
    let mut full = vec!["family"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path_str(&path)]);
    let o = qmc(&full);
    assert!(o.status.success(), "{}", stderr(&o));
    path_str(&path).to_string()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn cmi_of_zeta_two() {
    let dir = TempDir::new().unwrap();
    let f = family_file(&dir, &["zeta-d", "--d", "2"], "z.json");
    let o = qmc(&["cmi", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.415037499279");
}

#[test]
fn cmi_of_psi_half_roundtrip() {
    let dir = TempDir::new().unwrap();
    let f = family_file(&dir, &["psi-x", "--x", "0.5"], "p.json");
    let o = qmc(&["cmi", &f]);
    assert!(stdout(&o).starts_with("0.668122"), "{}", stdout(&o));
}

#[test]
fn malformed_state_names_field() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, r#"{"dims": [2, 2, 2], "matrix": [[1, 0], "oops"]}"#).unwrap();
    let o = qmc(&["cmi", path_str(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("matrix"), "{}", stderr(&o));

    fs::write(&f, r#"{"dims": [2, 2, 2]}"#).unwrap();
    let o = qmc(&["cmi", path_str(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("matrix") || stderr(&o).contains("vector"), "{}", stderr(&o));

    fs::write(&f, r#"{"dims": [2, 2], "vector": [[1, 0], [0, 0], [0, 0], [0, 0]]}"#).unwrap();
    let o = qmc(&["cmi", path_str(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dims"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_two() {
    let o = qmc(&["cmi", "/nonexistent/state.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn delta_is_deterministic_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let f = family_file(&dir, &["psi-x", "--x", "0.3"], "p.json");
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    let args = |out: &Path| {
        vec![
            "delta".to_string(),
            f.clone(),
            "--restarts".into(),
            "2".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            path_str(out).to_string(),
        ]
    };
    let a1 = args(&out1);
    let a2 = args(&out2);
    let o1 = qmc(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    let o2 = qmc(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o1.status.code(), Some(0), "{}", stderr(&o1));
    assert_eq!(o1.stdout, o2.stdout);
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
    let text = stdout(&o1);
    let lower: f64 = text.lines().next().unwrap().strip_prefix("lower ").unwrap().parse().unwrap();
    let upper: f64 = text.lines().nth(1).unwrap().strip_prefix("upper ").unwrap().parse().unwrap();
    assert!(upper >= lower - 1e-6);
}

#[test]
fn classical_common_bit() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("p.json");
    let q = dir.path().join("q.json");
    // X = Z is a fair coin and Y is constant
    let json = r#"{"shape": [2, 1, 2], "table": [0.5, 0.0, 0.0, 0.5]}"#;
    fs::write(&f, json).unwrap();
    let o = qmc(&["classical", path_str(&f), "--project", path_str(&q)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "cmi 1.000000000000\nrelent 1.000000000000\n");
    let proj: serde_json::Value = serde_json::from_str(&fs::read_to_string(&q).unwrap()).unwrap();
    for v in proj["table"].as_array().unwrap() {
        assert!((v.as_f64().unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn classical_negative_entry() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("p.json");
    fs::write(&f, r#"{"shape": [2, 1, 1], "table": [-0.5, 1.5]}"#).unwrap();
    let o = qmc(&["classical", path_str(&f)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ep_of_symmetric_pair() {
    let dir = TempDir::new().unwrap();
    let f = family_file(&dir, &["zeta-d", "--d", "2"], "z.json");
    let o = qmc(&["ep", &f, "--restarts", "1"]);
    assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", stderr(&o));
    let upper: f64 = stdout(&o).lines().nth(1).unwrap().strip_prefix("upper ").unwrap().parse().unwrap();
    assert!((upper - 1.0).abs() < 1e-3, "{upper}");
}

#[test]
fn family_spec_file() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"family": "cq", "probs": [0.5, 0.5], "states": [[[1, 0], [0, 0]], [[0.6, 0], [0.8, 0]]]}"#,
    )
    .unwrap();
    let f = family_file(&dir, &["--spec", path_str(&spec)], "cq.json");
    let o = qmc(&["cmi", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!(v > 0.0 && v < 1.0);
}

#[test]
fn unknown_family_rejected() {
    let o = qmc(&["family", "w-state"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_psi_ratio_increases() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    let o = qmc(&["scan", "psi-x", "--grid", "0.3,0.2,0.1,0.05", "--restarts", "2", "--csv", path_str(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "param,S_A,S_B,cmi,delta_lower,delta_upper,delta_hat,ratio");
    assert_eq!(text.lines().count(), 5);
    let ratio = csv_column(&text, "ratio");
    assert!(ratio.windows(2).all(|w| w[1] > w[0]), "{ratio:?}");
    let (lo, hi, hat) = (csv_column(&text, "delta_lower"), csv_column(&text, "delta_upper"), csv_column(&text, "delta_hat"));
    for i in 0..4 {
        assert!(hat[i] >= lo[i] - 1e-3 && hat[i] <= hi[i] + 1e-3);
    }
}

#[test]
fn scan_zeta_columns() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    let o = qmc(&["scan", "zeta-d", "--grid", "2,3", "--restarts", "1", "--shape", "trivial", "--csv", path_str(&csv)]);
    // The d = 3 run may stop at the iteration cap, which is reported as exit 3.
    assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let cmi = csv_column(&text, "cmi");
    assert!(cmi.iter().all(|&c| c < 1.0));
    let lower = csv_column(&text, "delta_lower");
    assert!((lower[0] - 1.0).abs() < 1e-12);
    assert!((lower[1] - 3f64.log2()).abs() < 1e-12);
    assert!(text.lines().next().unwrap().starts_with("param,"));
    assert!(!text.contains(';'));
}

#[test]
fn verify_classical_suite_passes() {
    let o = qmc(&["verify", "--suite", "classical", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("200 passed, 0 failed"), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn verify_all_passes() {
    let o = qmc(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
