use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn dumbbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dumbbell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn default_sweep_is_reproducible_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let js = dir.path().join("a.json");
    let a = dumbbell(&[
        "sweep",
        "--jobs",
        "4",
        "--out-csv",
        csv_a.to_str().unwrap(),
        "--out-json",
        js.to_str().unwrap(),
    ]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = dumbbell(&["sweep", "--jobs", "1", "--out-csv", csv_b.to_str().unwrap()]);
    assert_eq!(code(&b), 0);
    let text = std::fs::read_to_string(&csv_a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&csv_b).unwrap());
    assert!(text.starts_with("eps,lambda1,rayleigh_bound,kbar_p0,kbar_pK,M1_est,M2_est,"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 5);

    let rows: Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "eps");
    assert_eq!(keys[4], "kbar_pK");
    let mut prev = f64::INFINITY;
    for r in rows {
        let area = r["area"].as_f64().unwrap();
        assert!((16.0 * PI..=42.0 * PI).contains(&area));
        let lambda1 = r["lambda1"].as_f64().unwrap();
        assert!(lambda1 < prev && lambda1 <= r["rayleigh_bound"].as_f64().unwrap());
        prev = lambda1;
        assert_eq!(r["status"], "ok");
    }
}

#[test]
fn sphere_spectrum() {
    let out = dumbbell(&["spectrum", "--sphere", "--R", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let lambda1 = v[0]["lambda1"].as_f64().unwrap();
    assert!((lambda1 - 2.0).abs() < 0.01, "{lambda1}");
}

#[test]
fn dumbbell_spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = dumbbell(&[
        "spectrum",
        "--eps-list",
        "0.1",
        "--out-csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("surface,eps,m,index,eigenvalue\n"));
    // three modes, four eigenvalues each
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn claims_pass_by_default() {
    let out = dumbbell(&["claims"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 7);
    assert!(reports.iter().all(|r| r["pass"] == true));
    assert_eq!(reports[4]["claim_id"], "C2_AB");
}

#[test]
fn profile_is_monotone_on_neck() {
    let out = dumbbell(&["profile", "--eps-list", "0.1", "--samples", "2000"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2000);
    let x2 = 0.5 + (4.0f64 - 0.01).sqrt();
    let neck: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] >= 0.5 && r[0] <= x2).collect();
    assert!(neck.windows(2).all(|w| w[1][1] >= w[0][1]));
}

#[test]
fn gauss_bonnet_report() {
    let out = dumbbell(&["gaussbonnet", "--eps-dyadic", "5:20"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert!(v[0]["rel_defect"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test\nR = 4\nL = 2\neps-list = 0.5\n").unwrap();
    let out = dumbbell(&["gaussbonnet", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)[0]["area_lower"].as_f64().unwrap() - 64.0 * PI).abs() < 1e-6);
    let out = dumbbell(&[
        "gaussbonnet",
        "--config",
        cfg.to_str().unwrap(),
        "--R",
        "2",
        "--eps-list",
        "0.1",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v[0]["area_lower"].as_f64().unwrap() - 16.0 * PI).abs() < 1e-6);
    assert_eq!(v[0]["eps"].as_f64().unwrap(), 0.1);

    std::fs::write(&cfg, "radius = 4\n").unwrap();
    assert_eq!(
        code(&dumbbell(&["claims", "--config", cfg.to_str().unwrap()])),
        1
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&dumbbell(&["sweep", "--bogus"])), 1);
    assert_eq!(code(&dumbbell(&[])), 1);
    assert_eq!(code(&dumbbell(&["sweep", "--eps-list", "1.5"])), 1);
    assert_eq!(
        code(&dumbbell(&[
            "sweep",
            "--eps-list",
            "0.1",
            "--eps-dyadic",
            "5:10"
        ])),
        1
    );
    assert_eq!(code(&dumbbell(&["sweep", "--eps-dyadic", "5-10"])), 1);
    assert_eq!(code(&dumbbell(&["sweep", "--p", "3"])), 1);
    assert_eq!(code(&dumbbell(&["profile", "--samples", "1"])), 1);
    assert_eq!(
        code(&dumbbell(&["claims", "--config", "/nonexistent/cfg"])),
        1
    );
    assert_eq!(code(&dumbbell(&["--help"])), 0);
}

#[test]
fn failed_rows_exit_two() {
    // n/2 falls below the minimum grid, so every row records an error
    let out = dumbbell(&["sweep", "--eps-list", "0.1", "--grid-n", "150"]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("error:"));
}
