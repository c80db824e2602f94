use std::fs;
use std::process::{Command, Output};

fn qpurify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpurify"))
        .args(args)
        .env_remove("QPURIFY_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn ideal_sweep_prints_csv() {
    let text = stdout(&qpurify(&["ideal", "--state", "H", "--xi-grid", "0:1:0.1"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines[0].starts_with("state,xi,zeta,kappa,xi_p,eta,p,delta_s,"));
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[5].parse::<f64>().unwrap(), 4.0 / 3.0);
}

#[test]
fn ideal_asymmetric_point() {
    let text = stdout(&qpurify(&["ideal", "--zeta", "1", "--kappa", "0", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["p"], 0.75);
    assert_eq!(v[0]["xi"], 0.5);
}

#[test]
fn duty_cycles_map_to_bloch_lengths() {
    let text = stdout(&qpurify(&["ideal", "--nu-a", "0.25", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!((v[0]["zeta"].as_f64(), v[0]["kappa"].as_f64()), (Some(0.5), Some(0.5)));
}

#[test]
fn endtoend_writes_data_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let args = [
        "endtoend", "--state", "L", "--xi-grid", "0.5,1", "--trials", "2000", "--counts", "2000",
        "--seed", "17", "--out", out.to_str().unwrap(),
    ];
    stdout(&qpurify(&args));
    let data = fs::read_to_string(&out).unwrap();
    assert_eq!(data.lines().count(), 3);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 17);
    assert_eq!(manifest["config"]["trials"], 2000);

    let first = fs::read(&out).unwrap();
    stdout(&qpurify(&args));
    assert_eq!(first, fs::read(&out).unwrap());
}

#[test]
fn seed_flag_overrides_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpurify"));
        cmd.args(["tomo", "--zeta", "0.5", "--counts", "500"]);
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        match env {
            Some(e) => cmd.env("QPURIFY_SEED", e),
            None => cmd.env_remove("QPURIFY_SEED"),
        };
        stdout(&cmd.output().unwrap())
    };
    assert_eq!(run(Some("5"), None), run(None, Some("5")));
    assert_eq!(run(Some("6"), Some("5")), run(None, Some("5")));
    assert_ne!(run(None, Some("6")), run(None, Some("5")));
}

#[test]
fn hom_scan_columns() {
    let text = stdout(&qpurify(&["hom", "--overlap-grid", "0,1"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "overlap,bunched_prob,cross_coincidence");
    let last: Vec<f64> = lines[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert!(last[2].abs() < 1e-12, "pure identical photons never split");
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((first[2] - 0.5).abs() < 1e-12);
}

#[test]
fn tomo_reports_json() {
    let text = stdout(&qpurify(&["tomo", "--state", "E", "--zeta", "0.8", "--counts", "10000"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let xi_hat = v["xi_hat"].as_f64().unwrap();
    let err = v["std_err"].as_f64().unwrap();
    assert!((xi_hat - 0.8).abs() < 4.0 * err, "{xi_hat} ± {err}");
    assert_eq!(v["rho_hat"].as_array().unwrap().len(), 2);
    assert_eq!(v["stokes"].as_array().unwrap().len(), 3);
}

#[test]
fn invalid_input_fails_cleanly() {
    for args in [
        &["ideal", "--zeta", "1.5"][..],
        &["ideal", "--state", "Q"][..],
        &["ideal", "--xi-grid", "1:0:0.1"][..],
        &["endtoend", "--trials", "0", "--zeta", "0.5"][..],
        &["hom", "--th", "1.2"][..],
    ] {
        let out = qpurify(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
