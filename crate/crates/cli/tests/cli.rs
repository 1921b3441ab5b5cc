use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn yeh(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yeh")).args(args).current_dir(dir).env_remove("YEH_SEED").output().unwrap()
}

fn config(dir: &Path, json: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV written by the tool, after the manifest and any other
/// comment lines and the header.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

/// Cantor function from the ternary digits of `t`.
fn cantor(mut t: f64) -> f64 {
    if t >= 1.0 {
        return 1.0;
    }
    let (mut value, mut weight) = (0.0, 0.5);
    for _ in 0..60 {
        t *= 3.0;
        let digit = t.floor();
        t -= digit;
        if digit == 1.0 {
            return value + weight;
        }
        value += weight * digit / 2.0;
        weight /= 2.0;
    }
    value
}

#[test]
fn brownian_paths_start_at_zero() {
    let dir = TempDir::new().unwrap();
    let o = yeh(&["simulate", "--out", "out", "--paths", "10", "--grid", "17"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("out/paths.csv"));
    assert_eq!(rows.len(), 10 * 17);
    for path in 0..10 {
        let first = &rows[path * 17];
        assert_eq!(first[0], path.to_string());
        assert_eq!(num(&first[1]), 0.0);
        assert_eq!(num(&first[2]), 0.0);
    }
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/bundle.json")).unwrap()).unwrap();
    let paths = bundle["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 10);
    assert!(paths.iter().all(|p| p[0].as_f64() == Some(0.0)));
    assert_eq!(bundle["grid"].as_array().unwrap().len(), 17);
}

#[test]
fn cantor_mean_is_tracked() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), r#"{"interval":[0,1],"lambda":{"kind":"cantor"},"mc":{"paths":100000,"seed":3}}"#);
    let o = yeh(&["simulate", "--config", cfg.to_str().unwrap(), "--out", "out", "--grid", "28"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("out/summary.csv"));
    assert_eq!(rows.len(), 28);
    for r in &rows {
        let (t, mean, se) = (num(&r[0]), num(&r[1]), num(&r[3]));
        let c = cantor(t);
        assert!((mean - c).abs() <= 4.0 * se + 1e-12, "t = {t}: {mean} vs {c} (SE {se})");
    }
}

#[test]
fn malformed_rho_exits_2_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), r#"{"interval":[0,1],"rho":{"kind":"table","points":[[0,0],[0.5,1],[1,0.5]]}}"#);
    let o = yeh(&["simulate", "--config", cfg.to_str().unwrap(), "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("variance function must be strictly increasing"), "{msg}");
    assert!(msg.contains("`rho`"), "{msg}");
}

#[test]
fn unknown_and_mistyped_fields_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), r#"{"interval":[0,1],"mc":{"paths":"many"}}"#);
    let o = yeh(&["verify", "--config", cfg.to_str().unwrap(), "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mc.paths"), "{}", stderr(&o));
    let cfg = config(dir.path(), r#"{"interval":[0,1],"grid":{"pts":5}}"#);
    let o = yeh(&["verify", "--config", cfg.to_str().unwrap(), "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(yeh(&["simulate"], dir.path()).status.code(), Some(2));
    assert_eq!(yeh(&["verify", "--suite", "nope", "--out", "o"], dir.path()).status.code(), Some(2));
}

#[test]
fn zero_truncation_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = yeh(&["expand", "--out", "out", "--truncation", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("truncation must be ≥ 1"), "{}", stderr(&o));
}

#[test]
fn io_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("taken"), "").unwrap();
    let o = yeh(&["simulate", "--out", "taken", "--paths", "2", "--grid", "5"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = yeh(&["simulate", "--config", "missing.json", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_counterexample_reports_the_exact_drifts() {
    let dir = TempDir::new().unwrap();
    let o = yeh(&["verify", "--suite", "counterexample", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("out/verify_counterexample.csv"));
    let exact: Vec<f64> =
        rows.iter().filter(|r| r[0].contains("exact_drift")).map(|r| num(&r[1])).collect();
    assert_eq!(exact, vec![-1.0 / 24.0, 1.0 / 24.0]);
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn verify_moments_passes_on_brownian() {
    let dir = TempDir::new().unwrap();
    let o = yeh(&["verify", "--suite", "moments", "--out", "out", "--paths", "20000", "--grid", "129"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("out/verify_moments.csv"));
    assert!(rows.len() >= 10);
    assert!(rows.iter().any(|r| r[0] == "moments/second_moment(s=0.500000;t=0.500000)"));
}

#[test]
fn stream_reuse_makes_verify_all_fail() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), r#"{"interval":[0,1],"mc":{"paths":2000,"stream_reuse":true}}"#);
    let o = yeh(
        &["verify", "--config", cfg.to_str().unwrap(), "--out", "out", "--grid", "65", "--truncation", "16"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("out/verify_all.csv"));
    assert!(rows.iter().any(|r| r[4] == "false"));
}

#[test]
fn expanding_a_basis_member_exhausts_the_defect() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), r#"{"interval":[0,1],"integrand":{"kind":"basis","index":3}}"#);
    let o = yeh(&["expand", "--config", cfg.to_str().unwrap(), "--out", "out", "--truncation", "8"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("out/expansion.csv"));
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let (n, defect) = (num(&r[0]), num(&r[2]));
        if n < 4.0 {
            assert!((defect - 1.0).abs() < 1e-10, "n = {n}: {defect}");
        } else {
            assert!(defect.abs() < 1e-10, "n = {n}: {defect}");
        }
    }
}

#[test]
fn indicator_defects_match_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), r#"{"interval":[0,1],"integrand":{"kind":"indicator","from":0,"to":0.5}}"#);
    let o = yeh(&["expand", "--config", cfg.to_str().unwrap(), "--out", "out", "--truncation", "16"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for r in csv_rows(&dir.path().join("out/expansion.csv")) {
        let n = num(&r[0]) as usize;
        // ½ − ¼ − Σ_{odd k<n} 2/(kπ)²
        let closed = 0.25 - (1..n).filter(|k| k % 2 == 1).map(|k| 2.0 / (k as f64 * PI).powi(2)).sum::<f64>();
        assert!((num(&r[2]) - closed).abs() < 1e-10, "n = {n}");
    }
}

#[test]
fn every_output_embeds_the_manifest_hash() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["simulate", "--out", "sim", "--paths", "5", "--grid", "9"][..],
        &["verify", "--suite", "counterexample", "--out", "ver", "--paths", "200"][..],
        &["expand", "--out", "exp", "--grid", "9", "--truncation", "4"][..],
    ] {
        let o = yeh(args, dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        let out = dir.path().join(args[args.iter().position(|a| *a == "--out").unwrap() + 1]);
        let hash = hex::encode(Sha256::digest(fs::read(out.join("manifest.json")).unwrap()));
        for entry in fs::read_dir(&out).unwrap() {
            let path = entry.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            match path.extension().and_then(|e| e.to_str()) {
                Some("csv") => assert_eq!(text.lines().next().unwrap(), format!("# manifest {hash}"), "{path:?}"),
                Some("json") if !path.ends_with("manifest.json") => {
                    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                    assert_eq!(v["manifest_hash"], hash.as_str(), "{path:?}");
                }
                _ => {}
            }
        }
    }
}

#[test]
fn seed_flag_and_env_set_the_manifest_seed() {
    let dir = TempDir::new().unwrap();
    let run = |out: &str, env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_yeh"));
        cmd.args(["simulate", "--out", out, "--paths", "3", "--grid", "5"]).current_dir(dir.path());
        cmd.env_remove("YEH_SEED");
        if let Some(s) = env {
            cmd.env("YEH_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.status().unwrap().success());
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(out).join("manifest.json")).unwrap()).unwrap();
        m["seed"].as_u64().unwrap()
    };
    assert_eq!(run("a", None, None), 1);
    assert_eq!(run("b", Some("42"), None), 42);
    assert_eq!(run("c", Some("42"), Some("7")), 7);
    assert_ne!(fs::read(dir.path().join("a/paths.csv")).unwrap(), fs::read(dir.path().join("b/paths.csv")).unwrap());
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = TempDir::new().unwrap();
    for (out, threads) in [("one", "1"), ("four", "4")] {
        let o = Command::new(env!("CARGO_BIN_EXE_yeh"))
            .args(["simulate", "--out", out, "--paths", "3000", "--grid", "33"])
            .current_dir(dir.path())
            .env_remove("YEH_SEED")
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["manifest.json", "paths.csv", "summary.csv", "bundle.json"] {
        assert_eq!(
            fs::read(dir.path().join("one").join(name)).unwrap(),
            fs::read(dir.path().join("four").join(name)).unwrap(),
            "{name}"
        );
    }
}
