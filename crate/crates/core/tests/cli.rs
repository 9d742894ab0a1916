use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use shadowcorr::experiment::{load_configs, HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shadowcorr"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"{
  "scenario": "small",
  "deployment": {"kind": "ppp", "intensity": 1.0},
  "shadow": {"kind": "grid", "cell_size": 1.0, "obstacle_intensity": 1.0, "attenuation": 0.1},
  "metric": "coverage",
  "sweep": {"variable": "cell_size", "values": [1, 5]},
  "theta_db": [-5, 0, 5],
  "replications": 300,
  "seed": 11
}"#;

#[test]
fn bundled_configs_parse() {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfgs = load_configs(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        for c in &cfgs {
            assert!(!c.points().unwrap().is_empty());
        }
        names.push(path.file_stem().unwrap().to_string_lossy().into_owned());
    }
    for want in ["fig4_grid", "fig5_cluster", "fig6_boolean", "table1", "fig7_delay_grid", "fig8_delay_cluster"] {
        assert!(names.iter().any(|n| n == want), "missing bundled config {want}");
    }
    let table = load_configs(&configs_dir().join("table1.json")).unwrap();
    let cells: usize = table.iter().map(|c| c.points().unwrap().len()).sum();
    assert_eq!(cells, 6);
}

#[test]
fn same_seed_gives_identical_csv_for_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let cfg = cfg.to_str().unwrap();
    let a = run_in(dir.path(), &["run", cfg, "--threads", "1", "--out", "a.csv"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run_in(dir.path(), &["run", cfg, "--threads", "3", "--out", "b.csv"]);
    assert!(b.status.success());
    let ta = std::fs::read(dir.path().join("a.csv")).unwrap();
    let tb = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(ta, tb);

    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<&str> = lines.collect();
    // 2 sweep values x 2 modes x 3 thresholds
    assert_eq!(rows.len(), 12);
    assert!(rows[0].starts_with("small,correlated,1,-5.00000,"));
    assert!(rows[0].ends_with(",300,11"));
}

#[test]
fn seed_and_reps_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let out = run_in(
        dir.path(),
        &["run", cfg.to_str().unwrap(), "--seed", "5", "--reps", "50", "--out", "o.csv"],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("o.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",50,5")));
}

#[test]
fn unknown_key_is_a_config_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL.replace("\"seed\": 11", "\"seed\": 11,\n  \"replicatoins\": 3");
    let cfg = write(dir.path(), "bad.json", &bad);
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("replicatoins"), "{err}");
    assert!(err.contains("bad.json:10:"), "{err}");
}

#[test]
fn invalid_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL.replace("[-5, 0, 5]", "[0, 0, 5]");
    let cfg = write(dir.path(), "bad.json", &bad);
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));

    let missing = run_in(dir.path(), &["run", "no_such_file.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn small_path_loss_exponent_is_a_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL.replace("\"metric\"", "\"alpha\": 2.0,\n  \"metric\"");
    let cfg = write(dir.path(), "div.json", &bad);
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_suite_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "speed"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_reports_json_lines_and_matching_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["moments", "convergence"] {
        let out = run_in(dir.path(), &["verify", suite, "--reps", "2000"]);
        let text = String::from_utf8(out.stdout).unwrap();
        let mut all = true;
        let mut n = 0;
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["suite"], suite);
            assert!(v["margin"].is_number());
            all &= v["passed"].as_bool().unwrap();
            n += 1;
        }
        assert!(n > 0);
        assert_eq!(out.status.code(), Some(if all { 0 } else { 2 }), "{suite}");
    }
}

#[test]
fn analytic_and_delay_configs_run() {
    let dir = tempfile::tempdir().unwrap();
    let analytic = SMALL.replace("\"metric\": \"coverage\"", "\"metric\": \"laplace\", \"method\": \"analytic\"");
    let cfg = write(dir.path(), "an.json", &analytic);
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--out", "an.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("an.csv")).unwrap();
    assert_eq!(text.lines().count(), 13);

    let delay = SMALL
        .replace("\"metric\": \"coverage\"", "\"metric\": \"delay\", \"delay\": {\"n_max\": 20}")
        .replace("\"theta_db\": [-5, 0, 5],\n", "");
    let cfg = write(dir.path(), "d.json", &delay);
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--out", "d.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    // 2 sweep values x 2 modes x n = 1..20
    assert_eq!(text.lines().count(), 1 + 80);
    assert!(String::from_utf8_lossy(&out.stdout).contains("P[L>1]"));
}
