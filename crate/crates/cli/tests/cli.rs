use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use poissonity::engine::TestKind;
use poissonity_cli::{pmf_compare_rows, read_power};

fn poissonity(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poissonity"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_writes_the_output_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = poissonity(
        &["run", "--preset", "3", "--reps", "200", "--seed", "5"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run_dir = dir.path().join("out/preset3");
    for file in [
        "edf_chat.csv",
        "edf_gof_theta.csv",
        "edf_gof_mle.csv",
        "power.json",
        "summary.json",
    ] {
        assert!(run_dir.join(file).is_file(), "{file}");
    }
    let edf = fs::read_to_string(run_dir.join("edf_chat.csv")).unwrap();
    let mut lines = edf.lines();
    assert_eq!(lines.next(), Some("half,statistic,edf"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let split = rows.iter().position(|r| r[0] == "alternative").unwrap();
    assert!(split > 100 && rows.len() - split > 100);
    assert!(rows[..split].iter().all(|r| r[0] == "null"));
    assert!(rows[split..].iter().all(|r| r[0] == "alternative"));
    for half in [&rows[..split], &rows[split..]] {
        let points: Vec<(f64, f64)> = half
            .iter()
            .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
            .collect();
        assert!(points
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        assert_eq!(points.last().unwrap().1, 1.0);
    }

    let power = read_power(&run_dir.join("power.json")).unwrap();
    assert_eq!(power.len(), 9);
    assert!(power.iter().all(|e| (0.0..=1.0).contains(&e.power)));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(run_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["master_seed"], 5);
    assert_eq!(summary["completed_replications"], 200);
    assert!(stdout(&out).contains("gof_mle"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--preset", "6", "--reps", "300", "--out", "a"];
    assert!(poissonity(&args, dir.path()).status.success());
    let mut other = args;
    other[6] = "b";
    assert!(
        poissonity(&[&other[..], &["--workers", "2"]].concat(), dir.path())
            .status
            .success()
    );
    for file in [
        "edf_chat.csv",
        "edf_gof_theta.csv",
        "edf_gof_mle.csv",
        "power.json",
        "summary.json",
    ] {
        let a = fs::read(dir.path().join("a/preset6").join(file)).unwrap();
        let b = fs::read(dir.path().join("b/preset6").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "lambda": 7.0,
        "alternative": {"kind": "binomial", "m_b": 50, "p_b": 0.14},
        "n": 100,
        "replications": 5000,
        "k_min": 3,
        "k_max": 12
    }"#;
    fs::write(dir.path().join("mine.json"), config).unwrap();
    let out = poissonity(
        &[
            "run",
            "--config",
            "mine.json",
            "--reps",
            "100",
            "--alpha",
            "0.05,0.2",
            "--json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["config"]["replications"], 100);
    assert_eq!(summary["master_seed"], 1);
    let power = read_power(&dir.path().join("out/mine/power.json")).unwrap();
    assert_eq!(power.len(), 6);
    assert!(power
        .iter()
        .any(|e| e.alpha == 0.2 && e.test == TestKind::GofMle));
}

#[test]
fn bad_invocations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--preset", "1", "--bogus"][..],
        &["run"],
        &["run", "--preset", "10"],
        &["run", "--preset", "1", "--alpha", "1.5"],
        &["calibrate", "gamma", "--target", "1.5"],
        &["frobnicate"],
    ] {
        let out = poissonity(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    let out = poissonity(&["run", "--config", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = poissonity(&["run", "--help"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    for flag in [
        "--preset",
        "--config",
        "--seed",
        "--reps",
        "--n",
        "--alpha",
        "--out",
        "--workers",
        "--json",
    ] {
        assert!(text.contains(flag), "{flag}");
    }
    let top = stdout(&poissonity(&["--help"], dir.path()));
    for cmd in ["run", "calibrate", "pmf-compare", "list-presets"] {
        assert!(top.contains(cmd), "{cmd}");
    }
}

#[test]
fn calibrate_reports_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = poissonity(&["calibrate", "weibull", "--json"], dir.path());
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((r["k"].as_f64().unwrap() - 3.698).abs() < 0.02);
    assert!((r["b"].as_f64().unwrap() - 11.637).abs() < 0.02);

    let out = poissonity(
        &["calibrate", "gamma", "--convention", "discretized"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Discretized") && text.contains("k "));
}

#[test]
fn pmf_compare_tables() {
    let rows = pmf_compare_rows(4).unwrap();
    assert!(rows
        .iter()
        .filter(|r| r.x >= 11)
        .all(|r| r.alternative == 0.0));
    let rows = pmf_compare_rows(1).unwrap();
    let (p, a): (f64, f64) = rows
        .iter()
        .fold((0.0, 0.0), |(p, a), r| (p + r.poisson, a + r.alternative));
    assert!((p - 1.0).abs() < 1e-6 && (a - 1.0).abs() < 1e-6);
    let rows = pmf_compare_rows(3).unwrap();
    let mode = rows
        .iter()
        .max_by(|a, b| a.alternative.total_cmp(&b.alternative))
        .unwrap();
    assert_eq!(mode.x, 5);

    let dir = tempfile::tempdir().unwrap();
    let out = poissonity(&["pmf-compare", "--preset", "8"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("out/preset8/pmf_compare.csv")).unwrap();
    assert!(csv.starts_with("x,poisson,alternative\n0,"));
}

#[test]
fn list_presets_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = poissonity(&["list-presets", "--json"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 9);
}
