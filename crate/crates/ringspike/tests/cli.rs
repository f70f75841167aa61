use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Resource, Validator};
use ringspike::output::{read_outlier_csv, read_trial_csv};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ringspike");
const SCHEMA_BASE: &str = "https://ringspike.invalid/schemas/";
const SCHEMAS: [&str; 7] = ["profile", "spec", "basis", "config", "summary", "table1", "scaling"];

const TWO_SPIKES: &str = r#"{"groups":[{"theta":[4,0],"blocks":[[1,1]]},{"theta":[0,4],"blocks":[[1,1]]}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("RING_JOBS")
        .output()
        .expect("spawn ringspike")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn load_schema(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn validator(name: &str) -> Validator {
    let mut opts = jsonschema::options();
    for s in SCHEMAS {
        let res = Resource::from_contents(load_schema(s)).unwrap();
        opts = opts.with_resource(format!("{SCHEMA_BASE}{s}.schema.json"), res);
    }
    opts.build(&load_schema(name)).unwrap()
}

fn assert_valid(name: &str, doc: &Value) {
    let v = validator(name);
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{name} schema violations: {errors:?}");
}

fn write_config(dir: &Path, n: usize, trials: usize, seed: u64) -> PathBuf {
    let cfg = format!(
        r#"{{"model":{{"kind":"isotropic","profile":{{"kind":"uniform","lo":0.5,"hi":4}}}},
"spec":{TWO_SPIKES},"n":{n},"trials":{trials},"seed":{seed}}}"#
    );
    let path = dir.join("config.json");
    std::fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn ring_prints_radii() {
    let o = run(&["ring", "--profile", "uniform:0.5,4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1.41421"), "{s}");
    assert!(s.contains("2.46644"), "{s}");
}

#[test]
fn weingarten_table() {
    let o = run(&["weingarten", "--k", "2", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("[1,1]\t1/24"), "{s}");
    assert!(s.contains("[2]\t-1/120"), "{s}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["ring", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["weingarten", "--k", "3", "--n", "2"]).status.code(), Some(1));
    assert_eq!(
        run(&["simulate", "--spec", "not-a-file", "--n", "20"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["ring", "--profile", "uniform:4,1"]).status.code(), Some(1));
    assert_eq!(
        run(&["simulate", "--spec", TWO_SPIKES, "--n", "20", "--svg"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["table1", "--help"]).status.code(), Some(0));
}

#[test]
fn failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 40, 2, 0);
    let blocker = dir.path().join("occupied");
    std::fs::write(&blocker, "").unwrap();
    let o = run(&[
        "experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_outputs_parse_and_repeat() {
    let args = ["simulate", "--spec", TWO_SPIKES, "--n", "80", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rows = read_outlier_csv(a.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r.p, 1);
        let dist = (r.lambda - r.theta).norm();
        assert!(dist < 1.5, "outlier far from spike: {r:?}");
    }
    let other = run(&["simulate", "--spec", TWO_SPIKES, "--n", "80", "--seed", "6"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn simulate_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let o = run(&[
        "simulate",
        "--spec",
        TWO_SPIKES,
        "--n",
        "60",
        "--out-dir",
        out.to_str().unwrap(),
        "--svg",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["outliers.csv", "spectrum.csv", "spectrum.svg"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let spectrum = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 61);
    assert!(std::fs::read_to_string(out.join("spectrum.svg"))
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn experiment_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 60, 6, 11);
    let outs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("run{i}"))).collect();
    for (i, out) in outs.iter().enumerate() {
        let jobs = if i == 0 { "1" } else { "3" };
        let o = run(&[
            "experiment",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
            "--svg",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["summary.json", "trials.csv", "outliers.svg"] {
        let a = std::fs::read(outs[0].join(f)).unwrap();
        let b = std::fs::read(outs[1].join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
    let summary: Value = serde_json::from_slice(&std::fs::read(outs[0].join("summary.json")).unwrap()).unwrap();
    assert_valid("summary", &summary);
    assert_eq!(summary["trials"], 6);
    let rows = read_trial_csv(std::fs::File::open(outs[0].join("trials.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.trial < 6));
    assert!(rows.windows(2).all(|w| w[0].trial <= w[1].trial));
}

#[test]
fn experiment_stdout_and_config_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 40, 3, 2);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_valid("config", &doc);
    let o = run(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_valid("summary", &summary);
    let again = run(&["experiment", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert_ne!(o.stdout, again.stdout);
}

#[test]
fn jobs_env_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 40, 4, 9);
    let base = run(&["experiment", "--config", cfg.to_str().unwrap(), "--jobs", "1"]);
    let env = Command::new(BIN)
        .args(["experiment", "--config", cfg.to_str().unwrap(), "--jobs", "1"])
        .env("RING_JOBS", "4")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(0));
    assert_eq!(base.stdout, env.stdout);
    let bad = Command::new(BIN)
        .args(["experiment", "--config", cfg.to_str().unwrap()])
        .env("RING_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn limit_sample_csv() {
    let spec = r#"{"groups":[{"theta":[2,0],"blocks":[[2,1],[1,1]]}]}"#;
    let args = ["limit-sample", "--spec", spec, "--trials", "3", "--seed", "4"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, run(&args).stdout);
    let rows = read_trial_csv(a.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 3 * 3);
    assert!(rows.iter().filter(|r| r.p == 2).count() == 6);
}

#[test]
fn scaling_json_valid() {
    let o = run(&[
        "scaling", "--spec", TWO_SPIKES, "--n", "40,60,80", "--trials", "3", "--seed", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_valid("scaling", &doc);
    assert_eq!(doc["fits"].as_array().unwrap().len(), 2);
    assert_eq!(
        run(&["scaling", "--spec", TWO_SPIKES, "--n", "40,60", "--trials", "3"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn table1_json_valid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1");
    let args = [
        "table1",
        "--kappa",
        "0",
        "--n",
        "60",
        "--trials",
        "6",
        "--seed",
        "2",
        "--out-dir",
        out.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(out.join("table1.json")).unwrap();
    let doc: Value = serde_json::from_slice(&bytes).unwrap();
    assert_valid("table1", &doc);
    let col = &doc["columns"][0];
    assert_eq!(col["kappa"], 0.0);
    assert!(col["reference_theoretical"].is_object());
    assert!(run(&args).status.success());
    assert_eq!(bytes, std::fs::read(out.join("table1.json")).unwrap());
}

#[test]
fn input_documents_match_schemas() {
    assert_valid("profile", &serde_json::json!({"kind": "uniform", "lo": 0.5, "hi": 4.0}));
    assert_valid(
        "profile",
        &serde_json::json!({"kind": "explicit", "values": [1.0, 2.0]}),
    );
    assert_valid("spec", &serde_json::from_str(TWO_SPIKES).unwrap());
    assert_valid("basis", &serde_json::json!("identity"));
    assert_valid("basis", &serde_json::json!([[1.0, [0.5, 0.5]], [0.0, 1.0]]));
    let bad = serde_json::json!({"kind": "uniform", "lo": 0.5});
    assert!(!validator("profile").is_valid(&bad));
}

#[test]
fn profile_json_file_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("profile.json");
    std::fs::write(&p, r#"{"kind":"point_mass","value":2}"#).unwrap();
    let o = run(&["ring", "--profile", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("a = 2"), "{}", stdout(&o));
}

#[test]
fn shipped_example_config() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/experiment.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid("config", &doc);
    let (cfg, outputs) = ringspike::formats::load_config(&path).unwrap();
    assert_eq!((cfg.n, cfg.trials, cfg.base_seed), (300, 20, 3));
    assert_eq!(outputs.unwrap().summary.as_deref(), Some("summary.json"));
}
