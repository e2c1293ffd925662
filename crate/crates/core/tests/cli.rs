use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use itlinq::cli::{load_config, ConfigArgs};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn itlinq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itlinq")).args(args).env_remove("ITLINQ_OUTPUT_DIR").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_writes_results_and_prints_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = fixture("small_sweep.json");
    let o = itlinq(&["simulate", "--config", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("config_hash: "));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("experiment,n,scheme,statistic,value,stderr\n"));
    assert!(csv.contains("sum_rate_sweep,16,\"itlinq(eta=0.7,M=25dB)\",mean_sum_rate,"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(stdout(&o).contains(summary["config_hash"].as_str().unwrap()));
    // No temporary files are left behind.
    let names: Vec<String> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{names:?}");
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("small_sweep.json");
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = itlinq(&["sweep", "--config", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        csvs.push((std::fs::read(out.join("results.csv")).unwrap(), std::fs::read(out.join("summary.json")).unwrap()));
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("small_sweep.json");
    let o = Command::new(env!("CARGO_BIN_EXE_itlinq"))
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .env("ITLINQ_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("results.csv").exists());
}

#[test]
fn missing_file_is_an_io_error_naming_the_path() {
    let o = itlinq(&["simulate", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("/nonexistent/cfg.json"));
}

#[test]
fn malformed_configs_fail_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    for (name, expected) in [
        ("unknown_key.json", 6),
        ("unknown_nested_key.json", 6),
        ("wrong_type.json", 7),
        ("truncated.json", 7),
        ("zero_trials.json", 3),
        ("missing_field.json", 3),
    ] {
        let out = dir.path().join(name);
        let cfg = fixture(name);
        let o = itlinq(&["simulate", "--config", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
        assert_eq!(code(&o), expected, "{name}: {}", stderr(&o));
        assert!(!out.exists(), "{name} created output");
        let o = itlinq(&["validate-config", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&o), expected, "{name}");
    }
}

#[test]
fn validate_config_never_writes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("small_sweep.json");
    let o = Command::new(env!("CARGO_BIN_EXE_itlinq"))
        .args(["validate-config", "--config", cfg.to_str().unwrap()])
        .env("ITLINQ_OUTPUT_DIR", dir.path().join("never"))
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("config_hash: "));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn override_changes_only_that_key() {
    let cfg = fixture("small_sweep.json");
    let base = load_config(&ConfigArgs { config: Some(cfg.clone()), preset: None, overrides: vec![] }).unwrap();
    let changed =
        load_config(&ConfigArgs { config: Some(cfg), preset: None, overrides: vec!["schemes.0.eta=0.5".into()] })
            .unwrap();
    let mut a = serde_json::to_value(&base).unwrap();
    let b = serde_json::to_value(&changed).unwrap();
    assert_eq!(b["schemes"][0]["eta"], 0.5);
    a["schemes"][0]["eta"] = 0.5.into();
    assert_eq!(a, b);
}

#[test]
fn override_errors_have_distinct_codes() {
    let cfg = fixture("small_sweep.json");
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&itlinq(&["validate-config", "--config", c, "--set", "trails=3"])), 6);
    assert_eq!(code(&itlinq(&["validate-config", "--config", c, "--set", "trials=\"x\""])), 7);
    assert_eq!(code(&itlinq(&["validate-config", "--config", c, "--set", "trials=0"])), 3);
    assert_eq!(code(&itlinq(&["validate-config", "--config", c, "--set", "schemes.5.eta=1"])), 3);
    assert_eq!(code(&itlinq(&["validate-config", "--config", c, "--set", "trials"])), 2);
    assert_eq!(code(&itlinq(&["validate-config", "--config", c, "--set", "trials=7"])), 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&itlinq(&[])), 2);
    assert_eq!(code(&itlinq(&["frobnicate"])), 2);
    assert_eq!(code(&itlinq(&["simulate"])), 2);
    assert_eq!(code(&itlinq(&["simulate", "--preset", "nope"])), 2);
    assert_eq!(code(&itlinq(&["--help"])), 0);
}

#[test]
fn subcommand_and_experiment_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("small_sweep.json");
    let o = itlinq(&["fraction", "--config", cfg.to_str().unwrap(), "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("fraction"));
}

#[test]
fn theory_with_beta_list() {
    let dir = tempfile::tempdir().unwrap();
    let o = itlinq(&[
        "theory",
        "--beta",
        "0.5",
        "--beta",
        "2",
        "--n",
        "16",
        "--n",
        "64",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.contains("theory_curves,16,theory[beta=0.5],lambda,0.25,0\n"));
    assert!(csv.contains("theory_curves,64,theory[beta=2],lambda,0.5,0\n"));
    assert!(!csv.contains("beta=1]"));
}

#[test]
fn list_presets_shows_the_embedded_configs() {
    let o = itlinq(&["list-presets"]);
    assert_eq!(code(&o), 0);
    for name in ["iv-a", "iv-b", "iv-b-cdf", "iii-fraction", "iii-gap", "theory"] {
        assert!(stdout(&o).lines().any(|l| l.starts_with(name)), "{name}");
    }
    let o = itlinq(&["list-presets", "--show", "iv-b"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["experiment"], "sum_rate_sweep");
}

#[test]
fn preset_with_override_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = itlinq(&[
        "fraction",
        "--preset",
        "iii-fraction",
        "--set",
        "n_list=[8]",
        "--set",
        "trials=3",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.contains("fading_fraction,8,greedy_itis_cover[beta=0.5],mean_inv_kappa,"));
}
