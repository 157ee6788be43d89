use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use inertial_moreau::cli::{csv_header, ExperimentConfig};

const FIG1: &str = r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "t_end": 20, "sample_count": 200}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inertial-moreau"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "fig1.json", FIG1);
    let out = dir.path().join("fig1.csv");
    let res = bin(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), csv_header(1));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.split(',').count() == 11));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("final envelope_gap"));
    assert!(stdout.contains("conditions: pass"));
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "fig1.json", FIG1);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        assert_eq!(bin(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]).status.code(), Some(0));
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "fig1.json", FIG1);
    let out = dir.path().join("o.csv");
    let res = bin(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--t-end", "5", "--samples", "30"]);
    assert_eq!(res.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 31);
    let last_t: f64 = text.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(last_t, 5.0);
}

#[test]
fn invalid_configs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad_t = write(
        dir.path(),
        "bad.json",
        r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "t_end": 0.5}"#,
    );
    let res = bin(&["simulate", "--config", &bad_t]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("t_end"));

    let typo = write(dir.path(), "typo.json", r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "bta0": 1}"#);
    let res = bin(&["check", "--config", &typo]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("bta0"));

    assert_eq!(bin(&["check", "--config", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["figure", "7"]).status.code(), Some(1));
}

#[test]
fn check_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.json", FIG1);
    let res = bin(&["check", "--config", &ok]);
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("epsilon: 0.2222"), "{stdout}");
    let json = stdout.split("--- json").nth(1).unwrap();
    let value: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(value["overall"], true);

    let s1 = write(
        dir.path(),
        "s1.json",
        r#"{"objective": "l1", "alpha": 9, "l": 1, "beta0": 0, "m": 0, "n": 5}"#,
    );
    let res = bin(&["check", "--config", &s1]);
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&res.stdout).contains("Setting1"));

    let bad = write(
        dir.path(),
        "4a.json",
        r#"{"objective": "elastic_abs", "alpha": 13, "l": 1, "m": 12, "n": 9}"#,
    );
    let res = bin(&["check", "--config", &bad]);
    assert_eq!(res.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("m ≤ n+1") && stdout.contains("2m < n+l"), "{stdout}");
}

#[test]
fn simulate_reports_budget_exhaustion_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "short.json",
        r#"{"objective": "l1", "alpha": 9, "l": 1, "m": 0, "n": 4, "max_steps": 200}"#,
    );
    let out = dir.path().join("p.csv");
    let res = bin(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let rows = fs::read_to_string(&out).unwrap().lines().count();
    assert!(rows > 1 && rows < 1001, "{rows}");
}

#[test]
fn figure_4b_manifest_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let res = bin(&["figure", "4b", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("figure4b_manifest.json")).unwrap()).unwrap();
    let curves = manifest["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 1);
    assert_eq!(curves[0]["diverging"], true);
    assert_eq!(curves[0]["csv"], "figure4b_alpha=2.csv");
    assert!(curves[0]["dist_to_minimizer_end"].as_f64().unwrap() > 10.0);
    assert!(dir.path().join("figure4b_alpha=2.csv").exists());

    let written = ExperimentConfig::load(&dir.path().join("figure4b_alpha=2.json")).unwrap();
    let preset = &inertial_moreau::cli::figure_curves(inertial_moreau::cli::FigureId::FourB)[0];
    assert_eq!(written, preset.config);
    assert_eq!(written.system_config().unwrap(), preset.config.system_config().unwrap());
}

#[test]
fn figure_1_short_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let res = bin(&["figure", "1", "--out", dir.path().to_str().unwrap(), "--t-end", "10", "--samples", "50"]);
    assert_eq!(res.status.code(), Some(0));
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert_eq!(names.len(), 6, "{names:?}");
    assert!(names.contains(&"figure1_n=4.99.csv".to_string()));
    let manifest = fs::read_to_string(dir.path().join("figure1_manifest.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(value["subfigures"]["b"], "envelope_gap");
    assert_eq!(value["subfigures"]["c"], "grad_norm");
}

#[test]
fn rates_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "fig1.json", FIG1);
    let res = bin(&["rates", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("predicted") && stdout.contains("grad_norm"), "{stdout}");
}
