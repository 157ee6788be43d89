//! Replays the checked-in fuzz seeds through the same entry points as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use inertial_moreau::analysis::{check_conditions_grid_schedule, check_conditions_polynomial};
use inertial_moreau::cli::{figure_curves, ExperimentConfig, FigureId};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_config_seeds() {
    let mut parsed = 0;
    for (name, data) in seeds("parse_config") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        let Ok(cfg) = ExperimentConfig::from_json(text) else { continue };
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg, "{name}");
        let _ = cfg.system_config();
        parsed += 1;
    }
    assert!(parsed >= 3);
}

#[test]
fn check_config_seeds() {
    for (name, data) in seeds("check_config") {
        let text = std::str::from_utf8(&data).unwrap();
        let schedule = ExperimentConfig::from_json(text).and_then(|c| c.schedule()).unwrap();
        let report = check_conditions_polynomial(&schedule);
        assert_eq!(report.overall, report.failed().next().is_none(), "{name}");
        check_conditions_grid_schedule(&schedule, 1e3, 200).unwrap();
    }
}

#[test]
fn figure_id_seeds() {
    for (_, data) in seeds("figure_id") {
        let Ok(s) = std::str::from_utf8(&data) else { continue };
        if let Ok(id) = s.parse::<FigureId>() {
            assert_eq!(id.as_str(), s);
            assert!(!figure_curves(id).is_empty());
        }
    }
}
