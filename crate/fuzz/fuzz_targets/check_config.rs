#![no_main]

use inertial_moreau::analysis::{check_conditions_grid_schedule, check_conditions_polynomial};
use inertial_moreau::cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(schedule) = ExperimentConfig::from_json(text).and_then(|c| c.schedule()) else {
        return;
    };
    let report = check_conditions_polynomial(&schedule);
    assert_eq!(report.overall, report.failed().next().is_none());
    let _ = check_conditions_grid_schedule(&schedule, 1e3, 200);
});
