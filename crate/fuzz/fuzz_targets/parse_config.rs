#![no_main]

use inertial_moreau::cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = ExperimentConfig::from_json(text) else {
        return;
    };
    // Anything that parses must survive a write/read cycle unchanged.
    let again = ExperimentConfig::from_json(&cfg.to_json()).expect("round trip parses");
    assert_eq!(again, cfg);
    let _ = cfg.system_config();
});
