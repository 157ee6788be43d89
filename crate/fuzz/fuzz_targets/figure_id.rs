#![no_main]

use inertial_moreau::cli::{figure_curves, FigureId};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(id) = s.parse::<FigureId>() {
        assert_eq!(id.as_str(), s);
        assert!(!figure_curves(id).is_empty());
    }
});
