#![no_main]

use libfuzzer_sys::fuzz_target;
use sigma_soliton::config::{FileConfig, Overrides, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = FileConfig::parse(text) {
        if let Ok(cfg) = RunConfig::resolve(file, Overrides::default()) {
            // a resolved config must describe a usable curve and grid
            assert!(cfg.grid.t1.count >= 2 && cfg.grid.t2.count >= 2);
            assert_eq!(cfg.higher_times.len(), cfg.curve.genus().saturating_sub(2));
        }
    }
});
