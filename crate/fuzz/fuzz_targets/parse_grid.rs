#![no_main]

use libfuzzer_sys::fuzz_target;
use sigma_soliton::config::{parse_grid, MAX_GRID_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = parse_grid(text) {
        for axis in [grid.t1, grid.t2] {
            assert!(axis.count >= 2 && axis.min < axis.max);
        }
        assert!(grid.t1.count * grid.t2.count <= MAX_GRID_POINTS);
    }
});
