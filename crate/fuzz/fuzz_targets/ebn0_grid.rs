#![no_main]

use libfuzzer_sys::fuzz_target;
use prodpolar::textio::{parse_grid, MAX_GRID_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_grid(text) {
        assert!(!grid.is_empty() && grid.len() <= MAX_GRID_POINTS);
        assert!(grid.iter().all(|v| v.is_finite()));
    }
});
