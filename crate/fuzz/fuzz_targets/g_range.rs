#![no_main]
use coopcap_cli::parse::{parse_g_range, MAX_RANGE_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_g_range(s) {
            assert!(!grid.is_empty() && grid.len() <= MAX_RANGE_POINTS);
            assert!(grid.iter().all(|g| g.is_finite()));
            assert!(grid.windows(2).all(|w| w[1] > w[0]));
        }
    }
});
