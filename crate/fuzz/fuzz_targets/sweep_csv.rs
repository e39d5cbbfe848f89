#![no_main]
use coopcap_cli::parse::{parse_sweep_csv, write_sweep_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_sweep_csv(s) {
            let text = write_sweep_csv(&rows);
            assert_eq!(parse_sweep_csv(&text).unwrap(), rows);
        }
    }
});
