#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(map) = coopcap_cli::parse::parse_config(s) {
            for k in map.keys() {
                assert!(!k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '-'));
            }
        }
    }
});
