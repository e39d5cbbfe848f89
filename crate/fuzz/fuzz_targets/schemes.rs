#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(schemes) = coopcap_cli::parse::parse_schemes(s) {
            assert!(!schemes.is_empty() && schemes.len() <= 7);
        }
    }
});
