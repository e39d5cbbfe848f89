#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(t) = coopcap_cli::parse::parse_thetas(s) {
            assert!(t.iter().all(|x| x.is_finite()));
        }
    }
});
