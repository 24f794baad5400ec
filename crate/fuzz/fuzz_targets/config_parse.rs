#![no_main]
use libfuzzer_sys::fuzz_target;
use loopint::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(c) = RunConfig::parse(s) {
            // accepted configs must survive their canonical form
            assert_eq!(RunConfig::parse(&c.to_text()).ok(), Some(c));
        }
    }
});
