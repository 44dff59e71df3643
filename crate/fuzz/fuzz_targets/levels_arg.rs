#![no_main]

use libfuzzer_sys::fuzz_target;

// The --levels argument parser must be total over all strings.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = superdescent::parse_levels(text);
    }
});
