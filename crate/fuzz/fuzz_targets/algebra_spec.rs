#![no_main]

use libfuzzer_sys::fuzz_target;

// Spec parsing and validation must be total: reject, never panic.
fuzz_target!(|data: &[u8]| {
    let _ = superdescent::AlgebraSpec::from_slice(data);
});
