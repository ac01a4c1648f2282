#![no_main]

use libfuzzer_sys::fuzz_target;
use modal_fixpoint::proof::{check, Certificate};

// Decoding never panics; decoded certificates re-encode byte-stably and the
// kernel returns a verdict on them.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cert) = Certificate::from_json(text) else { return };
    let once = cert.to_json();
    let back = Certificate::from_json(&once).unwrap();
    assert_eq!(back, cert);
    assert_eq!(back.to_json(), once);
    // Truth tables are exponential in the atom count; keep runs short.
    if text.len() < 2048 {
        let _ = check(&cert);
    }
});
