#![no_main]

use libfuzzer_sys::fuzz_target;
use modal_fixpoint::parse;

// Arbitrary text never panics, and error positions stay inside the input.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Err(e) = parse(text) {
        let (line, column) = e.position();
        let lines: Vec<&str> = text.split('\n').collect();
        assert!(line >= 1 && line <= lines.len());
        assert!(column >= 1 && column <= lines[line - 1].chars().count() + 1);
    }
});
