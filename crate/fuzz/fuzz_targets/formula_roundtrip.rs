#![no_main]

use libfuzzer_sys::fuzz_target;
use modal_fixpoint::parse::parse_internal;
use modal_fixpoint::{print, simplify};

// print ∘ parse is the identity on formulas, with and without sugar.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(f) = parse_internal(text) else { return };
    for sugar in [false, true] {
        let printed = print(&f, sugar);
        assert_eq!(parse_internal(&printed).unwrap(), f, "{printed}");
    }
    let s = simplify(&f);
    assert_eq!(simplify(&s), s);
});
