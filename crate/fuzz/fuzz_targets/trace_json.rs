#![no_main]

use libfuzzer_sys::fuzz_target;
use modal_fixpoint::{LogicIndex, SynthTrace};

fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let n = LogicIndex::new(usize::from(k % 4) + 1).unwrap();
    let Ok(t) = SynthTrace::from_json(text, n) else { return };
    assert_eq!(SynthTrace::from_json(&t.to_json(), n).unwrap(), t);
});
