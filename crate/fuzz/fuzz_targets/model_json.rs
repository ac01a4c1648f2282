#![no_main]

use libfuzzer_sys::fuzz_target;
use modal_fixpoint::kripke::{forces, KripkeModel};
use modal_fixpoint::Formula;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = KripkeModel::from_json(text) else { return };
    assert_eq!(KripkeModel::from_json(&m.to_json()).unwrap(), m);
    let probe = Formula::boxed(Formula::falsum());
    for w in 0..m.worlds() {
        forces(&m, w, &probe).unwrap();
    }
});
