#![no_main]

use libfuzzer_sys::fuzz_target;
use prnet::io::{parse_model, print_model};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(model) = parse_model(text) else { return };
    // The canonical form must survive a round trip byte-for-byte.
    let printed = print_model(&model);
    let reparsed = parse_model(&printed).expect("canonical output must parse");
    assert_eq!(print_model(&reparsed), printed);
});
