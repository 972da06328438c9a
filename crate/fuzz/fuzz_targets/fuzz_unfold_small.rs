#![no_main]

use libfuzzer_sys::fuzz_target;
use prnet::io::parse_model;
use prnet::prefix::{build_cfp, PrefixOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(model) = parse_model(text) else { return };
    // Keep instances tiny: the harness hunts for panics and inconsistent
    // bookkeeping, not scale.
    if model.prn.node_count() > 4 || model.prn.param_count() > 64 {
        return;
    }
    if (0..model.prn.node_count()).any(|v| model.prn.max_of(v) > 3) {
        return;
    }
    let options = PrefixOptions { max_events: Some(200) };
    let prefix = build_cfp(&model.prn, &model.constraints, &model.init, &options);
    let events = prefix.net.events();
    for e in events {
        assert!(!e.bx.is_empty(), "inserted event with an empty box");
        if let Some(cutoff) = e.cutoff {
            let witness = &events[cutoff.witness];
            assert_ne!(witness.id, e.id, "event witnesses itself");
            assert_eq!(witness.state, e.state, "cut-off state mismatch");
            assert!(e.bx.is_subset_of(&witness.bx), "cut-off box not covered");
        }
    }
});
