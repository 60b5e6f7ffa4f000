#![no_main]

use hornscan::config::{emit, parse_config};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = parse_config(text) {
        // Anything that parses must survive the resolve/reparse cycle.
        let resolved = emit(&config);
        parse_config(&resolved).expect("resolved config must reparse");
    }
});
