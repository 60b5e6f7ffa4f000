#![no_main]

use hornscan::report::{parse_report, render_report};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = parse_report(text) {
        let rendered = render_report(&report).expect("parsed report must render");
        let back = parse_report(&rendered).expect("rendered report must reparse");
        assert_eq!(render_report(&back).expect("round trip renders"), rendered);
    }
});
