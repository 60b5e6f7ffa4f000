#![no_main]

use hornscan::table::{parse_fan_csv, parse_profile_csv, render_fan_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_fan_csv(text) {
        // The grammar admits only finite fields, and rendering is lossless.
        for r in &rows {
            assert!(r.voltage.is_finite() && r.theta_int.is_finite());
        }
        let back = parse_fan_csv(&render_fan_csv(&rows)).expect("fan csv round trip");
        assert_eq!(back.len(), rows.len());
    }
    if let Ok(samples) = parse_profile_csv(text) {
        for s in &samples {
            assert!(s.z.is_finite() && s.width_walls.is_finite());
        }
    }
});
