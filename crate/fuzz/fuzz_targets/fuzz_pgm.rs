#![no_main]

use hornscan::pgm::parse_pgm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = parse_pgm(data) {
        assert_eq!(img.pixels.len(), img.width * img.height);
        assert!(img.maxval >= 1 && img.maxval <= 255);
    }
});
