#![no_main]

use libfuzzer_sys::fuzz_target;
use prodpolar::textio::{format_frozen_set, parse_frozen_set};
use prodpolar::PolarCode;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(set) = parse_frozen_set(text) {
        assert!(set.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(parse_frozen_set(&format_frozen_set(&set)).unwrap(), set);
        let _ = PolarCode::from_frozen_set(8, &set);
    }
});
