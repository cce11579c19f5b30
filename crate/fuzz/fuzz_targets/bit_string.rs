#![no_main]

use libfuzzer_sys::fuzz_target;
use prodpolar::textio::{format_bits, parse_bits};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(w) = parse_bits(text) {
        assert_eq!(parse_bits(&format_bits(&w)).unwrap(), w);
    }
});
