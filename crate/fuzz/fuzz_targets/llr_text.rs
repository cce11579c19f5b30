#![no_main]

use libfuzzer_sys::fuzz_target;
use prodpolar::textio::parse_llrs;
use prodpolar::LlrWord;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = parse_llrs(text) {
        assert!(v.iter().all(|x| !x.is_nan()));
        let w = LlrWord::new(v).unwrap();
        assert!(w.iter().all(|x| x.abs() <= prodpolar::LLR_SAT));
    }
});
