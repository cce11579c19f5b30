#![no_main]

use libfuzzer_sys::fuzz_target;
use prodpolar::{construct, PolarDecoder, SclDecoder};

// byte 0: log length (1..=7), byte 1: dimension, byte 2: list size (1..=8),
// remaining bytes: LLRs as i8 / 4.
fuzz_target!(|data: &[u8]| {
    let [n, k, l, rest @ ..] = data else {
        return;
    };
    let n = u32::from(n % 7) + 1;
    let len = 1usize << n;
    let code = construct(n, usize::from(*k) % (len + 1), 0.5).unwrap();
    let llr: Vec<f64> = (0..len)
        .map(|i| rest.get(i).map_or(0.0, |&b| f64::from(b as i8) / 4.0))
        .collect();
    let mut dec = SclDecoder::new(code.clone(), usize::from(l % 8) + 1).unwrap();
    let r = dec.decode(&llr).unwrap();
    assert!(code.is_codeword(&r.x_hat));
    assert!(dec
        .last_metrics()
        .iter()
        .all(|m| m.is_finite() && *m >= 0.0));
});
