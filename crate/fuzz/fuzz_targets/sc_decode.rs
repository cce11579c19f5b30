#![no_main]

use libfuzzer_sys::fuzz_target;
use prodpolar::{construct, transform, CheckNode, PolarDecoder, ScDecoder};

// byte 0: log length (1..=8), byte 1: dimension, byte 2: check node,
// remaining bytes: LLRs as i8 / 4.
fuzz_target!(|data: &[u8]| {
    let [n, k, check, rest @ ..] = data else {
        return;
    };
    let n = u32::from(n % 8) + 1;
    let len = 1usize << n;
    let code = construct(n, usize::from(*k) % (len + 1), 0.5).unwrap();
    let check = if check & 1 == 1 {
        CheckNode::Exact
    } else {
        CheckNode::MinSum
    };
    let llr: Vec<f64> = (0..len)
        .map(|i| rest.get(i).map_or(0.0, |&b| f64::from(b as i8) / 4.0))
        .collect();
    let r = ScDecoder::with_check_node(code.clone(), check)
        .decode(&llr)
        .unwrap();
    assert_eq!(r.x_hat, transform(&r.u_hat).unwrap());
    assert!(code.frozen_set().iter().all(|&i| !r.u_hat.get(i)));
});
