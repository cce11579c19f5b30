#![no_main]

use libfuzzer_sys::fuzz_target;
use prodpolar::{build_product_code, construct, two_step_decode, DecoderKind, LlrMatrix};

// bytes 0-3: component sizes (log 1..=4) and dimensions, byte 4: t and
// component decoder, remaining bytes: LLRs as i8 / 4.
fuzz_target!(|data: &[u8]| {
    let [nr, kr, nc, kc, cfg, rest @ ..] = data else {
        return;
    };
    let (nr, nc) = (u32::from(nr % 4) + 1, u32::from(nc % 4) + 1);
    let row = construct(nr, usize::from(*kr) % ((1 << nr) + 1), 0.5).unwrap();
    let col = construct(nc, usize::from(*kc) % ((1 << nc) + 1), 0.5).unwrap();
    let p = build_product_code(col, row).unwrap();
    let llr: Vec<f64> = (0..p.len())
        .map(|i| rest.get(i).map_or(0.0, |&b| f64::from(b as i8) / 4.0))
        .collect();
    let y = LlrMatrix::new(p.rows(), p.cols(), llr).unwrap();
    let t = u32::from(cfg % 4) + 1;
    let kind = if cfg & 0x80 != 0 {
        DecoderKind::Scl { list_size: 4 }
    } else {
        DecoderKind::Sc
    };
    let out = two_step_decode(&p, &y, t, kind).unwrap();
    assert_eq!(out.msg_hat.len(), p.dimension());
    assert!(out.iterations >= 1 && out.iterations <= t);
    assert!(!(out.converged && out.used_fallback));
});
