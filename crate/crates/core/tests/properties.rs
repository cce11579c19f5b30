use proptest::prelude::*;

use prodpolar::gf2::t_matrix;
use prodpolar::latency::{Algo, LatencyModelInput, ProductShape};
use prodpolar::polar::transform_in_place;
use prodpolar::{
    build_product_code, construct, find_erroneous_estimations, kron, product_delta, row_vectorize,
    transform, BitMatrix, BitWord, LlrWord, PolarCode, PolarDecoder, ScDecoder, SclDecoder,
};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(any::<bool>(), r * c)
            .prop_map(move |v| BitMatrix::from_fn(r, c, |i, j| v[i * c + j]))
    })
}

fn word(len: usize) -> impl Strategy<Value = BitWord> {
    prop::collection::vec(any::<bool>(), len).prop_map(BitWord::from_bools)
}

fn sized_word(max_log: u32) -> impl Strategy<Value = BitWord> {
    (1..=max_log).prop_flat_map(|n| word(1 << n))
}

/// Chainable triple `A (p×q)`, `B (q×r)`, `C (r×s)`.
fn triple() -> impl Strategy<Value = (BitMatrix, BitMatrix, BitMatrix)> {
    (1..=8usize, 1..=8usize, 1..=8usize, 1..=8usize).prop_flat_map(|(p, q, r, s)| {
        let m = |rows: usize, cols: usize| {
            prop::collection::vec(any::<bool>(), rows * cols)
                .prop_map(move |v| BitMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
        };
        (m(p, q), m(q, r), m(r, s))
    })
}

/// Random polar code of length `2^n` with a Bhattacharyya frozen set.
fn code(n_range: std::ops::RangeInclusive<u32>) -> impl Strategy<Value = PolarCode> {
    n_range
        .prop_flat_map(|n| (Just(n), 0..=(1usize << n), 0.05f64..0.95))
        .prop_map(|(n, k, z0)| construct(n, k, z0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn row_of_triple_product((a, b, c) in triple()) {
        let abc = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let rhs = BitMatrix::row_matrix(&row_vectorize(&b)).matmul(&kron(&a.transpose(), &c)).unwrap();
        prop_assert_eq!(row_vectorize(&abc), rhs.row(0));
    }

    #[test]
    fn kron_mixed_product((a, c) in (matrix(4, 4), matrix(4, 4)), (bc, dc) in (1..=4usize, 1..=4usize), seed in any::<u64>()) {
        // (A ⊗ B)(C ⊗ D) = AC ⊗ BD for conformable shapes
        let mut s = seed;
        let mut bit = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 63) == 1 };
        let cc = BitMatrix::from_fn(a.cols(), bc, |_, _| bit());
        let d = BitMatrix::from_fn(c.cols(), dc, |_, _| bit());
        let lhs = kron(&a, &c).matmul(&kron(&cc, &d)).unwrap();
        let rhs = kron(&a.matmul(&cc).unwrap(), &c.matmul(&d).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn transform_is_an_involution(v in sized_word(10)) {
        let once = transform(&v).unwrap();
        prop_assert_eq!(transform(&once).unwrap(), v);
    }

    #[test]
    fn butterfly_matches_dense_transform(v in sized_word(8)) {
        let n = v.len().trailing_zeros();
        let dense = BitMatrix::row_matrix(&v).matmul(&t_matrix(n).unwrap()).unwrap().row(0);
        let mut fast = v.clone();
        transform_in_place(&mut fast).unwrap();
        prop_assert_eq!(fast, dense);
    }

    #[test]
    fn encoding_is_linear(c in code(1..=9), seed in any::<u64>()) {
        let k = c.dimension();
        let m1 = BitWord::from_bools((0..k).map(|i| (seed.rotate_left(i as u32) & 1) == 1));
        let m2 = BitWord::from_bools((0..k).map(|i| (seed.rotate_right(3 * i as u32) & 2) == 2));
        let lhs = c.encode(&m1.xor(&m2).unwrap()).unwrap();
        let rhs = c.encode(&m1).unwrap().xor(&c.encode(&m2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(c.encode(&BitWord::zeros(k)).unwrap().is_zero());
    }

    #[test]
    fn expand_extract_round_trip(c in code(1..=9), seed in any::<u64>()) {
        let msg = BitWord::from_bools((0..c.dimension()).map(|i| (seed >> (i % 64)) & 1 == 1));
        let u = c.expand_message(&msg).unwrap();
        prop_assert!(c.frozen_set().iter().all(|&i| !u.get(i)));
        prop_assert_eq!(c.extract_message(&u).unwrap(), msg.clone());
        prop_assert!(c.is_codeword(&c.encode(&msg).unwrap()));
    }

    #[test]
    fn product_and_flat_encoding_agree(col in code(1..=5), row in code(1..=5), seed in any::<u64>()) {
        let p = build_product_code(col, row).unwrap();
        let msg = BitWord::from_bools((0..p.dimension()).map(|i| (seed.rotate_left((i * 7) as u32) & 1) == 1));
        let x = p.encode_message(&msg).unwrap();
        prop_assert_eq!(x.row_vectorize(), p.flat_code().encode(&msg).unwrap());
        prop_assert_eq!(&x, &p.encode_product_columns_first(&p.fill_input_matrix(&msg).unwrap()).unwrap());
        prop_assert!(p.is_product_codeword(&x));
        prop_assert_eq!(p.recover_message(&x.row_vectorize()).unwrap(), msg);
    }

    #[test]
    fn frozen_membership_by_row_or_column(col in code(1..=5), row in code(1..=5)) {
        let p = build_product_code(col.clone(), row.clone()).unwrap();
        let nr = row.len();
        for i in 0..p.len() {
            let want = col.is_frozen(i / nr) || row.is_frozen(i % nr);
            prop_assert_eq!(p.flat_code().is_frozen(i), want);
        }
        prop_assert_eq!(p.dimension(), col.dimension() * row.dimension());
    }

    #[test]
    fn flagging_clears_every_mismatch(
        (xr, xc) in (1..=16usize, 1..=16usize).prop_flat_map(|(r, c)| {
            let m = move || prop::collection::vec(any::<bool>(), r * c).prop_map(move |v| BitMatrix::from_fn(r, c, |i, j| v[i * c + j]));
            (m(), m())
        })
    ) {
        let rep = find_erroneous_estimations(&xr, &xc).unwrap();
        let mut d = xr.xor(&xc).unwrap();
        for &i in &rep.err_rows { d.clear_row(i); }
        for &j in &rep.err_cols { d.clear_column(j); }
        prop_assert!(d.is_zero());
        prop_assert!(rep.iterations <= xr.rows() + xr.cols());
        prop_assert_eq!(rep.iterations, rep.err_rows.len() + rep.err_cols.len());
        if xr == xc { prop_assert_eq!(rep.iterations, 0); }
    }

    #[test]
    fn product_latency_monotone_in_gamma(g1 in 0.0f64..=1.0, g2 in 0.0f64..=1.0, t_avg in 1.0f64..8.0) {
        let shape = ProductShape::square(1024, 784).unwrap();
        for algo in [Algo::Sc, Algo::Scl] {
            let at = |gamma| product_delta(&LatencyModelInput { algo, shape, t_avg, gamma });
            let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
            prop_assert!(at(lo) <= at(hi));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decoders_return_consistent_codewords(c in code(1..=7), llr in prop::collection::vec(-20.0f64..20.0, 128)) {
        let y = &llr[..c.len()];
        let mut sc = ScDecoder::new(c.clone());
        let r = sc.decode(y).unwrap();
        prop_assert_eq!(&r.x_hat, &transform(&r.u_hat).unwrap());
        prop_assert!(c.frozen_set().iter().all(|&i| !r.u_hat.get(i)));
        for l in [1usize, 2, 4] {
            let mut scl = SclDecoder::new(c.clone(), l).unwrap();
            let s = scl.decode(y).unwrap();
            prop_assert!(c.is_codeword(&s.x_hat));
            prop_assert_eq!(&s.x_hat, &transform(&s.u_hat).unwrap());
            if l == 1 {
                prop_assert_eq!(&s.u_hat, &r.u_hat);
            }
        }
    }

    #[test]
    fn noiseless_words_decode_exactly(c in code(1..=8), seed in any::<u64>()) {
        let msg = BitWord::from_bools((0..c.dimension()).map(|i| (seed.rotate_left(i as u32) & 1) == 1));
        let x = c.encode(&msg).unwrap();
        let y = LlrWord::from_hard(&x);
        prop_assert_eq!(&ScDecoder::new(c.clone()).decode(&y).unwrap().x_hat, &x);
        prop_assert_eq!(&SclDecoder::new(c.clone(), 4).unwrap().decode(&y).unwrap().x_hat, &x);
    }
}
