//! LLR-domain successive cancellation (SC) and SC list (SCL) decoders.
//!
//! Both decoders walk the depth-first tree of `x = u · T_N` in natural index
//! order. For a node of length `2m` with input LLRs `(a, b)` split in halves,
//! the left child sees `f(a, b)` and the right child `g(a, b, x_left)`; the
//! node re-encodes as `[x_left ⊕ x_right, x_right]`.
//!
//! LLR convention: positive favors bit 0. Inputs are clamped to
//! `±LLR_SAT` on entry and NaN is read as an erasure. A leaf LLR of exactly
//! zero decides 0.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::latency::{delta, Algo};
use crate::polar::{transform_bytes, PolarCode};

/// Finite stand-in for an infinitely reliable LLR.
pub const LLR_SAT: f64 = 1000.0;

#[inline]
pub fn saturate(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-LLR_SAT, LLR_SAT)
    }
}

/// Check-node update, min-sum form.
#[inline]
pub fn f_node(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Exact check-node update `2·atanh(tanh(a/2)·tanh(b/2))` in a form that stays
/// finite for saturated inputs.
#[inline]
pub fn f_node_exact(a: f64, b: f64) -> f64 {
    f_node(a, b) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Variable-node update given the left child's partial sum.
#[inline]
pub fn g_node(a: f64, b: f64, partial: u8) -> f64 {
    if partial & 1 == 0 {
        b + a
    } else {
        b - a
    }
}

/// Check-node kernel selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckNode {
    #[default]
    MinSum,
    Exact,
}

impl CheckNode {
    #[inline]
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            CheckNode::MinSum => f_node(a, b),
            CheckNode::Exact => f_node_exact(a, b),
        }
    }
}

/// A vector of channel LLRs, saturated to `±LLR_SAT`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrWord(Vec<f64>);

impl LlrWord {
    /// Saturates `values`; NaN entries are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for (i, v) in values.iter_mut().enumerate() {
            if v.is_nan() {
                return Err(Error::param(format!("LLR {i} is NaN")));
            }
            *v = v.clamp(-LLR_SAT, LLR_SAT);
        }
        Ok(LlrWord(values))
    }

    /// Noiseless observation of `x`: `+LLR_SAT` for 0, `−LLR_SAT` for 1.
    pub fn from_hard(x: &BitWord) -> Self {
        LlrWord(
            x.iter()
                .map(|b| if b { -LLR_SAT } else { LLR_SAT })
                .collect(),
        )
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for LlrWord {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Input-vector estimate; zero on the frozen set.
    pub u_hat: BitWord,
    /// `u_hat · T_N`.
    pub x_hat: BitWord,
    /// Modeled decoding time steps.
    pub steps: u64,
}

pub trait PolarDecoder {
    fn code(&self) -> &PolarCode;

    fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult>;

    /// Modeled time steps attached to every result.
    fn steps(&self) -> u64;
}

fn check_len(code: &PolarCode, llr: &[f64]) -> Result<()> {
    if llr.len() != code.len() {
        return Err(Error::dims(format!("{} LLRs", code.len()), llr.len()));
    }
    Ok(())
}

/// Plain SC decoder with reusable scratch memory.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    code: PolarCode,
    check: CheckNode,
    /// `frozen_prefix[i]` = number of frozen indices below `i`.
    frozen_prefix: Vec<u32>,
    root: Vec<f64>,
    scratch: Vec<f64>,
    u: Vec<u8>,
    x: Vec<u8>,
}

impl ScDecoder {
    pub fn new(code: PolarCode) -> Self {
        Self::with_check_node(code, CheckNode::MinSum)
    }

    pub fn with_check_node(code: PolarCode, check: CheckNode) -> Self {
        let n = code.len();
        let mut frozen_prefix = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        frozen_prefix.push(0);
        for &f in code.frozen_mask() {
            acc += u32::from(f);
            frozen_prefix.push(acc);
        }
        ScDecoder {
            code,
            check,
            frozen_prefix,
            root: vec![0.0; n],
            scratch: vec![0.0; n.saturating_sub(1)],
            u: vec![0; n],
            x: vec![0; n],
        }
    }
}

struct ScCtx<'a> {
    mask: &'a [bool],
    prefix: &'a [u32],
    check: CheckNode,
}

impl ScCtx<'_> {
    fn all_frozen(&self, base: usize, len: usize) -> bool {
        (self.prefix[base + len] - self.prefix[base]) as usize == len
    }

    fn node(&self, base: usize, llr: &[f64], scratch: &mut [f64], u: &mut [u8], x: &mut [u8]) {
        let len = llr.len();
        if self.all_frozen(base, len) {
            u.fill(0);
            x.fill(0);
            return;
        }
        if len == 1 {
            let bit = u8::from(!self.mask[base] && llr[0] < 0.0);
            u[0] = bit;
            x[0] = bit;
            return;
        }
        let half = len / 2;
        let (child, rest) = scratch.split_at_mut(half);
        let (a, b) = llr.split_at(half);
        for ((c, &ai), &bi) in child.iter_mut().zip(a).zip(b) {
            *c = self.check.apply(ai, bi);
        }
        let (ul, ur) = u.split_at_mut(half);
        let (xl, xr) = x.split_at_mut(half);
        self.node(base, child, rest, ul, xl);
        for (((c, &ai), &bi), &p) in child.iter_mut().zip(a).zip(b).zip(xl.iter()) {
            *c = g_node(ai, bi, p);
        }
        self.node(base + half, child, rest, ur, xr);
        for (l, &r) in xl.iter_mut().zip(xr.iter()) {
            *l ^= r;
        }
    }
}

impl PolarDecoder for ScDecoder {
    fn code(&self) -> &PolarCode {
        &self.code
    }

    fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        check_len(&self.code, llr)?;
        for (r, &v) in self.root.iter_mut().zip(llr) {
            *r = saturate(v);
        }
        let ctx = ScCtx {
            mask: self.code.frozen_mask(),
            prefix: &self.frozen_prefix,
            check: self.check,
        };
        ctx.node(0, &self.root, &mut self.scratch, &mut self.u, &mut self.x);
        Ok(DecodeResult {
            u_hat: BitWord::from_bits(&self.u),
            x_hat: BitWord::from_bits(&self.x),
            steps: self.steps(),
        })
    }

    fn steps(&self) -> u64 {
        delta(Algo::Sc, self.code.len(), self.code.dimension())
    }
}

/// Metric update for one leaf decision: a decision against the LLR's hard
/// decision costs `|llr|`.
#[inline]
pub fn path_penalty(llr: f64, bit: u8) -> f64 {
    let hard = u8::from(llr < 0.0);
    if bit == hard {
        0.0
    } else {
        llr.abs()
    }
}

/// SCL decoder with LLR-based path metrics and no CRC; returns the path with
/// the smallest metric (lowest list position on ties).
#[derive(Debug, Clone)]
pub struct SclDecoder {
    code: PolarCode,
    list_size: usize,
    check: CheckNode,
    last_metrics: Vec<f64>,
}

/// Per-node output of the list recursion: partial codewords (path-major) and,
/// for each surviving path, the index of the input path it descends from.
struct ListOut {
    x: Vec<u8>,
    parent: Vec<usize>,
}

impl SclDecoder {
    pub fn new(code: PolarCode, list_size: usize) -> Result<Self> {
        Self::with_check_node(code, list_size, CheckNode::MinSum)
    }

    pub fn with_check_node(code: PolarCode, list_size: usize, check: CheckNode) -> Result<Self> {
        if list_size < 1 {
            return Err(Error::param("list size must be at least 1"));
        }
        Ok(SclDecoder {
            code,
            list_size,
            check,
            last_metrics: Vec::new(),
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    /// Metrics of the surviving paths after the last decode, in list order.
    pub fn last_metrics(&self) -> &[f64] {
        &self.last_metrics
    }

    fn leaf(&self, idx: usize, llr: &[f64], metrics: &mut Vec<f64>) -> ListOut {
        let paths = llr.len();
        if self.code.is_frozen(idx) {
            for (m, &l) in metrics.iter_mut().zip(llr) {
                *m += path_penalty(l, 0);
            }
            return ListOut {
                x: vec![0; paths],
                parent: (0..paths).collect(),
            };
        }
        let mut cands: Vec<(f64, usize, u8)> = Vec::with_capacity(2 * paths);
        for (p, (&m, &l)) in metrics.iter().zip(llr).enumerate() {
            cands.push((m + path_penalty(l, 0), p, 0));
            cands.push((m + path_penalty(l, 1), p, 1));
        }
        if cands.len() > self.list_size {
            // stable: ties keep candidate order (lower path, bit 0 first)
            cands.sort_by(|a, b| a.0.total_cmp(&b.0));
            cands.truncate(self.list_size);
        }
        metrics.clear();
        metrics.extend(cands.iter().map(|c| c.0));
        ListOut {
            x: cands.iter().map(|c| c.2).collect(),
            parent: cands.iter().map(|c| c.1).collect(),
        }
    }

    fn node(&self, base: usize, len: usize, llr: &[f64], metrics: &mut Vec<f64>) -> ListOut {
        if len == 1 {
            return self.leaf(base, llr, metrics);
        }
        let paths = llr.len() / len;
        let half = len / 2;
        let mut child = Vec::with_capacity(paths * half);
        for p in 0..paths {
            let (a, b) = llr[p * len..(p + 1) * len].split_at(half);
            child.extend(a.iter().zip(b).map(|(&ai, &bi)| self.check.apply(ai, bi)));
        }
        let left = self.node(base, half, &child, metrics);

        child.clear();
        for (q, &p) in left.parent.iter().enumerate() {
            let (a, b) = llr[p * len..(p + 1) * len].split_at(half);
            let xl = &left.x[q * half..(q + 1) * half];
            child.extend(
                a.iter()
                    .zip(b)
                    .zip(xl)
                    .map(|((&ai, &bi), &s)| g_node(ai, bi, s)),
            );
        }
        let right = self.node(base + half, half, &child, metrics);

        let mut x = Vec::with_capacity(right.parent.len() * len);
        for (r, &q) in right.parent.iter().enumerate() {
            let xl = &left.x[q * half..(q + 1) * half];
            let xr = &right.x[r * half..(r + 1) * half];
            x.extend(xl.iter().zip(xr).map(|(&l, &r)| l ^ r));
            x.extend_from_slice(xr);
        }
        ListOut {
            x,
            parent: right.parent.iter().map(|&q| left.parent[q]).collect(),
        }
    }
}

impl PolarDecoder for SclDecoder {
    fn code(&self) -> &PolarCode {
        &self.code
    }

    fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        check_len(&self.code, llr)?;
        let n = self.code.len();
        let root: Vec<f64> = llr.iter().map(|&v| saturate(v)).collect();
        let mut metrics = vec![0.0];
        let out = self.node(0, n, &root, &mut metrics);
        let best = metrics
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("list is never empty");
        let x = &out.x[best * n..(best + 1) * n];
        let mut u = x.to_vec();
        transform_bytes(&mut u);
        self.last_metrics = metrics;
        Ok(DecodeResult {
            u_hat: BitWord::from_bits(&u),
            x_hat: BitWord::from_bits(x),
            steps: self.steps(),
        })
    }

    fn steps(&self) -> u64 {
        delta(Algo::Scl, self.code.len(), self.code.dimension())
    }
}

/// Component/flat decoder family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Sc,
    Scl { list_size: usize },
}

impl DecoderKind {
    pub fn algo(self) -> Algo {
        match self {
            DecoderKind::Sc => Algo::Sc,
            DecoderKind::Scl { .. } => Algo::Scl,
        }
    }
}

/// Statically dispatched SC or SCL decoder.
#[derive(Debug, Clone)]
pub enum Decoder {
    Sc(ScDecoder),
    Scl(SclDecoder),
}

impl Decoder {
    pub fn new(kind: DecoderKind, code: PolarCode, check: CheckNode) -> Result<Self> {
        Ok(match kind {
            DecoderKind::Sc => Decoder::Sc(ScDecoder::with_check_node(code, check)),
            DecoderKind::Scl { list_size } => {
                Decoder::Scl(SclDecoder::with_check_node(code, list_size, check)?)
            }
        })
    }
}

impl PolarDecoder for Decoder {
    fn code(&self) -> &PolarCode {
        match self {
            Decoder::Sc(d) => d.code(),
            Decoder::Scl(d) => d.code(),
        }
    }

    fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        match self {
            Decoder::Sc(d) => d.decode(llr),
            Decoder::Scl(d) => d.decode(llr),
        }
    }

    fn steps(&self) -> u64 {
        match self {
            Decoder::Sc(d) => d.steps(),
            Decoder::Scl(d) => d.steps(),
        }
    }
}

pub fn sc_decode(code: &PolarCode, y: &LlrWord) -> Result<DecodeResult> {
    ScDecoder::new(code.clone()).decode(y)
}

pub fn scl_decode(code: &PolarCode, y: &LlrWord, list_size: usize) -> Result<DecodeResult> {
    SclDecoder::new(code.clone(), list_size)?.decode(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::{construct, transform};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn node_updates() {
        assert_eq!(f_node(2.0, -3.0), -2.0);
        assert_eq!(f_node(-4.0, -1.5), 1.5);
        assert_eq!(g_node(2.0, 5.0, 1), 3.0);
        assert_eq!(g_node(2.0, 5.0, 0), 7.0);
        assert_eq!(g_node(-1.25, 0.5, 0), -0.75);
    }

    #[test]
    fn exact_check_node_matches_atanh_form() {
        for &(a, b) in &[
            (1.0, 1.0),
            (1.0, -1.0),
            (0.3, 2.5),
            (-4.0, -0.1),
            (7.0, 12.0),
            (0.0, 3.0),
        ] {
            let want = 2.0 * ((a / 2.0f64).tanh() * (b / 2.0f64).tanh()).atanh();
            assert!((f_node_exact(a, b) - want).abs() < 1e-9, "({a},{b})");
        }
        assert!(f_node_exact(LLR_SAT, -LLR_SAT).is_finite());
        assert!((f_node_exact(LLR_SAT, -LLR_SAT) + LLR_SAT - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn hand_traced_length_two() {
        let code = PolarCode::from_frozen_set(1, &[0]).unwrap();
        let y = LlrWord::new(vec![-3.0, 1.0]).unwrap();
        let r = sc_decode(&code, &y).unwrap();
        assert_eq!(r.u_hat.to_bits(), vec![0, 1]);
        assert_eq!(r.x_hat.to_bits(), vec![1, 1]);
        assert_eq!(r.steps, 2);
    }

    #[test]
    fn sc_steps_model() {
        let code = construct(10, 784, 0.5).unwrap();
        assert_eq!(ScDecoder::new(code.clone()).steps(), 2046);
        assert_eq!(SclDecoder::new(code, 4).unwrap().steps(), 2830);
    }

    #[test]
    fn noiseless_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = construct(7, 70, 0.5).unwrap();
        let mut sc = ScDecoder::new(code.clone());
        let mut scl = SclDecoder::new(code.clone(), 4).unwrap();
        for _ in 0..50 {
            let msg = BitWord::from_bools((0..70).map(|_| rng.random::<bool>()));
            let x = code.encode(&msg).unwrap();
            let y = LlrWord::from_hard(&x);
            for r in [sc.decode(&y).unwrap(), scl.decode(&y).unwrap()] {
                assert_eq!(r.x_hat, x);
                assert_eq!(code.extract_message(&r.u_hat).unwrap(), msg);
            }
        }
    }

    #[test]
    fn rate_one_inverts_transform() {
        let code = PolarCode::rate_one(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut dec = ScDecoder::new(code);
        for _ in 0..20 {
            let x = BitWord::from_bools((0..32).map(|_| rng.random::<bool>()));
            let r = dec.decode(&LlrWord::from_hard(&x)).unwrap();
            assert_eq!(r.x_hat, x);
            assert_eq!(r.u_hat, transform(&x).unwrap());
        }
    }

    #[test]
    fn results_satisfy_invariants_on_noise() {
        let code = construct(6, 30, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut decs = [
            Decoder::new(DecoderKind::Sc, code.clone(), CheckNode::MinSum).unwrap(),
            Decoder::new(DecoderKind::Sc, code.clone(), CheckNode::Exact).unwrap(),
            Decoder::new(
                DecoderKind::Scl { list_size: 8 },
                code.clone(),
                CheckNode::MinSum,
            )
            .unwrap(),
        ];
        for _ in 0..100 {
            let y: Vec<f64> = (0..64).map(|_| rng.random_range(-4.0..4.0)).collect();
            for d in decs.iter_mut() {
                let r = d.decode(&y).unwrap();
                assert_eq!(r.x_hat, transform(&r.u_hat).unwrap());
                assert!(code.frozen_set().iter().all(|&i| !r.u_hat.get(i)));
                assert_eq!(r, d.decode(&y).unwrap(), "deterministic");
            }
        }
    }

    #[test]
    fn list_of_one_is_sc() {
        let code = construct(8, 128, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut sc = ScDecoder::new(code.clone());
        let mut scl = SclDecoder::new(code, 1).unwrap();
        for _ in 0..100 {
            let y: Vec<f64> = (0..256).map(|_| rng.random_range(-3.0..5.0)).collect();
            let (a, b) = (sc.decode(&y).unwrap(), scl.decode(&y).unwrap());
            assert_eq!((a.u_hat, a.x_hat), (b.u_hat, b.x_hat));
        }
    }

    #[test]
    fn all_zero_llrs_decode_to_zero() {
        let code = construct(5, 20, 0.5).unwrap();
        for r in [
            sc_decode(&code, &LlrWord::new(vec![0.0; 32]).unwrap()).unwrap(),
            scl_decode(&code, &LlrWord::new(vec![0.0; 32]).unwrap(), 4).unwrap(),
        ] {
            assert!(r.u_hat.is_zero() && r.x_hat.is_zero());
        }
    }

    #[test]
    fn penalties_are_nonnegative() {
        for &l in &[-5.0, -0.0, 0.0, 1e-9, 3.0, LLR_SAT] {
            for bit in [0, 1] {
                assert!(path_penalty(l, bit) >= 0.0);
            }
        }
        assert_eq!(path_penalty(-2.0, 0), 2.0);
        assert_eq!(path_penalty(-2.0, 1), 0.0);
        assert_eq!(path_penalty(0.0, 1), 0.0);
    }

    #[test]
    fn list_metrics_are_sorted_and_nonnegative() {
        let code = construct(6, 32, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut scl = SclDecoder::new(code, 8).unwrap();
        for _ in 0..20 {
            let y: Vec<f64> = (0..64).map(|_| rng.random_range(-2.0..3.0)).collect();
            scl.decode(&y).unwrap();
            let m = scl.last_metrics();
            assert_eq!(m.len(), 8);
            assert!(m.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn errors() {
        let code = construct(3, 4, 0.5).unwrap();
        assert!(SclDecoder::new(code.clone(), 0).is_err());
        assert!(ScDecoder::new(code.clone()).decode(&[0.0; 7]).is_err());
        assert!(LlrWord::new(vec![f64::NAN]).is_err());
        assert_eq!(
            &*LlrWord::new(vec![f64::INFINITY, -5e9]).unwrap(),
            &[LLR_SAT, -LLR_SAT]
        );
    }

    #[test]
    fn nan_and_infinite_inputs_do_not_panic() {
        let code = construct(4, 8, 0.5).unwrap();
        let y = [
            f64::NAN,
            f64::INFINITY,
            f64::NEG_INFINITY,
            1e308,
            -1e308,
            0.0,
            1.0,
            -1.0,
            f64::NAN,
            2.0,
            3.0,
            -4.0,
            5.0,
            f64::MIN_POSITIVE,
            -0.0,
            6.0,
        ];
        ScDecoder::new(code.clone()).decode(&y).unwrap();
        SclDecoder::new(code, 4).unwrap().decode(&y).unwrap();
    }
}
