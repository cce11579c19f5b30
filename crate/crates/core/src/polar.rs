//! Polar code definition, Bhattacharyya construction and the fast transform.

use crate::error::{Error, Result};
use crate::gf2::BitWord;

/// Largest supported `log2(N)`.
pub const MAX_LOG_LEN: u32 = 24;

/// Default Bhattacharyya design parameter.
pub const DEFAULT_Z0: f64 = 0.5;

/// Bit-channel indices ordered from least to most reliable.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilitySequence {
    order: Vec<usize>,
    z: Vec<f64>,
    design_param: f64,
}

impl ReliabilitySequence {
    /// Indices sorted from least to most reliable.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Bhattacharyya parameter per index (natural order). May underflow to
    /// zero for very reliable channels at large `n`; the ordering does not.
    pub fn z_values(&self) -> &[f64] {
        &self.z
    }

    pub fn design_param(&self) -> f64 {
        self.design_param
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Tracks `Z⁻ = 2Z − Z²` and `Z⁺ = Z²` through `n` polarization levels and
/// ranks the resulting bit channels, least reliable first.
///
/// Each channel carries `(ln Z, ln(1 − Z))` so that parameters squeezed
/// against 0 or 1 still compare correctly; ranking uses `logit(Z)`. Equal
/// parameters are ordered by ascending index.
pub fn bhattacharyya_reliabilities(n: u32, z0: f64) -> Result<ReliabilitySequence> {
    if !(z0 > 0.0 && z0 < 1.0) {
        return Err(Error::param(format!(
            "design parameter z0 must lie in (0,1), got {z0}"
        )));
    }
    if n > MAX_LOG_LEN {
        return Err(Error::param(format!(
            "n = {n} exceeds the supported maximum {MAX_LOG_LEN}"
        )));
    }
    let mut chans: Vec<(f64, f64)> = vec![(z0.ln(), (-z0).ln_1p())];
    for _ in 0..n {
        let mut next = Vec::with_capacity(chans.len() * 2);
        for &(ln_z, ln_1mz) in &chans {
            let z = ln_z.exp();
            // Z⁻: 1 − Z⁻ = (1 − Z)², Z⁻ = Z(2 − Z)
            next.push((ln_z + (2.0 - z).ln(), 2.0 * ln_1mz));
            // Z⁺: Z⁺ = Z², 1 − Z⁺ = (1 − Z)(1 + Z)
            next.push((2.0 * ln_z, ln_1mz + z.ln_1p()));
        }
        chans = next;
    }
    let logit: Vec<f64> = chans.iter().map(|&(a, b)| a - b).collect();
    let mut order: Vec<usize> = (0..chans.len()).collect();
    order.sort_by(|&a, &b| logit[b].total_cmp(&logit[a]).then(a.cmp(&b)));
    Ok(ReliabilitySequence {
        order,
        z: chans.iter().map(|&(a, _)| a.exp()).collect(),
        design_param: z0,
    })
}

/// A polar code of length `N = 2^n` and dimension `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCode {
    n: u32,
    frozen_mask: Vec<bool>,
    frozen_set: Vec<usize>,
    info_set: Vec<usize>,
}

impl PolarCode {
    /// Builds a code from an explicit frozen set (any order, no duplicates).
    pub fn from_frozen_set(n: u32, frozen: &[usize]) -> Result<Self> {
        if n > MAX_LOG_LEN {
            return Err(Error::param(format!(
                "n = {n} exceeds the supported maximum {MAX_LOG_LEN}"
            )));
        }
        let len = 1usize << n;
        let mut frozen_mask = vec![false; len];
        for &i in frozen {
            if i >= len {
                return Err(Error::param(format!(
                    "frozen index {i} out of range for N = {len}"
                )));
            }
            if frozen_mask[i] {
                return Err(Error::param(format!("duplicate frozen index {i}")));
            }
            frozen_mask[i] = true;
        }
        Ok(Self::from_mask(n, frozen_mask))
    }

    pub(crate) fn from_mask(n: u32, frozen_mask: Vec<bool>) -> Self {
        debug_assert_eq!(frozen_mask.len(), 1 << n);
        let (frozen_set, info_set) = (0..frozen_mask.len()).partition(|&i| frozen_mask[i]);
        PolarCode {
            n,
            frozen_mask,
            frozen_set,
            info_set,
        }
    }

    /// Rate-one code of length `2^n`.
    pub fn rate_one(n: u32) -> Result<Self> {
        Self::from_frozen_set(n, &[])
    }

    #[inline]
    pub fn log_len(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.frozen_mask.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.len() as f64
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    #[inline]
    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen_mask[i]
    }

    /// Indicator word with ones on the information set.
    pub fn info_indicator(&self) -> BitWord {
        BitWord::from_bools(self.frozen_mask.iter().map(|&f| !f))
    }

    /// Places `msg` on the information set (ascending index order), zeros elsewhere.
    pub fn expand_message(&self, msg: &BitWord) -> Result<BitWord> {
        if msg.len() != self.dimension() {
            return Err(Error::dims(
                format!("message of {} bits", self.dimension()),
                msg.len(),
            ));
        }
        let mut u = BitWord::zeros(self.len());
        for (k, &i) in self.info_set.iter().enumerate() {
            if msg.get(k) {
                u.set(i, true);
            }
        }
        Ok(u)
    }

    /// Reads the information-set positions of an input vector.
    pub fn extract_message(&self, u: &BitWord) -> Result<BitWord> {
        if u.len() != self.len() {
            return Err(Error::dims(self.len(), u.len()));
        }
        Ok(BitWord::from_bools(self.info_set.iter().map(|&i| u.get(i))))
    }

    pub fn encode(&self, msg: &BitWord) -> Result<BitWord> {
        let mut u = self.expand_message(msg)?;
        transform_in_place(&mut u)?;
        Ok(u)
    }

    /// True when `x` is a codeword, i.e. `x · T_N` vanishes on the frozen set.
    pub fn is_codeword(&self, x: &BitWord) -> bool {
        if x.len() != self.len() {
            return false;
        }
        let mut u = x.clone();
        transform_in_place(&mut u).expect("length is a power of two");
        self.frozen_set.iter().all(|&i| !u.get(i))
    }
}

/// Frozen set = the `N − K` least reliable entries of `rel`.
pub fn make_code(n: u32, k: usize, rel: &ReliabilitySequence) -> Result<PolarCode> {
    if n > MAX_LOG_LEN {
        return Err(Error::param(format!(
            "n = {n} exceeds the supported maximum {MAX_LOG_LEN}"
        )));
    }
    let len = 1usize << n;
    if k > len {
        return Err(Error::param(format!("K = {k} exceeds N = {len}")));
    }
    if rel.len() != len {
        return Err(Error::dims(
            format!("reliability sequence of length {len}"),
            rel.len(),
        ));
    }
    let mut mask = vec![false; len];
    for &i in &rel.order[..len - k] {
        mask[i] = true;
    }
    Ok(PolarCode::from_mask(n, mask))
}

/// Convenience: Bhattacharyya construction followed by [`make_code`].
pub fn construct(n: u32, k: usize, z0: f64) -> Result<PolarCode> {
    make_code(n, k, &bhattacharyya_reliabilities(n, z0)?)
}

const LANE_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// `v ← v · T_N`, computed by the `n`-stage butterfly on packed words.
pub fn transform_in_place(v: &mut BitWord) -> Result<()> {
    let len = v.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let words = v.words_mut();
    let mut span = 1usize;
    for mask in LANE_MASKS {
        if span >= len {
            return Ok(());
        }
        for w in words.iter_mut() {
            *w ^= (*w >> span) & mask;
        }
        span <<= 1;
    }
    let mut ws = 1usize;
    while ws < words.len() {
        for j in 0..words.len() {
            if j & ws == 0 {
                words[j] ^= words[j + ws];
            }
        }
        ws <<= 1;
    }
    Ok(())
}

pub fn transform(v: &BitWord) -> Result<BitWord> {
    let mut out = v.clone();
    transform_in_place(&mut out)?;
    Ok(out)
}

/// Byte-per-bit variant of [`transform_in_place`] for decoder internals.
pub(crate) fn transform_bytes(v: &mut [u8]) {
    debug_assert!(v.len().is_power_of_two());
    let mut span = 1;
    while span < v.len() {
        for block in v.chunks_exact_mut(2 * span) {
            let (lo, hi) = block.split_at_mut(span);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        span <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{t_matrix, BitMatrix};

    #[test]
    fn reliabilities_n1() {
        let rel = bhattacharyya_reliabilities(1, 0.5).unwrap();
        assert_eq!(rel.order(), &[0, 1]);
        let z = rel.z_values();
        assert!(
            (z[0] - 0.75).abs() < 1e-12 && (z[1] - 0.25).abs() < 1e-12,
            "{z:?}"
        );
    }

    #[test]
    fn reliabilities_n2() {
        let rel = bhattacharyya_reliabilities(2, 0.5).unwrap();
        assert_eq!(rel.order(), &[0, 1, 2, 3]);
        let z = rel.z_values();
        for (got, want) in z.iter().zip([0.9375, 0.5625, 0.4375, 0.0625]) {
            assert!((got - want).abs() < 1e-12, "{z:?}");
        }
    }

    #[test]
    fn extremes_are_fixed() {
        for n in 1..=12 {
            for z0 in [0.05, 0.3, 0.5, 0.9] {
                let rel = bhattacharyya_reliabilities(n, z0).unwrap();
                assert_eq!(rel.order()[0], 0);
                assert_eq!(*rel.order().last().unwrap(), (1 << n) - 1);
            }
        }
    }

    #[test]
    fn order_is_permutation_at_large_n() {
        let rel = bhattacharyya_reliabilities(16, 0.5).unwrap();
        let mut seen = vec![false; 1 << 16];
        for &i in rel.order() {
            assert!(!seen[i]);
            seen[i] = true;
        }
    }

    #[test]
    fn z0_out_of_range() {
        for z0 in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(bhattacharyya_reliabilities(3, z0).is_err(), "z0 = {z0}");
        }
    }

    #[test]
    fn small_codes_from_z05() {
        assert_eq!(construct(2, 2, 0.5).unwrap().frozen_set(), &[0, 1]);
        assert_eq!(construct(2, 3, 0.5).unwrap().frozen_set(), &[0]);
        assert!(construct(2, 4, 0.5).unwrap().frozen_set().is_empty());
        assert!(construct(2, 5, 0.5).is_err());
    }

    #[test]
    fn sixteen_six_matches_reference_frozen_set() {
        let code = construct(4, 6, DEFAULT_Z0).unwrap();
        assert_eq!(code.frozen_set(), &[0, 1, 2, 3, 4, 5, 6, 8, 9, 10]);
    }

    #[test]
    fn expand_message_examples() {
        let c43 = PolarCode::from_frozen_set(2, &[0]).unwrap();
        let u = c43.expand_message(&BitWord::from_bits(&[1, 0, 1])).unwrap();
        assert_eq!(u.to_bits(), vec![0, 1, 0, 1]);
        let c42 = PolarCode::from_frozen_set(2, &[0, 1]).unwrap();
        let u = c42.expand_message(&BitWord::from_bits(&[1, 1])).unwrap();
        assert_eq!(u.to_bits(), vec![0, 0, 1, 1]);
        assert!(c42.expand_message(&BitWord::zeros(2)).unwrap().is_zero());
        assert!(c42.expand_message(&BitWord::zeros(3)).is_err());
    }

    #[test]
    fn transform_matches_dense_t4() {
        let v = BitWord::from_bits(&[0, 1, 0, 1]);
        let dense = BitMatrix::row_matrix(&v)
            .matmul(&t_matrix(2).unwrap())
            .unwrap()
            .row(0);
        assert_eq!(dense.to_bits(), vec![0, 0, 1, 1]);
        assert_eq!(transform(&v).unwrap(), dense);
        assert!(transform(&BitWord::zeros(8)).unwrap().is_zero());
    }

    #[test]
    fn transform_rejects_non_power_of_two() {
        assert_eq!(transform(&BitWord::zeros(6)), Err(Error::NotPowerOfTwo(6)));
        assert_eq!(transform(&BitWord::zeros(0)), Err(Error::NotPowerOfTwo(0)));
    }

    #[test]
    fn transform_bytes_agrees_with_packed() {
        let bits: Vec<u8> = (0..256).map(|i| ((i * 37 + 11) % 7 < 3) as u8).collect();
        let mut bytes = bits.clone();
        transform_bytes(&mut bytes);
        assert_eq!(
            transform(&BitWord::from_bits(&bits)).unwrap().to_bits(),
            bytes
        );
    }

    #[test]
    fn encode_example() {
        let c43 = PolarCode::from_frozen_set(2, &[0]).unwrap();
        let x = c43.encode(&BitWord::from_bits(&[1, 0, 1])).unwrap();
        assert_eq!(x.to_bits(), vec![0, 0, 1, 1]);
        assert!(c43.is_codeword(&x));
        let rate1 = PolarCode::rate_one(3).unwrap();
        let m = BitWord::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0]);
        assert_eq!(rate1.encode(&m).unwrap(), transform(&m).unwrap());
    }

    #[test]
    fn from_frozen_set_validation() {
        assert!(PolarCode::from_frozen_set(2, &[4]).is_err());
        assert!(PolarCode::from_frozen_set(2, &[1, 1]).is_err());
        let c = PolarCode::from_frozen_set(3, &[5, 0, 2]).unwrap();
        assert_eq!(c.frozen_set(), &[0, 2, 5]);
        assert_eq!(c.info_set(), &[1, 3, 4, 6, 7]);
        assert_eq!(c.dimension(), 5);
    }
}
