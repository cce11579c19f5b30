//! Dense GF(2) vectors and matrices.
//!
//! Bits are packed little-endian into `u64` words: bit `i` of a word row lives
//! in word `i / 64` at position `i % 64`. Padding bits past the logical length
//! are always zero, so word-level equality and popcounts are exact.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Largest transformation matrix [`t_matrix`] will materialize. Bigger
/// transforms go through the butterfly in [`crate::polar::transform`].
pub const MAX_DENSE_T: usize = 1024;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord {
    len: usize,
    words: Vec<u64>,
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        BitWord {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a word from `0`/`1` values; any nonzero entry is read as one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut w = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                w.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        w
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD_BITS] |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        BitWord { len, words }
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut w = BitWord { len, words };
        w.clear_padding();
        w
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place XOR. Panics if the lengths differ.
    pub fn xor_assign(&mut self, other: &BitWord) {
        assert_eq!(self.len, other.len, "xor of words with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitWord) -> Result<BitWord> {
        if self.len != other.len {
            return Err(Error::dims(self.len, other.len));
        }
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming_distance(&self, other: &BitWord) -> usize {
        assert_eq!(
            self.len, other.len,
            "distance between words of different lengths"
        );
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense, row-major GF(2) matrix with each row packed into whole words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from nested `0`/`1` rows. All rows must share a length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::dims(
                    format!("{cols} columns"),
                    format!("row {i} with {}", r.len()),
                ));
            }
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        Ok(m)
    }

    /// A `1 × len` matrix holding `word`.
    pub fn row_matrix(word: &BitWord) -> Self {
        let mut m = Self::zeros(1, word.len());
        m.set_row(0, word);
        m
    }

    /// Inverse of [`row_vectorize`]: lays `word` out row by row.
    pub fn from_row_vector(word: &BitWord, rows: usize, cols: usize) -> Result<Self> {
        if word.len() != rows * cols {
            return Err(Error::dims(
                format!("{rows}x{cols} = {} bits", rows * cols),
                word.len(),
            ));
        }
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if word.get(i * cols + j) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        let idx = i * self.stride + j / WORD_BITS;
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> BitWord {
        BitWord::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn set_row(&mut self, i: usize, word: &BitWord) {
        assert_eq!(word.len(), self.cols, "row length mismatch");
        self.row_words_mut(i).copy_from_slice(word.words());
    }

    pub fn column(&self, j: usize) -> BitWord {
        BitWord::from_bools((0..self.rows).map(|i| self.get(i, j)))
    }

    pub fn set_column(&mut self, j: usize, word: &BitWord) {
        assert_eq!(word.len(), self.rows, "column length mismatch");
        for i in 0..self.rows {
            self.set(i, j, word.get(i));
        }
    }

    pub fn clear_row(&mut self, i: usize) {
        self.row_words_mut(i).fill(0);
    }

    pub fn clear_column(&mut self, j: usize) {
        for i in 0..self.rows {
            self.set(i, j, false);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of ones in each row.
    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| {
                self.row_words(i)
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .sum()
            })
            .collect()
    }

    /// Number of ones in each column.
    pub fn col_weights(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for i in 0..self.rows {
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    counts[wi * WORD_BITS + b] += 1;
                    w &= w - 1;
                }
            }
        }
        counts
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    t.set(wi * WORD_BITS + b, i, true);
                    w &= w - 1;
                }
            }
        }
        t
    }

    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims(
                format!("left operand with {} columns", other.rows),
                format!("{} columns", self.cols),
            ));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let k = wi * WORD_BITS + w.trailing_zeros() as usize;
                    let (src, dst) = (other.row_words(k), i * out.stride);
                    for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                        *d ^= s;
                    }
                    w &= w - 1;
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        if other.get(k, l) {
                            out.set(i * other.rows + k, j * other.cols + l, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Juxtaposes the rows head-to-tail into one word.
    pub fn row_vectorize(&self) -> BitWord {
        if self.cols.is_multiple_of(WORD_BITS) {
            return BitWord::from_words(self.rows * self.cols, self.data.clone());
        }
        let mut out = BitWord::zeros(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(i * self.cols + j, true);
                }
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub fn gf2_matmul(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    a.matmul(b)
}

pub fn kron(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    a.kron(b)
}

pub fn row_vectorize(m: &BitMatrix) -> BitWord {
    m.row_vectorize()
}

/// The 2×2 polarization kernel `[[1,0],[1,1]]`.
pub fn kernel() -> BitMatrix {
    BitMatrix::from_fn(2, 2, |i, j| j <= i)
}

/// Dense `T_N = T_2^{⊗n}`; limited to `N <= MAX_DENSE_T`.
pub fn t_matrix(n: u32) -> Result<BitMatrix> {
    let size = 1usize
        .checked_shl(n)
        .filter(|&s| s <= MAX_DENSE_T)
        .ok_or_else(|| {
            Error::param(format!(
                "dense T_N limited to N <= {MAX_DENSE_T}, got n = {n}"
            ))
        })?;
    // Entry (i, j) of T_2^{⊗n} is 1 iff the bits of j are a subset of the bits of i.
    Ok(BitMatrix::from_fn(size, size, |i, j| i & j == j))
}
