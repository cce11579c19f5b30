//! Closed-form decoding time-step model for SC, SCL and the two-step
//! product decoders, assuming unlimited parallel resources.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Sc,
    Scl,
}

/// Time steps to decode a length-`n`, dimension-`k` polar code:
/// `2N − 2` for SC and `2N + K − 2` for SCL.
pub fn delta(algo: Algo, n: usize, k: usize) -> u64 {
    let n = n as u64;
    match algo {
        Algo::Sc => (2 * n).saturating_sub(2),
        Algo::Scl => (2 * n + k as u64).saturating_sub(2),
    }
}

/// Component dimensions of a two-dimensional product code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductShape {
    pub n_r: usize,
    pub k_r: usize,
    pub n_c: usize,
    pub k_c: usize,
}

impl ProductShape {
    pub fn len(&self) -> usize {
        self.n_r * self.n_c
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dimension(&self) -> usize {
        self.k_r * self.k_c
    }

    /// Steps of one step-1 iteration: rows and columns decode concurrently,
    /// so the longer component sets the pace. Equal lengths take the larger K.
    pub fn component_delta(&self, algo: Algo) -> u64 {
        use std::cmp::Ordering::*;
        let (n, k) = match self.n_r.cmp(&self.n_c) {
            Greater => (self.n_r, self.k_r),
            Less => (self.n_c, self.k_c),
            Equal => (self.n_r, self.k_r.max(self.k_c)),
        };
        delta(algo, n, k)
    }

    /// Square components: `N_r = N_c = √N`, `K_r = K_c = √K`.
    pub fn square(n: usize, k: usize) -> Result<Self> {
        let side = isqrt(n);
        let kside = isqrt(k);
        if side * side != n || !side.is_power_of_two() || kside * kside != k || kside > side {
            return Err(Error::param(format!(
                "({n},{k}) is not a square product of two polar codes"
            )));
        }
        Ok(ProductShape {
            n_r: side,
            k_r: kside,
            n_c: side,
            k_c: kside,
        })
    }

    /// Closest-to-square split of an `(N, K)` pair: `N_c = 2^⌊n/2⌋`,
    /// `N_r = N / N_c`, and the divisor pair `K_r · K_c = K` with the smallest
    /// gap that fits (ties prefer the larger `K_r`).
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if k > n {
            return Err(Error::param(format!("K = {k} exceeds N = {n}")));
        }
        let log = n.trailing_zeros();
        let n_c = 1usize << (log / 2);
        let n_r = n / n_c;
        if k == 0 {
            return Ok(ProductShape {
                n_r,
                k_r: 0,
                n_c,
                k_c: 0,
            });
        }
        (1..=n_c.min(k))
            .filter(|&k_c| k.is_multiple_of(k_c) && k / k_c <= n_r)
            .map(|k_c| (k / k_c, k_c))
            .min_by_key(|&(k_r, k_c)| (k_r.abs_diff(k_c), usize::MAX - k_r))
            .map(|(k_r, k_c)| ProductShape { n_r, k_r, n_c, k_c })
            .ok_or_else(|| {
                Error::param(format!("K = {k} has no factorization fitting {n_r}x{n_c}"))
            })
    }
}

fn isqrt(v: usize) -> usize {
    let mut r = (v as f64).sqrt() as usize;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyModelInput {
    pub algo: Algo,
    pub shape: ProductShape,
    /// Mean number of step-1 iterations, `≥ 1`.
    pub t_avg: f64,
    /// Fraction of decodes that fall back to the full-length decoder.
    pub gamma: f64,
}

/// Expected steps of the two-step decoder:
/// `t_avg · Δ_max(N_r, N_c) + γ · Δ_N`.
pub fn product_delta(input: &LatencyModelInput) -> f64 {
    let comp = input.shape.component_delta(input.algo) as f64;
    let full = delta(input.algo, input.shape.len(), input.shape.dimension()) as f64;
    input.t_avg * comp + input.gamma * full
}

/// Worst case: every decode runs `t` iterations and falls back.
pub fn worst_case(algo: Algo, shape: ProductShape, t: u32) -> u64 {
    u64::from(t) * shape.component_delta(algo) + delta(algo, shape.len(), shape.dimension())
}

/// Best case: a single iteration, never falls back.
pub fn best_case(algo: Algo, shape: ProductShape) -> u64 {
    shape.component_delta(algo)
}

/// The `(N, K)` codes of the reference time-step table.
pub const REFERENCE_CODES: [(usize, usize); 10] = [
    (1024, 784),
    (1024, 841),
    (4096, 3136),
    (4096, 3249),
    (16384, 12544),
    (16384, 13225),
    (65536, 50176),
    (65536, 52900),
    (262144, 200704),
    (262144, 211600),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Table1Row {
    pub n: usize,
    pub k: usize,
    pub delta_sc: u64,
    pub psc_wc: u64,
    pub psc_bc: u64,
    pub delta_scl: u64,
    pub pscl_wc: u64,
    pub pscl_bc: u64,
}

impl Table1Row {
    pub fn new(shape: ProductShape, t: u32) -> Self {
        let (n, k) = (shape.len(), shape.dimension());
        Table1Row {
            n,
            k,
            delta_sc: delta(Algo::Sc, n, k),
            psc_wc: worst_case(Algo::Sc, shape, t),
            psc_bc: best_case(Algo::Sc, shape),
            delta_scl: delta(Algo::Scl, n, k),
            pscl_wc: worst_case(Algo::Scl, shape, t),
            pscl_bc: best_case(Algo::Scl, shape),
        }
    }

    pub fn columns(&self) -> [u64; 6] {
        [
            self.delta_sc,
            self.psc_wc,
            self.psc_bc,
            self.delta_scl,
            self.pscl_wc,
            self.pscl_bc,
        ]
    }
}

pub const TABLE1_HEADER: &str = "N,K,delta_sc,psc_wc,psc_bc,delta_scl,pscl_wc,pscl_bc";

/// Rows for each shape, evaluated at `t` maximum iterations.
pub fn table1(shapes: &[ProductShape], t: u32) -> Vec<Table1Row> {
    shapes.iter().map(|&s| Table1Row::new(s, t)).collect()
}

/// Rows for [`REFERENCE_CODES`] with square components and `t = 4`.
pub fn reference_table() -> Vec<Table1Row> {
    let shapes: Vec<ProductShape> = REFERENCE_CODES
        .iter()
        .map(|&(n, k)| ProductShape::square(n, k).expect("reference codes are square"))
        .collect();
    table1(&shapes, 4)
}

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from(TABLE1_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{}", r.n, r.k);
        for c in r.columns() {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}
