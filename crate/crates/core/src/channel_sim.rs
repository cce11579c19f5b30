//! BPSK/AWGN Monte Carlo harness.
//!
//! Every frame draws its message and noise from its own ChaCha stream keyed
//! by `(seed, Eb/N0)` and indexed by the frame number, so results do not
//! depend on the worker count. Frames run in fixed-size batches and are
//! reduced in frame order; a point stops at the exact frame that reaches the
//! error or frame budget.

use std::io::Write;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::decoders::{CheckNode, Decoder, DecoderKind, LlrWord, PolarDecoder};
use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::latency::{product_delta, LatencyModelInput};
use crate::polar::PolarCode;
use crate::product::ProductPolarCode;
use crate::two_step::{LlrMatrix, Schedule, TwoStepConfig, TwoStepDecoder};

const BATCH: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Flat(PolarCode),
    Product(ProductPolarCode),
}

impl CodeSpec {
    pub fn flat_code(&self) -> &PolarCode {
        match self {
            CodeSpec::Flat(c) => c,
            CodeSpec::Product(p) => p.flat_code(),
        }
    }

    pub fn len(&self) -> usize {
        self.flat_code().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dimension(&self) -> usize {
        self.flat_code().dimension()
    }

    pub fn rate(&self) -> f64 {
        self.flat_code().rate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimAlgo {
    Sc,
    Scl { list_size: usize },
    ProductSc { t: u32 },
    ProductScl { list_size: usize, t: u32 },
}

impl SimAlgo {
    pub fn is_product(self) -> bool {
        matches!(self, SimAlgo::ProductSc { .. } | SimAlgo::ProductScl { .. })
    }

    fn component(self) -> DecoderKind {
        match self {
            SimAlgo::Sc | SimAlgo::ProductSc { .. } => DecoderKind::Sc,
            SimAlgo::Scl { list_size } | SimAlgo::ProductScl { list_size, .. } => {
                DecoderKind::Scl { list_size }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeSpec,
    pub algo: SimAlgo,
    pub ebn0_grid_db: Vec<f64>,
    pub max_frames: u64,
    pub max_frame_errors: u64,
    pub seed: u64,
    /// Bypass the channel: feed `±LLR_SAT` of the transmitted codeword.
    pub noiseless: bool,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    pub check: CheckNode,
    pub schedule: Schedule,
}

impl SimConfig {
    pub fn new(code: CodeSpec, algo: SimAlgo, ebn0_grid_db: Vec<f64>) -> Self {
        SimConfig {
            code,
            algo,
            ebn0_grid_db,
            max_frames: 1_000_000,
            max_frame_errors: 100,
            seed: 1,
            noiseless: false,
            workers: None,
            check: CheckNode::MinSum,
            schedule: Schedule::FlaggedReinforced,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_grid_db.is_empty() {
            return Err(Error::param("Eb/N0 grid is empty"));
        }
        if let Some(v) = self.ebn0_grid_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::param(format!("Eb/N0 value {v} is not finite")));
        }
        if self.max_frames < 1 {
            return Err(Error::param("max_frames must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::param("worker count must be at least 1"));
        }
        if self.code.dimension() == 0 {
            return Err(Error::param("code dimension must be positive"));
        }
        match (self.algo, &self.code) {
            (SimAlgo::Scl { list_size: 0 } | SimAlgo::ProductScl { list_size: 0, .. }, _) => {
                Err(Error::param("list size must be at least 1"))
            }
            (SimAlgo::ProductSc { t: 0 } | SimAlgo::ProductScl { t: 0, .. }, _) => {
                Err(Error::param("iteration limit t must be at least 1"))
            }
            (a, CodeSpec::Flat(_)) if a.is_product() => {
                Err(Error::param("product decoding needs a product code"))
            }
            _ => Ok(()),
        }
    }
}

/// Statistics for one Eb/N0 point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// Fraction of decodes that ran the full-length fallback.
    pub gamma: f64,
    /// Mean step-1 iterations per decode (1 for flat decoders).
    pub t_avg: f64,
    /// Mean modeled time steps per decode.
    pub mean_steps: f64,
}

impl PointStats {
    /// Two-step latency predicted from the measured `γ` and `t_avg`.
    pub fn modeled_product_delta(&self, code: &ProductPolarCode, algo: SimAlgo) -> f64 {
        product_delta(&LatencyModelInput {
            algo: algo.component().algo(),
            shape: code.shape(),
            t_avg: self.t_avg,
            gamma: self.gamma,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimStats {
    pub points: Vec<PointStats>,
}

pub const CSV_HEADER: &str =
    "ebn0_db,frames,bit_errors,frame_errors,ber,fer,gamma,t_avg,mean_steps";

impl SimStats {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                format_sig6(p.ebn0_db),
                p.frames,
                p.bit_errors,
                p.frame_errors,
                format_sig6(p.ber),
                format_sig6(p.fer),
                format_sig6(p.gamma),
                format_sig6(p.t_avg),
                format_sig6(p.mean_steps),
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// `%.6g`-style rendering: six significant digits, trailing zeros dropped,
/// exponent form outside `[1e-4, 1e6)`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mant), exp.abs())
    } else {
        trim_fraction(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `σ² = 1 / (2 · R · 10^(Eb/N0 / 10))`.
pub fn noise_variance(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::param(format!(
            "code rate must lie in (0,1], got {rate}"
        )));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)))
}

/// BPSK (0 → +1, 1 → −1) over AWGN; returns channel LLRs `2r/σ²`.
pub fn modulate_and_add_noise<R: Rng + ?Sized>(
    x: &BitWord,
    ebn0_db: f64,
    rate: f64,
    rng: &mut R,
) -> Result<LlrWord> {
    let var = noise_variance(ebn0_db, rate)?;
    let sigma = var.sqrt();
    let llr = x
        .iter()
        .map(|b| {
            let s = if b { -1.0 } else { 1.0 };
            let n: f64 = rng.sample(StandardNormal);
            2.0 * (s + sigma * n) / var
        })
        .collect();
    LlrWord::new(llr)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for frame `frame` of the point at `ebn0_db`.
pub fn frame_rng(seed: u64, ebn0_db: f64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(ebn0_db.to_bits())));
    rng.set_stream(frame);
    rng
}

#[derive(Debug, Clone)]
enum FrameDecoder {
    Flat(Decoder),
    TwoStep(Box<TwoStepDecoder>),
}

impl FrameDecoder {
    fn new(cfg: &SimConfig) -> Result<Self> {
        Ok(match (cfg.algo, &cfg.code) {
            (SimAlgo::ProductSc { t } | SimAlgo::ProductScl { t, .. }, CodeSpec::Product(p)) => {
                let tcfg = TwoStepConfig {
                    t,
                    component: cfg.algo.component(),
                    check: cfg.check,
                    schedule: cfg.schedule,
                };
                FrameDecoder::TwoStep(Box::new(TwoStepDecoder::new(p.clone(), tcfg)?))
            }
            (algo, code) => FrameDecoder::Flat(Decoder::new(
                algo.component(),
                code.flat_code().clone(),
                cfg.check,
            )?),
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameResult {
    bit_errors: u64,
    fallback: bool,
    iterations: u32,
    steps: u64,
}

fn simulate_frame(
    cfg: &SimConfig,
    dec: &mut FrameDecoder,
    ebn0_db: f64,
    frame: u64,
) -> Result<FrameResult> {
    let mut rng = frame_rng(cfg.seed, ebn0_db, frame);
    let k = cfg.code.dimension();
    let words = (0..k.div_ceil(64)).map(|_| rng.next_u64()).collect();
    let msg = BitWord::from_words(k, words);

    let x = match &cfg.code {
        CodeSpec::Flat(c) => c.encode(&msg)?,
        CodeSpec::Product(p) => {
            let xm = p.encode_message(&msg)?;
            debug_assert!(p.is_product_codeword(&xm));
            xm.row_vectorize()
        }
    };
    let y = if cfg.noiseless {
        LlrWord::from_hard(&x)
    } else {
        modulate_and_add_noise(&x, ebn0_db, cfg.code.rate(), &mut rng)?
    };

    let (msg_hat, fallback, iterations, steps) = match dec {
        FrameDecoder::Flat(d) => {
            let r = d.decode(&y)?;
            (d.code().extract_message(&r.u_hat)?, false, 1, r.steps)
        }
        FrameDecoder::TwoStep(d) => {
            let p = d.code();
            let ym = LlrMatrix::from_word(&y, p.rows(), p.cols())?;
            let out = d.decode(&ym)?;
            (out.msg_hat, out.used_fallback, out.iterations, out.steps)
        }
    };
    Ok(FrameResult {
        bit_errors: msg.hamming_distance(&msg_hat) as u64,
        fallback,
        iterations,
        steps,
    })
}

fn build_pool(workers: Option<usize>) -> Result<Option<rayon::ThreadPool>> {
    workers
        .map(|n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::param(format!("cannot start worker pool: {e}")))
        })
        .transpose()
}

fn run_point_in(
    cfg: &SimConfig,
    ebn0_db: f64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<PointStats> {
    let template = FrameDecoder::new(cfg)?;
    let mut frames = 0u64;
    let mut bit_errors = 0u64;
    let mut frame_errors = 0u64;
    let mut fallbacks = 0u64;
    let mut iterations = 0u64;
    let mut steps = 0u64;

    'outer: while frames < cfg.max_frames {
        let end = (frames + BATCH).min(cfg.max_frames);
        let batch = || -> Result<Vec<FrameResult>> {
            (frames..end)
                .into_par_iter()
                .map_init(
                    || template.clone(),
                    |dec, f| simulate_frame(cfg, dec, ebn0_db, f),
                )
                .collect()
        };
        let results = match pool {
            Some(p) => p.install(batch)?,
            None => batch()?,
        };
        for r in results {
            frames += 1;
            bit_errors += r.bit_errors;
            frame_errors += u64::from(r.bit_errors > 0);
            fallbacks += u64::from(r.fallback);
            iterations += u64::from(r.iterations);
            steps += r.steps;
            if frame_errors >= cfg.max_frame_errors {
                break 'outer;
            }
        }
    }

    let f = frames as f64;
    Ok(PointStats {
        ebn0_db,
        frames,
        bit_errors,
        frame_errors,
        ber: bit_errors as f64 / (f * cfg.code.dimension() as f64),
        fer: frame_errors as f64 / f,
        gamma: fallbacks as f64 / f,
        t_avg: iterations as f64 / f,
        mean_steps: steps as f64 / f,
    })
}

/// Runs frames at one Eb/N0 until `max_frame_errors` or `max_frames`.
pub fn run_point(cfg: &SimConfig, ebn0_db: f64) -> Result<PointStats> {
    cfg.validate()?;
    let pool = build_pool(cfg.workers)?;
    run_point_in(cfg, ebn0_db, pool.as_ref())
}

/// [`run_point`] over the whole grid.
pub fn run_sweep(cfg: &SimConfig) -> Result<SimStats> {
    cfg.validate()?;
    let pool = build_pool(cfg.workers)?;
    let points = cfg
        .ebn0_grid_db
        .iter()
        .map(|&e| run_point_in(cfg, e, pool.as_ref()))
        .collect::<Result<_>>()?;
    Ok(SimStats { points })
}
