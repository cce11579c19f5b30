//! Two-step decoding of product polar codes.
//!
//! Step 1 treats the code as a product code: rows and columns of the LLR
//! matrix are decoded independently with a short SC/SCL decoder and
//! re-encoded into `X_r` and `X_c`. Mismatching lines are located greedily,
//! their crossings with the other direction's trusted lines are reinforced to
//! `±LLR_SAT` and crossings with suspect lines erased, and only the flagged
//! lines are decoded again. If `X_r ≠ X_c` after `t` iterations, step 2
//! decodes the channel LLRs with the full-length decoder.

use std::collections::BTreeSet;

use crate::decoders::{saturate, CheckNode, Decoder, DecoderKind, LlrWord, PolarDecoder, LLR_SAT};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};
use crate::latency::delta;
use crate::product::ProductPolarCode;

/// Rows and columns blamed for the mismatches between `X_r` and `X_c`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MismatchReport {
    pub err_rows: BTreeSet<usize>,
    pub err_cols: BTreeSet<usize>,
    /// Number of greedy flagging steps taken.
    pub iterations: usize,
}

fn arg_max(counts: &[usize]) -> (usize, usize) {
    // lowest index wins ties
    counts.iter().enumerate().fold(
        (0, 0),
        |best, (i, &c)| if c > best.1 { (i, c) } else { best },
    )
}

/// Greedy attribution of the mismatch pattern `X_d = X_r ⊕ X_c`.
///
/// Repeatedly flags the line with the most remaining mismatches, a row only
/// when its count strictly exceeds the best column count, clears it, and
/// stops once `X_d` is empty.
pub fn find_erroneous_estimations(x_r: &BitMatrix, x_c: &BitMatrix) -> Result<MismatchReport> {
    let mut xd = x_r.xor(x_c)?;
    let mut row_counts = xd.row_weights();
    let mut col_counts = xd.col_weights();
    let mut report = MismatchReport::default();
    loop {
        let (er, rmax) = arg_max(&row_counts);
        let (ec, cmax) = arg_max(&col_counts);
        if rmax == 0 && cmax == 0 {
            break;
        }
        report.iterations += 1;
        if rmax > cmax {
            report.err_rows.insert(er);
            for (j, c) in col_counts.iter_mut().enumerate() {
                if xd.get(er, j) {
                    *c -= 1;
                }
            }
            xd.clear_row(er);
            row_counts[er] = 0;
        } else {
            report.err_cols.insert(ec);
            for (i, c) in row_counts.iter_mut().enumerate() {
                if xd.get(i, ec) {
                    *c -= 1;
                }
            }
            xd.clear_column(ec);
            col_counts[ec] = 0;
        }
    }
    debug_assert!(xd.is_zero());
    Ok(report)
}

/// Row-major matrix of LLRs with `|entry| ≤ LLR_SAT`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LlrMatrix {
    /// Saturates `data`; NaN entries are rejected.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(
                format!("{rows}x{cols} = {} LLRs", rows * cols),
                data.len(),
            ));
        }
        if let Some(i) = data.iter().position(|v| v.is_nan()) {
            return Err(Error::param(format!("LLR {i} is NaN")));
        }
        Ok(LlrMatrix {
            rows,
            cols,
            data: data.into_iter().map(saturate).collect(),
        })
    }

    /// Rearranges a flat LLR word row by row.
    pub fn from_word(y: &LlrWord, rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, y.to_vec())
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        LlrMatrix {
            rows,
            cols,
            data: vec![saturate(value); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// The flat, row-major LLR vector.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

/// LLRs for re-decoding along `axis` from the other direction's estimate:
/// `±LLR_SAT` from the hard bits of `x_other`, with lines of the other
/// direction flagged in `report` erased to 0.
pub fn build_reinforced_llrs(
    x_other: &BitMatrix,
    report: &MismatchReport,
    axis: Axis,
) -> LlrMatrix {
    let (rows, cols) = (x_other.rows(), x_other.cols());
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let erased = match axis {
                Axis::Rows => report.err_cols.contains(&j),
                Axis::Cols => report.err_rows.contains(&i),
            };
            data.push(if erased {
                0.0
            } else if x_other.get(i, j) {
                -LLR_SAT
            } else {
                LLR_SAT
            });
        }
    }
    LlrMatrix { rows, cols, data }
}

/// What the second and later step-1 iterations decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Only flagged rows/columns, from the reinforced matrices.
    #[default]
    FlaggedReinforced,
    /// Every row and column from the channel matrix, every iteration.
    ChannelEveryIteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoStepConfig {
    /// Maximum number of step-1 iterations.
    pub t: u32,
    pub component: DecoderKind,
    pub check: CheckNode,
    pub schedule: Schedule,
}

impl Default for TwoStepConfig {
    fn default() -> Self {
        TwoStepConfig {
            t: 4,
            component: DecoderKind::Sc,
            check: CheckNode::MinSum,
            schedule: Schedule::FlaggedReinforced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub msg_hat: BitWord,
    /// `X_r == X_c` was reached in step 1.
    pub converged: bool,
    /// Step-1 iterations run, in `1..=t`.
    pub iterations: u32,
    pub used_fallback: bool,
    pub steps: u64,
}

#[derive(Debug, Clone)]
pub struct TwoStepDecoder {
    code: ProductPolarCode,
    cfg: TwoStepConfig,
    row_dec: Decoder,
    col_dec: Decoder,
    flat_dec: Decoder,
    component_steps: u64,
    flat_steps: u64,
}

impl TwoStepDecoder {
    pub fn new(code: ProductPolarCode, cfg: TwoStepConfig) -> Result<Self> {
        if cfg.t < 1 {
            return Err(Error::param("iteration limit t must be at least 1"));
        }
        let algo = cfg.component.algo();
        Ok(TwoStepDecoder {
            row_dec: Decoder::new(cfg.component, code.row_code().clone(), cfg.check)?,
            col_dec: Decoder::new(cfg.component, code.col_code().clone(), cfg.check)?,
            flat_dec: Decoder::new(cfg.component, code.flat_code().clone(), cfg.check)?,
            component_steps: code.shape().component_delta(algo),
            flat_steps: delta(algo, code.len(), code.dimension()),
            code,
            cfg,
        })
    }

    pub fn code(&self) -> &ProductPolarCode {
        &self.code
    }

    pub fn config(&self) -> &TwoStepConfig {
        &self.cfg
    }

    fn decode_row(&mut self, llr: &[f64], i: usize, x_r: &mut BitMatrix) -> Result<()> {
        let r = self.row_dec.decode(llr)?;
        x_r.set_row(i, &r.x_hat);
        Ok(())
    }

    fn decode_col(&mut self, llr: &[f64], j: usize, x_c: &mut BitMatrix) -> Result<()> {
        let r = self.col_dec.decode(llr)?;
        x_c.set_column(j, &r.x_hat);
        Ok(())
    }

    fn decode_all(
        &mut self,
        y: &LlrMatrix,
        x_r: &mut BitMatrix,
        x_c: &mut BitMatrix,
    ) -> Result<()> {
        for i in 0..y.rows() {
            self.decode_row(y.row(i), i, x_r)?;
        }
        for j in 0..y.cols() {
            self.decode_col(&y.column(j), j, x_c)?;
        }
        Ok(())
    }

    pub fn decode(&mut self, y: &LlrMatrix) -> Result<DecodeOutcome> {
        let (rows, cols) = (self.code.rows(), self.code.cols());
        if y.rows() != rows || y.cols() != cols {
            return Err(Error::dims(
                format!("{rows}x{cols}"),
                format!("{}x{}", y.rows(), y.cols()),
            ));
        }
        let mut x_r = BitMatrix::zeros(rows, cols);
        let mut x_c = BitMatrix::zeros(rows, cols);
        let mut pending: Option<(MismatchReport, LlrMatrix, LlrMatrix)> = None;

        for w in 1..=self.cfg.t {
            match (self.cfg.schedule, pending.take()) {
                (Schedule::FlaggedReinforced, Some((report, y_r, y_c))) => {
                    for &i in &report.err_rows {
                        self.decode_row(y_r.row(i), i, &mut x_r)?;
                    }
                    for &j in &report.err_cols {
                        self.decode_col(&y_c.column(j), j, &mut x_c)?;
                    }
                }
                _ => self.decode_all(y, &mut x_r, &mut x_c)?,
            }
            if x_r == x_c {
                return Ok(DecodeOutcome {
                    msg_hat: self.code.recover_message(&x_r.row_vectorize())?,
                    converged: true,
                    iterations: w,
                    used_fallback: false,
                    steps: u64::from(w) * self.component_steps,
                });
            }
            if w < self.cfg.t && self.cfg.schedule == Schedule::FlaggedReinforced {
                let report = find_erroneous_estimations(&x_r, &x_c)?;
                let y_r = build_reinforced_llrs(&x_c, &report, Axis::Rows);
                let y_c = build_reinforced_llrs(&x_r, &report, Axis::Cols);
                pending = Some((report, y_r, y_c));
            }
        }

        let r = self.flat_dec.decode(y.as_slice())?;
        Ok(DecodeOutcome {
            msg_hat: self.code.flat_code().extract_message(&r.u_hat)?,
            converged: false,
            iterations: self.cfg.t,
            used_fallback: true,
            steps: u64::from(self.cfg.t) * self.component_steps + self.flat_steps,
        })
    }
}

pub fn two_step_decode(
    code: &ProductPolarCode,
    y: &LlrMatrix,
    t: u32,
    component: DecoderKind,
) -> Result<DecodeOutcome> {
    let cfg = TwoStepConfig {
        t,
        component,
        ..TwoStepConfig::default()
    };
    TwoStepDecoder::new(code.clone(), cfg)?.decode(y)
}
