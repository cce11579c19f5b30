//! Product of two non-systematic polar codes.
//!
//! With `U` an `N_c × N_r` input matrix whose frozen rows (column code) and
//! frozen columns (row code) are zero, `X = T_{N_c}ᵀ · U · T_{N_r}` and
//! `row(X) = row(U) · (T_{N_c} ⊗ T_{N_r}) = row(U) · T_N`. The product is
//! therefore the length-`N_r·N_c` polar code whose frozen set is the zero
//! set of `i_c ⊗ i_r`.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};
use crate::latency::ProductShape;
use crate::polar::{transform_in_place, PolarCode, MAX_LOG_LEN};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductPolarCode {
    row_code: PolarCode,
    col_code: PolarCode,
    flat_code: PolarCode,
}

/// Derives the flat frozen set `{a·N_r + b : a ∈ F_c or b ∈ F_r}`.
pub fn build_product_code(col_code: PolarCode, row_code: PolarCode) -> Result<ProductPolarCode> {
    let n = col_code.log_len() + row_code.log_len();
    if n > MAX_LOG_LEN {
        return Err(Error::param(format!(
            "product length 2^{n} exceeds the supported maximum"
        )));
    }
    let (nr, nc) = (row_code.len(), col_code.len());
    let mut mask = vec![false; nr * nc];
    for a in 0..nc {
        for b in 0..nr {
            mask[a * nr + b] = col_code.is_frozen(a) || row_code.is_frozen(b);
        }
    }
    Ok(ProductPolarCode {
        flat_code: PolarCode::from_mask(n, mask),
        row_code,
        col_code,
    })
}

impl ProductPolarCode {
    pub fn row_code(&self) -> &PolarCode {
        &self.row_code
    }

    pub fn col_code(&self) -> &PolarCode {
        &self.col_code
    }

    pub fn flat_code(&self) -> &PolarCode {
        &self.flat_code
    }

    /// Number of rows of `U`/`X` (= `N_c`).
    pub fn rows(&self) -> usize {
        self.col_code.len()
    }

    /// Number of columns of `U`/`X` (= `N_r`).
    pub fn cols(&self) -> usize {
        self.row_code.len()
    }

    pub fn len(&self) -> usize {
        self.flat_code.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dimension(&self) -> usize {
        self.flat_code.dimension()
    }

    pub fn shape(&self) -> ProductShape {
        ProductShape {
            n_r: self.row_code.len(),
            k_r: self.row_code.dimension(),
            n_c: self.col_code.len(),
            k_c: self.col_code.dimension(),
        }
    }

    fn check_matrix(&self, m: &BitMatrix) -> Result<()> {
        if m.rows() != self.rows() || m.cols() != self.cols() {
            return Err(Error::dims(
                format!("{}x{}", self.rows(), self.cols()),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        Ok(())
    }

    /// Lays the message out on the non-frozen cells of `U`, row first from the
    /// top-left entry.
    pub fn fill_input_matrix(&self, msg: &BitWord) -> Result<BitMatrix> {
        if msg.len() != self.dimension() {
            return Err(Error::dims(
                format!("message of {} bits", self.dimension()),
                msg.len(),
            ));
        }
        let mut u = BitMatrix::zeros(self.rows(), self.cols());
        let mut k = 0;
        for &a in self.col_code.info_set() {
            for &b in self.row_code.info_set() {
                if msg.get(k) {
                    u.set(a, b, true);
                }
                k += 1;
            }
        }
        Ok(u)
    }

    /// Row transforms by `T_{N_r}`, then column transforms by `T_{N_c}`.
    pub fn encode_product(&self, u: &BitMatrix) -> Result<BitMatrix> {
        self.check_matrix(u)?;
        let rows_done = transform_rows(u);
        Ok(transform_rows(&rows_done.transpose()).transpose())
    }

    /// Same codeword as [`Self::encode_product`], columns first.
    pub fn encode_product_columns_first(&self, u: &BitMatrix) -> Result<BitMatrix> {
        self.check_matrix(u)?;
        let cols_done = transform_rows(&u.transpose()).transpose();
        Ok(transform_rows(&cols_done))
    }

    /// Message → `N_c × N_r` codeword matrix.
    pub fn encode_message(&self, msg: &BitWord) -> Result<BitMatrix> {
        self.encode_product(&self.fill_input_matrix(msg)?)
    }

    /// Inverts the encoder on a flat codeword estimate: `u = x · T_N` read on
    /// the information set, in the same order as [`Self::fill_input_matrix`].
    pub fn recover_message(&self, x_hat: &BitWord) -> Result<BitWord> {
        if x_hat.len() != self.len() {
            return Err(Error::dims(self.len(), x_hat.len()));
        }
        let mut u = x_hat.clone();
        transform_in_place(&mut u)?;
        self.flat_code.extract_message(&u)
    }

    /// Every row is a `C_r` codeword and every column a `C_c` codeword.
    pub fn is_product_codeword(&self, x: &BitMatrix) -> bool {
        if self.check_matrix(x).is_err() {
            return false;
        }
        (0..x.rows()).all(|i| self.row_code.is_codeword(&x.row(i)))
            && (0..x.cols()).all(|j| self.col_code.is_codeword(&x.column(j)))
    }
}

fn transform_rows(m: &BitMatrix) -> BitMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        let mut r = m.row(i);
        transform_in_place(&mut r).expect("component lengths are powers of two");
        out.set_row(i, &r);
    }
    out
}
