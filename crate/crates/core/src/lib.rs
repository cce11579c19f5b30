//! Product polar codes.
//!
//! Two short non-systematic polar codes `C_c × C_r` combine into one long
//! polar code with transformation `T_{N_c} ⊗ T_{N_r}` and a frozen set derived
//! from the components. The crate builds such codes, encodes them either way,
//! decodes them with a two-step (product first, full-length fallback)
//! decoder, models decoding latency and runs BPSK/AWGN Monte Carlo sweeps.
//!
//! ```
//! use prodpolar::{build_product_code, PolarCode};
//!
//! let col = PolarCode::from_frozen_set(2, &[0, 1]).unwrap();
//! let row = PolarCode::from_frozen_set(2, &[0]).unwrap();
//! let p = build_product_code(col, row).unwrap();
//! assert_eq!(p.flat_code().frozen_set(), &[0, 1, 2, 3, 4, 5, 6, 7, 8, 12]);
//! ```

pub mod channel_sim;
pub mod decoders;
pub mod error;
pub mod gf2;
pub mod latency;
pub mod polar;
pub mod product;
pub mod textio;
pub mod two_step;

pub use decoders::{
    sc_decode, scl_decode, CheckNode, DecodeResult, Decoder, DecoderKind, LlrWord, PolarDecoder,
    ScDecoder, SclDecoder, LLR_SAT,
};
pub use error::{Error, Result};
pub use gf2::{gf2_matmul, kron, row_vectorize, BitMatrix, BitWord};
pub use latency::{delta, product_delta, Algo, LatencyModelInput, ProductShape, Table1Row};
pub use polar::{
    bhattacharyya_reliabilities, construct, make_code, transform, PolarCode, ReliabilitySequence,
};
pub use product::{build_product_code, ProductPolarCode};
pub use two_step::{
    build_reinforced_llrs, find_erroneous_estimations, two_step_decode, Axis, DecodeOutcome,
    LlrMatrix, MismatchReport, Schedule, TwoStepConfig, TwoStepDecoder,
};
