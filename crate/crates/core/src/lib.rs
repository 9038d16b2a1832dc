//! Tail-biting baker's map analog error-correction code.
//!
//! The crate is organised bottom-up:
//!
//! - [`chaos`]: the folded baker's map, its inverse, sign sequences and the
//!   segment-wise affine decomposition of iterated states.
//! - [`codec`]: the `(2kn, k)` tail-biting encoder, the exact maximum-likelihood
//!   decoder and a brute-force grid oracle.
//! - [`channel`]: continuous-amplitude QAM packing, AWGN and `Ep/N0` bookkeeping.
//! - [`imaging`]: PGM I/O, pixel scaling, block partitioning, MSE/PSNR.
//! - [`sim`]: end-to-end image transmission experiments and SNR sweeps.

pub mod channel;
pub mod chaos;
pub mod codec;
mod error;
pub mod imaging;
pub mod sim;

pub use error::{Error, Result};
