//! Linear precoders that null third-order power-amplifier distortion at the
//! user location of a large antenna array, together with the channel, PA and
//! link-metric machinery needed to evaluate them.
//!
//! The crate is organised bottom-up:
//!
//! - [`types`] and [`rng`]: complex vectors, dB conversions and the
//!   deterministic random-stream contract used by every Monte Carlo routine.
//! - [`channel`]: line-of-sight ULA and i.i.d. Rayleigh channel vectors.
//! - [`pa`]: memoryless PA transfer functions.
//! - [`precoder`]: MRT, the closed-form heuristic, LOS critical points and the
//!   line-search maxima of the real-valued SNR problem.
//! - [`analysis`]: closed-form SNRs, Bussgang link metrics, radiation
//!   patterns and achievable rates.
//! - [`verify`]: independent oracles (brute force, finite-difference Hessian,
//!   complex-gain probe).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod pa;
pub mod precoder;
pub mod rng;
pub mod types;
pub mod verify;

pub use channel::{ChannelModel, ChannelVector};
pub use error::{Error, Result};
pub use pa::PaModel;
pub use precoder::{Precoder, PrecoderKind};
pub use rng::{derive_stream, RngStream};
pub use types::{db_to_linear, linear_to_db, ComplexVec, Decibel};

pub use num_complex::Complex64;
