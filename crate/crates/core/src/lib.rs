//! PAPR reduction for multi-antenna OFDM transmitters with receiver-side EVM
//! mitigation.
//!
//! The crate solves, per OFDM symbol, a distortion-minimisation problem over
//! the frequency-domain transmit grid subject to per-antenna PAPR and ACLR
//! limits, with a smooth term that weights distortion by (estimated) channel
//! directions. Three splitting engines are provided: TOP-ADMM, Bregman ADMM
//! and Davis-Yin splitting, along with iterative clipping and filtering as a
//! baseline. The [`harness`] module wires channel generation, precoding,
//! solvers and metrics into reproducible Monte-Carlo experiments.

// `!(x >= 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod harness;
pub mod mimo;
pub mod numerics;
pub mod prox;
pub mod solvers;
pub mod waveform;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, RngStream, C64};
