//! Models and analysis tools for tapered Josephson traveling-wave
//! parametric amplifiers.
//!
//! The crate is organised bottom-up: [`device`] describes the line,
//! [`network`] computes its linear response, [`gain`] integrates the
//! four-wave-mixing equations, [`noise`] holds the efficiency algebra and
//! [`fit`] the power-calibration fitters. [`io`] reads and writes the
//! configuration and data files used by the command-line tool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod constants;
pub mod device;
pub mod error;
pub mod fit;
pub mod gain;
pub mod io;
pub mod network;
pub mod noise;
pub mod units;

pub use error::{Result, TwpaError};
