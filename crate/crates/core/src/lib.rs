//! Orlicz norms generated by random variables.
//!
//! Builds Orlicz functions from distributions and distributions from Orlicz
//! functions, checks growth conditions, and estimates the matching
//! expectations by Monte Carlo.

// `!(x > a)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correspondence;
pub mod distribution;
pub mod embedding;
pub mod error;
pub mod io;
pub mod matrix;
pub mod montecarlo;
pub mod orlicz;
pub mod quad;
pub mod roots;

pub use error::{Error, Result};
pub use distribution::Distribution;
pub use orlicz::OrliczFunction;
