//! Exact dyadic arithmetic and the value contract shared by the exact and
//! binary64 engines.
//!
//! Every probability in the game is a power of 1/2, so every expectation is
//! a dyadic rational `n / 2^e`. [`DyadicValue`] represents those exactly;
//! `f64` implements the same [`Value`] trait for long sweeps.

mod dyadic;
mod value;

pub use dyadic::{compare, DyadicValue};
pub use value::{dyadic_from_f64, format_sig17, parse_threshold, Value, ValueBackend};
