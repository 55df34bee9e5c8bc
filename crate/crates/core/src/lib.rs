//! Exact expected regret of balanced rank-subset adversaries in prediction
//! with expert advice.
//!
//! Each day a balanced adversary picks a set of expert ranks; with
//! probability 1/2 exactly those ranks gain 1, otherwise exactly the other
//! ranks do. Every player then earns `T/2` in expectation, so the regret is
//! `E[max total gain] - T/2`. The crate computes it:
//!
//! - for a fixed subset, as a series `T -> R(T)`, with a sparse forward
//!   propagation over sorted gap states ([`forward`]);
//! - for an adversary that re-chooses the subset from a family every day,
//!   by memoized backward recursion ([`optimal`]);
//! - by brute-force enumeration over raw gains, as an independent check
//!   ([`oracle`]).
//!
//! Values are exact dyadic rationals or binary64 ([`numeric`]).

pub mod analysis;
pub mod error;
pub mod forward;
pub mod game;
pub mod numeric;
pub mod optimal;
pub mod oracle;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use forward::{
    evolve_step, regret_series_fixed, ForwardOptions, RegretSeries, SparseDistribution,
};
pub use game::{
    canonical_subset, comb_subset, decode_state, encode_state, initial_state, step, BranchOutcome,
    GapState, RankSubset,
};
pub use numeric::{DyadicValue, Value, ValueBackend};
pub use optimal::{best_fixed_subset, value_adaptive, AdaptivePolicyValue, BestFixed};
