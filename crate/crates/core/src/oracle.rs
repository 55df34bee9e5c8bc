//! Brute-force reference evaluators that work on raw (unsorted) total gains.
//!
//! Nothing here touches gap states or state keys: each day the experts are
//! re-ranked from their raw totals, the gains are applied, and every branch
//! sequence is enumerated. Sums are kept as integers scaled by `2^T`, so the
//! results are exact without going through the engines' arithmetic.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{check_k, RankSubset};
use crate::numeric::DyadicValue;

/// Largest horizon for full `2^T` enumeration.
pub const MAX_BRUTE_HORIZON: u32 = 20;

/// Node budget for adaptive enumeration, `(2 |family|)^T`.
pub const MAX_BRUTE_NODES: u64 = 1 << 28;

/// Per-expert total gains, in expert (not rank) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawGains(pub Vec<u32>);

/// How experts with equal totals are ordered when ranking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieOrder {
    LowerIndexFirst,
    HigherIndexFirst,
}

impl RawGains {
    pub fn zeros(k: usize) -> Self {
        RawGains(vec![0; k])
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Expert indices, best first.
    fn ranking(&self, ties: TieOrder) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.0.len()).collect();
        order.sort_by(|&a, &b| {
            self.0[b].cmp(&self.0[a]).then(match ties {
                TieOrder::LowerIndexFirst => a.cmp(&b),
                TieOrder::HigherIndexFirst => b.cmp(&a),
            })
        });
        order
    }

    /// The day's two outcomes: the listed ranks gain, or all the other ranks do.
    fn branches(&self, ranks: &[usize], ties: TieOrder) -> [RawGains; 2] {
        let order = self.ranking(ties);
        let mut with = self.clone();
        let mut without = self.clone();
        for (pos, &expert) in order.iter().enumerate() {
            if ranks.contains(&(pos + 1)) {
                with.0[expert] += 1;
            } else {
                without.0[expert] += 1;
            }
        }
        [with, without]
    }
}

fn regret_from_scaled_max(scaled_max_sum: u128, horizon: u32) -> DyadicValue {
    // E[max] = sum / 2^T; regret = (2 sum - T 2^T) / 2^(T+1)
    let numerator = BigInt::from(scaled_max_sum) * 2 - (BigInt::from(horizon) << horizon as usize);
    DyadicValue::normalize(numerator, horizon + 1)
}

fn sum_of_max(gains: &RawGains, ranks: &[usize], days: u32, ties: TieOrder) -> u128 {
    if days == 0 {
        return u128::from(gains.max());
    }
    gains
        .branches(ranks, ties)
        .iter()
        .map(|next| sum_of_max(next, ranks, days - 1, ties))
        .sum()
}

/// Exact `E[max total gain] - T/2` for a fixed subset by enumerating all
/// `2^T` branch sequences.
pub fn brute_regret_fixed(
    k: usize,
    subset: &RankSubset,
    horizon: u32,
    ties: TieOrder,
) -> Result<DyadicValue> {
    check_k(k)?;
    if subset.k() != k {
        return Err(Error::MismatchedK {
            expected: k,
            found: subset.k(),
        });
    }
    if horizon > MAX_BRUTE_HORIZON {
        return Err(Error::BudgetExceeded {
            what: format!("horizon {horizon} > {MAX_BRUTE_HORIZON} for 2^T enumeration"),
        });
    }
    let ranks = subset.ranks();
    let total = sum_of_max(&RawGains::zeros(k), &ranks, horizon, ties);
    Ok(regret_from_scaled_max(total, horizon))
}

/// `2^days * E[max]` with the adversary maximizing over the family each day.
fn best_scaled(gains: &RawGains, family: &[Vec<usize>], days: u32, ties: TieOrder) -> u128 {
    if days == 0 {
        return u128::from(gains.max());
    }
    family
        .iter()
        .map(|ranks| {
            gains
                .branches(ranks, ties)
                .iter()
                .map(|next| best_scaled(next, family, days - 1, ties))
                .sum::<u128>()
        })
        .max()
        .expect("family is nonempty")
}

/// Exact adaptive value `E[max total gain]` by un-memoized enumeration.
pub fn brute_expected_max_adaptive(
    k: usize,
    family: &[RankSubset],
    horizon: u32,
    ties: TieOrder,
) -> Result<DyadicValue> {
    check_k(k)?;
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if let Some(bad) = family.iter().find(|s| s.k() != k) {
        return Err(Error::MismatchedK {
            expected: k,
            found: bad.k(),
        });
    }
    let fan_out = 2 * family.len() as u64;
    let within_budget = fan_out
        .checked_pow(horizon)
        .is_some_and(|nodes| nodes <= MAX_BRUTE_NODES);
    if !within_budget || horizon > 100 {
        return Err(Error::BudgetExceeded {
            what: format!("({fan_out})^{horizon} nodes > {MAX_BRUTE_NODES}"),
        });
    }
    let family: Vec<Vec<usize>> = family.iter().map(|s| s.ranks()).collect();
    let start = RawGains::zeros(k);
    let scaled = if horizon == 0 {
        0
    } else {
        // first day fanned out across workers; integer max/sum is order-free
        family
            .par_iter()
            .map(|ranks| {
                start
                    .branches(ranks, ties)
                    .par_iter()
                    .map(|next| best_scaled(next, &family, horizon - 1, ties))
                    .sum::<u128>()
            })
            .max()
            .expect("family is nonempty")
    };
    Ok(DyadicValue::normalize(BigInt::from(scaled), horizon))
}

/// Exact adaptive regret, `brute_expected_max_adaptive - T/2`.
pub fn brute_value_adaptive(
    k: usize,
    family: &[RankSubset],
    horizon: u32,
    ties: TieOrder,
) -> Result<DyadicValue> {
    let expected_max = brute_expected_max_adaptive(k, family, horizon, ties)?;
    Ok(expected_max.sub(&DyadicValue::normalize(BigInt::from(horizon), 1)))
}

/// For two experts under comb the gap is a reflected simple random walk and
/// the leader moves exactly when the gap is zero, so
/// `R(T) = 1/2 * sum_{t<T} P(S_t = 0)` with `P(S_2m = 0) = C(2m, m) / 4^m`.
pub fn k2_closed_form(horizon: u32) -> Result<DyadicValue> {
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    let last_m = (horizon - 1) / 2;
    // sum_m C(2m, m) 4^(last_m - m), over 4^last_m
    let mut central = BigInt::from(1u32);
    let mut numerator = BigInt::from(0u32);
    for m in 0..=last_m {
        numerator += &central << (2 * (last_m - m)) as usize;
        central = central * (2 * m + 1) * (2 * m + 2) / ((m + 1) * (m + 1));
    }
    Ok(DyadicValue::normalize(numerator, 2 * last_m + 1))
}
