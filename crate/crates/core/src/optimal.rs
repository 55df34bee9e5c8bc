//! Best adaptive adversary over a family of rank subsets, and the best single
//! fixed subset.
//!
//! `V(s, 0) = 0` and `V(s, r) = max_A ((da + V(sa, r-1)) + (db + V(sb, r-1))) / 2`
//! over the family, where `(sa, da), (sb, db) = step(s, A)`. `V(start, T)` is
//! the expected maximum total gain; regret subtracts `T/2`.
//! The memo is keyed by (state, remaining days) because the horizon is finite.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forward::{regret_series_fixed, ForwardOptions};
use crate::game::{
    apply_gains, check_k, decode_unchecked, encode_unchecked, format_family, initial_state,
    GapState, RankSubset, StateKey, MAX_GAP,
};
use crate::numeric::Value;

/// Default cap on memoized nodes (roughly a few GB with exact values).
pub const DEFAULT_NODE_BUDGET: usize = 20_000_000;

/// Memoized adaptive-adversary evaluator for one family.
#[derive(Clone, Debug)]
pub struct AdaptiveSolver<V> {
    k: usize,
    family: Vec<RankSubset>,
    memo: HashMap<(StateKey, u32), V>,
    node_budget: usize,
}

impl<V: Value> AdaptiveSolver<V> {
    pub fn new(k: usize, family: &[RankSubset]) -> Result<Self> {
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
        let mut family = family.to_vec();
        family.sort();
        family.dedup();
        Ok(Self {
            k,
            family,
            memo: HashMap::new(),
            node_budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn with_node_budget(mut self, nodes: usize) -> Self {
        self.node_budget = nodes;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn family(&self) -> &[RankSubset] {
        &self.family
    }

    pub fn node_count(&self) -> usize {
        self.memo.len()
    }

    /// Expected leader gain over the next `remaining` days from `state`.
    pub fn future_gain(&mut self, state: &GapState, remaining: u32) -> Result<V> {
        if state.k() != self.k {
            return Err(Error::MismatchedK {
                expected: self.k,
                found: state.k(),
            });
        }
        if state.max_gap() + remaining > MAX_GAP {
            return Err(Error::GapOverflow {
                gap: state.max_gap() + remaining,
                bits: crate::game::GAP_BITS,
            });
        }
        self.eval(encode_unchecked(state), remaining)
    }

    fn eval(&mut self, key: StateKey, remaining: u32) -> Result<V> {
        if remaining == 0 {
            return Ok(V::zero());
        }
        if let Some(v) = self.memo.get(&(key, remaining)) {
            return Ok(v.clone());
        }
        if self.memo.len() >= self.node_budget {
            return Err(Error::BudgetExceeded {
                what: format!("memo reached {} nodes", self.node_budget),
            });
        }
        let state = decode_unchecked(key, self.k);
        let mut best: Option<V> = None;
        for i in 0..self.family.len() {
            let subset = self.family[i];
            let v = self.branch_value(&state, &subset, remaining)?;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        let best = best.expect("family is nonempty");
        self.memo.insert((key, remaining), best.clone());
        Ok(best)
    }

    fn branch_value(&mut self, state: &GapState, subset: &RankSubset, remaining: u32) -> Result<V> {
        let mut total = V::zero();
        for gains in [subset.mask(), subset.complement_mask()] {
            let out = apply_gains(state, gains);
            let cont = self.eval(encode_unchecked(&out.next), remaining - 1)?;
            total.add_assign(&cont);
            if out.leader_delta == 1 {
                total.add_assign(&V::from_int(1));
            }
        }
        Ok(total.half())
    }

    fn child_value(&self, state: &GapState, subset: &RankSubset, remaining: u32) -> Option<V> {
        let mut total = V::zero();
        for gains in [subset.mask(), subset.complement_mask()] {
            let out = apply_gains(state, gains);
            let cont = if remaining == 1 {
                V::zero()
            } else {
                self.memo
                    .get(&(encode_unchecked(&out.next), remaining - 1))?
                    .clone()
            };
            total.add_assign(&cont);
            if out.leader_delta == 1 {
                total.add_assign(&V::from_int(1));
            }
        }
        Some(total.half())
    }

    /// Every family member attaining the maximum at an already computed node.
    pub fn maximizers(&self, state: &GapState, remaining: u32) -> Result<Vec<RankSubset>> {
        let not_computed = || Error::NodeNotComputed {
            state: state.to_string(),
            remaining,
        };
        if state.k() != self.k || remaining == 0 {
            return Err(not_computed());
        }
        let key = encode_unchecked(state);
        let best = self.memo.get(&(key, remaining)).ok_or_else(not_computed)?;
        let mut winners = Vec::new();
        for subset in &self.family {
            let v = self
                .child_value(state, subset, remaining)
                .ok_or_else(not_computed)?;
            if v == *best {
                winners.push(*subset);
            }
        }
        Ok(winners)
    }

    /// All memoized nodes, sorted by remaining days (descending) then state.
    pub fn nodes(&self) -> Vec<(GapState, u32)> {
        let mut nodes: Vec<(StateKey, u32)> = self.memo.keys().copied().collect();
        nodes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        nodes
            .into_iter()
            .map(|(key, r)| (decode_unchecked(key, self.k), r))
            .collect()
    }

    /// One line per memoized node: `state remaining -> {subsets}`.
    pub fn trace_lines(&self) -> Vec<String> {
        self.nodes()
            .into_iter()
            .map(|(state, remaining)| {
                let winners = self
                    .maximizers(&state, remaining)
                    .expect("memoized nodes have memoized children");
                format!("{state} {remaining} -> {{{}}}", format_family(&winners))
            })
            .collect()
    }
}

/// Result of [`value_adaptive`]; keeps the memo for policy inspection.
#[derive(Clone, Debug)]
pub struct AdaptivePolicyValue<V> {
    pub horizon: u32,
    /// `E[max total gain]` under per-state maximization.
    pub expected_max: V,
    /// `expected_max - T/2`.
    pub regret: V,
    pub solver: AdaptiveSolver<V>,
}

impl<V: Value> AdaptivePolicyValue<V> {
    pub fn k(&self) -> usize {
        self.solver.k()
    }

    pub fn family(&self) -> &[RankSubset] {
        self.solver.family()
    }

    pub fn node_count(&self) -> usize {
        self.solver.node_count()
    }

    pub fn policy_trace(&self, state: &GapState, remaining: u32) -> Result<Vec<RankSubset>> {
        if remaining > self.horizon {
            return Err(Error::NodeNotComputed {
                state: state.to_string(),
                remaining,
            });
        }
        self.solver.maximizers(state, remaining)
    }
}

pub fn value_adaptive<V: Value>(
    k: usize,
    family: &[RankSubset],
    horizon: u32,
) -> Result<AdaptivePolicyValue<V>> {
    value_adaptive_with_budget(k, family, horizon, DEFAULT_NODE_BUDGET)
}

pub fn value_adaptive_with_budget<V: Value>(
    k: usize,
    family: &[RankSubset],
    horizon: u32,
    node_budget: usize,
) -> Result<AdaptivePolicyValue<V>> {
    let mut solver = AdaptiveSolver::<V>::new(k, family)?.with_node_budget(node_budget);
    let expected_max = solver.future_gain(&initial_state(k)?, horizon)?;
    let regret = expected_max.sub(&V::from_int(i64::from(horizon)).half());
    Ok(AdaptivePolicyValue {
        horizon,
        expected_max,
        regret,
        solver,
    })
}

/// Outcome of scanning every canonical subset as a fixed strategy.
#[derive(Clone, Debug, PartialEq)]
pub struct BestFixed<V> {
    pub k: usize,
    pub horizon: u32,
    /// The lexicographically smallest maximizer.
    pub subset: RankSubset,
    /// All maximizers, lexicographic order.
    pub maximizers: Vec<RankSubset>,
    pub regret: V,
    pub expected_max: V,
    /// Every canonical subset with its regret, lexicographic order.
    pub scan: Vec<(RankSubset, V)>,
}

pub fn best_fixed_subset<V: Value>(k: usize, horizon: u32) -> Result<BestFixed<V>> {
    let scan = RankSubset::all(k)?
        .into_iter()
        .map(|subset| {
            let series = regret_series_fixed::<V>(k, &subset, horizon, &ForwardOptions::exact())?;
            Ok((subset, series.regret(horizon).clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = scan[0].1.clone();
    for (_, v) in &scan {
        if *v > best {
            best = v.clone();
        }
    }
    let maximizers: Vec<RankSubset> = scan
        .iter()
        .filter(|(_, v)| *v == best)
        .map(|(s, _)| *s)
        .collect();
    Ok(BestFixed {
        k,
        horizon,
        subset: maximizers[0],
        maximizers,
        expected_max: best.add(&V::from_int(i64::from(horizon)).half()),
        regret: best,
        scan,
    })
}
