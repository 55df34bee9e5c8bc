//! Forward propagation of the gap-state distribution under a fixed rank
//! subset, producing the expected-regret series `T -> R(T)`.
//!
//! Each day every state splits its weight evenly onto its two branch
//! successors. The expected leader increase of that day is accumulated, and
//! `R(T) = sum_{t<T} E[leader_delta_t] - T/2`.
//!
//! States whose weight falls below the prune threshold are dropped without
//! renormalizing. A trajectory lost before day `t` can add at most one per
//! remaining day to the leader's gain, so the true regret lies in
//! `[R(T), R(T) + sum_t pruned_t * (T - t)]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{
    apply_gains, decode_unchecked, encode_state, encode_unchecked, initial_state, GapState,
    RankSubset, StateKey, MAX_GAP,
};
use crate::numeric::{DyadicValue, Value, ValueBackend};

/// Fixed work-unit size; chunk boundaries never depend on the worker count.
const CHUNK: usize = 1 << 13;

/// The DP frontier: weights of reachable gap states, sorted by key.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseDistribution<V> {
    k: usize,
    entries: Vec<(StateKey, V)>,
    day: u32,
    pruned_mass_by_day: Vec<V>,
}

impl<V: Value> SparseDistribution<V> {
    pub fn initial(k: usize) -> Result<Self> {
        let start = initial_state(k)?;
        Ok(Self {
            k,
            entries: vec![(encode_state(&start)?, V::from_int(1))],
            day: 0,
            pruned_mass_by_day: Vec::new(),
        })
    }

    /// Builds a distribution from arbitrary (state, weight) pairs; duplicate
    /// states are merged and zero weights dropped.
    pub fn from_states(k: usize, day: u32, states: Vec<(GapState, V)>) -> Result<Self> {
        let mut entries = Vec::with_capacity(states.len());
        for (state, weight) in states {
            if state.k() != k {
                return Err(Error::MismatchedK {
                    expected: k,
                    found: state.k(),
                });
            }
            if !state.is_reachable_by_day(day) {
                return Err(Error::InvalidState(format!(
                    "{state} cannot occur on day {day}"
                )));
            }
            entries.push((encode_state(&state)?, weight));
        }
        entries.sort_by_key(|e| e.0);
        Ok(Self {
            k,
            entries: merge_sorted(entries),
            day,
            pruned_mass_by_day: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn day(&self) -> u32 {
        self.day
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pruned_mass_by_day(&self) -> &[V] {
        &self.pruned_mass_by_day
    }

    pub fn get(&self, state: &GapState) -> Option<&V> {
        let key = encode_state(state).ok()?;
        self.entries
            .binary_search_by_key(&key, |e| e.0)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (GapState, &V)> + '_ {
        self.entries
            .iter()
            .map(move |(key, w)| (decode_unchecked(*key, self.k), w))
    }

    pub fn total_weight(&self) -> V {
        let mut total = V::zero();
        for (_, w) in &self.entries {
            total.add_assign(w);
        }
        total
    }

    pub fn total_pruned(&self) -> V {
        let mut total = V::zero();
        for w in &self.pruned_mass_by_day {
            total.add_assign(w);
        }
        total
    }
}

fn merge_sorted<V: Value>(sorted: Vec<(StateKey, V)>) -> Vec<(StateKey, V)> {
    let mut merged: Vec<(StateKey, V)> = Vec::with_capacity(sorted.len() / 2 + 1);
    for (key, w) in sorted {
        match merged.last_mut() {
            Some((last, acc)) if *last == key => acc.add_assign(&w),
            _ => {
                if !w.is_zero() {
                    merged.push((key, w));
                }
            }
        }
    }
    merged
}

/// Pruning and reduction settings for the forward engine.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardOptions {
    /// Entries with weight strictly below this are dropped; zero disables pruning.
    pub prune: DyadicValue,
    /// Stable, key-ordered merging of successor weights (bit-reproducible floats).
    pub deterministic: bool,
}

impl ForwardOptions {
    pub fn exact() -> Self {
        Self {
            prune: DyadicValue::zero(),
            deterministic: true,
        }
    }

    pub fn pruned(prune: DyadicValue) -> Self {
        Self {
            prune,
            deterministic: true,
        }
    }

    /// Default for float sweeps: prune below `2^-50`.
    pub fn float_sweep() -> Self {
        Self::pruned(DyadicValue::pow2_neg(50))
    }

    pub fn for_backend(backend: ValueBackend, prune: DyadicValue) -> Self {
        Self {
            prune,
            deterministic: backend.deterministic_reduction(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult<V> {
    pub next: SparseDistribution<V>,
    pub expected_delta: V,
    pub pruned: V,
}

/// Advances the distribution by one day under `subset`.
pub fn evolve_step<V: Value>(
    dist: &SparseDistribution<V>,
    subset: &RankSubset,
    opts: &ForwardOptions,
) -> Result<StepResult<V>> {
    if subset.k() != dist.k {
        return Err(Error::MismatchedK {
            expected: dist.k,
            found: subset.k(),
        });
    }
    // every gap is at most the day index
    if dist.day >= MAX_GAP {
        return Err(Error::GapOverflow {
            gap: dist.day + 1,
            bits: crate::game::GAP_BITS,
        });
    }
    let k = dist.k;
    let (gain_a, gain_b) = (subset.mask(), subset.complement_mask());

    let expand = |chunk: &[(StateKey, V)]| {
        let mut successors = Vec::with_capacity(chunk.len() * 2);
        let mut delta = V::zero();
        for (key, w) in chunk {
            let state = decode_unchecked(*key, k);
            let half = w.half();
            for gains in [gain_a, gain_b] {
                let out = apply_gains(&state, gains);
                if out.leader_delta == 1 {
                    delta.add_assign(&half);
                }
                successors.push((encode_unchecked(&out.next), half.clone()));
            }
        }
        (successors, delta)
    };

    let parts: Vec<(Vec<(StateKey, V)>, V)> = if dist.entries.len() > CHUNK {
        dist.entries.par_chunks(CHUNK).map(expand).collect()
    } else {
        dist.entries.chunks(CHUNK).map(expand).collect()
    };

    let mut expected_delta = V::zero();
    let mut successors = Vec::with_capacity(dist.entries.len() * 2);
    for (succ, delta) in parts {
        expected_delta.add_assign(&delta);
        successors.extend(succ);
    }

    if opts.deterministic {
        successors.par_sort_by_key(|e| e.0);
    } else {
        successors.par_sort_unstable_by_key(|e| e.0);
    }
    let mut entries = merge_sorted(successors);

    let mut pruned = V::zero();
    if !opts.prune.is_zero() {
        let threshold = V::from_dyadic(&opts.prune);
        entries.retain(|(_, w)| {
            if *w < threshold {
                pruned.add_assign(w);
                false
            } else {
                true
            }
        });
    }

    let mut pruned_mass_by_day = dist.pruned_mass_by_day.clone();
    pruned_mass_by_day.push(pruned.clone());
    Ok(StepResult {
        next: SparseDistribution {
            k,
            entries,
            day: dist.day + 1,
            pruned_mass_by_day,
        },
        expected_delta,
        pruned,
    })
}

/// `T -> R(T)` for a fixed subset, with pruning error bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretSeries<V> {
    pub k: usize,
    pub subset: RankSubset,
    /// `values[T - 1] = R(T)`.
    pub values: Vec<V>,
    /// `error_bounds[T - 1]` bounds the regret lost to pruning at horizon `T`.
    pub error_bounds: Vec<V>,
    pub backend: ValueBackend,
    pub prune: DyadicValue,
    /// Largest frontier held during the run.
    pub peak_frontier: usize,
}

impl<V: Value> RegretSeries<V> {
    pub fn t_max(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn regret(&self, t: u32) -> &V {
        &self.values[t as usize - 1]
    }

    pub fn error_bound(&self, t: u32) -> &V {
        &self.error_bounds[t as usize - 1]
    }

    /// `R(T) + T/2`, the expected maximum total gain.
    pub fn expected_max(&self, t: u32) -> V {
        self.regret(t).add(&V::from_int(i64::from(t)).half())
    }

    pub fn label(&self) -> String {
        format!("[{}]", self.subset)
    }
}

/// Runs the forward engine from the all-zero state for `t_max` days.
pub fn regret_series_fixed<V: Value>(
    k: usize,
    subset: &RankSubset,
    t_max: u32,
    opts: &ForwardOptions,
) -> Result<RegretSeries<V>> {
    regret_series_with(k, subset, t_max, opts, |_, _| {})
}

/// Like [`regret_series_fixed`], calling `on_day(day, frontier_len)` after each step.
pub fn regret_series_with<V: Value>(
    k: usize,
    subset: &RankSubset,
    t_max: u32,
    opts: &ForwardOptions,
    mut on_day: impl FnMut(u32, usize),
) -> Result<RegretSeries<V>> {
    if t_max == 0 {
        return Err(Error::EmptyHorizon);
    }
    if subset.k() != k {
        return Err(Error::MismatchedK {
            expected: k,
            found: subset.k(),
        });
    }
    let mut dist = SparseDistribution::<V>::initial(k)?;
    let mut leader_gain = V::zero();
    let mut pruned_so_far = V::zero();
    let mut bound = V::zero();
    let mut values = Vec::with_capacity(t_max as usize);
    let mut error_bounds = Vec::with_capacity(t_max as usize);
    let mut peak_frontier = dist.len();

    for t in 0..t_max {
        let step = evolve_step(&dist, subset, opts)?;
        leader_gain.add_assign(&step.expected_delta);
        // bound(T) = sum_{s<T} pruned_s * (T - s), updated incrementally
        pruned_so_far.add_assign(&step.pruned);
        bound.add_assign(&pruned_so_far);
        let horizon = t + 1;
        values.push(leader_gain.sub(&V::from_int(i64::from(horizon)).half()));
        error_bounds.push(bound.clone());
        dist = step.next;
        // the ledger lives on in the series; the frontier copy is not needed
        dist.pruned_mass_by_day.clear();
        peak_frontier = peak_frontier.max(dist.len());
        on_day(horizon, dist.len());
    }

    Ok(RegretSeries {
        k,
        subset: *subset,
        values,
        error_bounds,
        backend: if V::EXACT {
            ValueBackend::Exact
        } else {
            ValueBackend::Float {
                deterministic_reduction: opts.deterministic,
            }
        },
        prune: opts.prune.clone(),
        peak_frontier,
    })
}
