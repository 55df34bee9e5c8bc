//! Ranked gap states and the one-day transition of a balanced rank-subset
//! adversary.
//!
//! A state records, for each expert in rank order, how far its total gain
//! trails the leader. Absolute gains and the day index are not needed: with
//! a balanced adversary every player earns `T/2` in expectation, so regret is
//! the accumulated increase of the leader's gain minus `T/2`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MIN_EXPERTS: usize = 2;
pub const MAX_EXPERTS: usize = 8;

/// Bits per packed gap in a [`StateKey`].
pub const GAP_BITS: u32 = 12;
pub const MAX_GAP: u32 = (1 << GAP_BITS) - 1;

/// Packed `gaps[1..k]`; `gaps[0]` is always zero and is not stored.
pub type StateKey = u128;

pub fn check_k(k: usize) -> Result<()> {
    if (MIN_EXPERTS..=MAX_EXPERTS).contains(&k) {
        Ok(())
    } else {
        Err(Error::ExpertCountOutOfRange(k))
    }
}

/// Sorted, leader-relative deficits of the `k` experts.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapState {
    k: u8,
    gaps: [u16; MAX_EXPERTS],
}

impl GapState {
    pub fn new(gaps: &[u32]) -> Result<Self> {
        check_k(gaps.len())?;
        if gaps[0] != 0 {
            return Err(Error::InvalidState(format!(
                "leader gap must be 0, got {gaps:?}"
            )));
        }
        if gaps.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidState(format!("gaps not sorted: {gaps:?}")));
        }
        if let Some(&gap) = gaps.iter().find(|&&g| g > MAX_GAP) {
            return Err(Error::GapOverflow {
                gap,
                bits: GAP_BITS,
            });
        }
        let mut packed = [0u16; MAX_EXPERTS];
        for (slot, &g) in packed.iter_mut().zip(gaps) {
            *slot = g as u16;
        }
        Ok(Self {
            k: gaps.len() as u8,
            gaps: packed,
        })
    }

    pub fn k(&self) -> usize {
        usize::from(self.k)
    }

    pub fn gaps(&self) -> &[u16] {
        &self.gaps[..self.k()]
    }

    pub fn max_gap(&self) -> u32 {
        u32::from(self.gaps[self.k() - 1])
    }

    pub fn gap_sum(&self) -> u32 {
        self.gaps().iter().map(|&g| u32::from(g)).sum()
    }

    /// Gaps grow by at most one per day.
    pub fn is_reachable_by_day(&self, day: u32) -> bool {
        self.max_gap() <= day
    }
}

impl fmt::Debug for GapState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GapState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, g) in self.gaps().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for GapState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let gaps = inner
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad gap {part:?} in state {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GapState::new(&gaps)
    }
}

pub fn initial_state(k: usize) -> Result<GapState> {
    check_k(k)?;
    GapState::new(&vec![0; k])
}

/// A balanced rank-subset strategy, stored canonically (rank 1 included).
///
/// Bit `i` of the mask stands for rank `i + 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankSubset {
    k: u8,
    mask: u8,
}

impl RankSubset {
    pub fn k(&self) -> usize {
        usize::from(self.k)
    }

    pub fn mask(&self) -> u8 {
        self.mask
    }

    pub fn complement_mask(&self) -> u8 {
        full_mask(self.k()) & !self.mask
    }

    pub fn contains(&self, rank: usize) -> bool {
        rank >= 1 && rank <= self.k() && self.mask & (1 << (rank - 1)) != 0
    }

    /// Member ranks, ascending, 1-based.
    pub fn ranks(&self) -> Vec<usize> {
        (1..=self.k()).filter(|&r| self.contains(r)).collect()
    }

    pub fn is_full(&self) -> bool {
        self.mask == full_mask(self.k())
    }

    /// Builds the canonical subset from a mask that may or may not contain rank 1.
    pub fn from_mask(k: usize, mask: u8) -> Result<Self> {
        check_k(k)?;
        if mask & !full_mask(k) != 0 {
            let rank = (8 - mask.leading_zeros()) as usize;
            return Err(Error::RankOutOfRange { rank, k });
        }
        let mask = if mask & 1 == 1 {
            mask
        } else {
            full_mask(k) & !mask
        };
        Ok(Self { k: k as u8, mask })
    }

    /// Parses `1,3,5` or `[1,3,5]` for `k` experts.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
        let ranks = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad rank {part:?} in subset {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        canonical_subset(&ranks, k)
    }

    /// All `2^(k-1)` canonical subsets in lexicographic rank-list order.
    pub fn all(k: usize) -> Result<Vec<Self>> {
        check_k(k)?;
        let mut subsets: Vec<Self> = (0..1u16 << (k - 1))
            .map(|rest| Self {
                k: k as u8,
                mask: ((rest << 1) | 1) as u8,
            })
            .collect();
        subsets.sort();
        Ok(subsets)
    }
}

fn full_mask(k: usize) -> u8 {
    ((1u16 << k) - 1) as u8
}

impl Ord for RankSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then_with(|| self.ranks().cmp(&other.ranks()))
    }
}

impl PartialOrd for RankSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RankSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.ranks().iter().map(|r| r.to_string()).collect();
        f.write_str(&ranks.join(","))
    }
}

impl fmt::Debug for RankSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// The comb strategy: all odd ranks.
pub fn comb_subset(k: usize) -> Result<RankSubset> {
    check_k(k)?;
    let mask = (0..k).step_by(2).fold(0u8, |m, i| m | (1 << i));
    RankSubset::from_mask(k, mask)
}

/// `members` if it contains rank 1, otherwise its complement.
pub fn canonical_subset(members: &[usize], k: usize) -> Result<RankSubset> {
    check_k(k)?;
    let mut mask = 0u8;
    for &rank in members {
        if rank == 0 || rank > k {
            return Err(Error::RankOutOfRange { rank, k });
        }
        mask |= 1 << (rank - 1);
    }
    RankSubset::from_mask(k, mask)
}

/// Parses a colon-separated family (`1,3,6:1,4,6`) or `all`.
/// The result is canonical, sorted and deduplicated.
pub fn parse_family(text: &str, k: usize) -> Result<Vec<RankSubset>> {
    let text = text.trim();
    if text == "all" {
        return RankSubset::all(k);
    }
    let mut family = text
        .split(':')
        .filter(|part| !part.trim().is_empty())
        .map(|part| RankSubset::parse(part, k))
        .collect::<Result<Vec<_>>>()?;
    family.sort();
    family.dedup();
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(family)
}

pub fn format_family(family: &[RankSubset]) -> String {
    family
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

/// One branch of a day: the successor state and how much the leader's total
/// gain grew (0 or 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BranchOutcome {
    pub next: GapState,
    pub leader_delta: u8,
}

/// Applies one day on which exactly the ranks in `gain_mask` receive gain 1.
pub fn apply_gains(state: &GapState, gain_mask: u8) -> BranchOutcome {
    let k = state.k();
    let gaps = state.gaps();
    // the leader moves iff some expert tied with it gains
    let leader_delta = (0..k).any(|i| gaps[i] == 0 && gain_mask & (1 << i) != 0) as u16;
    let mut next = [0u16; MAX_EXPERTS];
    for i in 0..k {
        let gained = u16::from(gain_mask & (1 << i) != 0);
        next[i] = gaps[i] + leader_delta - gained;
    }
    next[..k].sort_unstable();
    BranchOutcome {
        next: GapState {
            k: state.k,
            gaps: next,
        },
        leader_delta: leader_delta as u8,
    }
}

/// The two equally likely branches: `subset` gains, then its complement gains.
pub fn step(state: &GapState, subset: &RankSubset) -> Result<(BranchOutcome, BranchOutcome)> {
    if state.k() != subset.k() {
        return Err(Error::MismatchedK {
            expected: state.k(),
            found: subset.k(),
        });
    }
    if state.max_gap() >= MAX_GAP {
        return Err(Error::GapOverflow {
            gap: state.max_gap() + 1,
            bits: GAP_BITS,
        });
    }
    Ok((
        apply_gains(state, subset.mask()),
        apply_gains(state, subset.complement_mask()),
    ))
}

pub fn encode_state(state: &GapState) -> Result<StateKey> {
    let mut key: StateKey = 0;
    for (i, &g) in state.gaps().iter().enumerate().skip(1) {
        if u32::from(g) > MAX_GAP {
            return Err(Error::GapOverflow {
                gap: u32::from(g),
                bits: GAP_BITS,
            });
        }
        key |= StateKey::from(g) << (GAP_BITS * (i as u32 - 1));
    }
    Ok(key)
}

/// Packs without the width check; callers guarantee gaps fit.
pub(crate) fn encode_unchecked(state: &GapState) -> StateKey {
    let mut key: StateKey = 0;
    for (i, &g) in state.gaps().iter().enumerate().skip(1) {
        key |= StateKey::from(g) << (GAP_BITS * (i as u32 - 1));
    }
    key
}

pub fn decode_state(key: StateKey, k: usize) -> Result<GapState> {
    check_k(k)?;
    if key >> (GAP_BITS * (k as u32 - 1)) != 0 {
        return Err(Error::InvalidState(format!(
            "key {key:#x} has bits beyond k = {k}"
        )));
    }
    let gaps: Vec<u32> = std::iter::once(0)
        .chain((1..k).map(|i| ((key >> (GAP_BITS * (i as u32 - 1))) as u32) & MAX_GAP))
        .collect();
    GapState::new(&gaps)
}

pub(crate) fn decode_unchecked(key: StateKey, k: usize) -> GapState {
    let mut gaps = [0u16; MAX_EXPERTS];
    for (i, slot) in gaps.iter_mut().enumerate().take(k).skip(1) {
        *slot = ((key >> (GAP_BITS * (i as u32 - 1))) as u32 & MAX_GAP) as u16;
    }
    GapState { k: k as u8, gaps }
}
