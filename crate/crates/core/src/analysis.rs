//! Statistics over regret series.
//!
//! The main one is `D(T) = scale * (R_a(T)^2 - R_b(T)^2) / T`. If both
//! strategies had regret `c sqrt(T) + o(sqrt(T))` with the same `c`, `D`
//! would tend to zero; a `D` that stays flat above zero separates the two
//! constants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::forward::RegretSeries;
use crate::numeric::{format_sig17, Value};

/// One point of a [`DiffStatSeries`]: `D(t) = scaled_diff / t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffEntry<V> {
    pub t: u32,
    /// `scale * (R_a(t)^2 - R_b(t)^2)`, not yet divided by `t`.
    pub scaled_diff: V,
}

impl<V: Value> DiffEntry<V> {
    pub fn value(&self) -> f64 {
        self.scaled_diff.to_f64() / f64::from(self.t)
    }

    /// `p/q` in lowest terms when the inputs were exact.
    pub fn exact_fraction(&self) -> Option<String> {
        let d = self.scaled_diff.to_dyadic()?;
        let mut numerator = d.numerator().clone();
        let mut denominator = (BigInt::one() << d.exponent() as usize) * BigInt::from(self.t);
        let g = numerator.gcd(&denominator);
        numerator /= &g;
        denominator /= &g;
        Some(if denominator.is_one() {
            numerator.to_string()
        } else {
            format!("{numerator}/{denominator}")
        })
    }

    /// Exact fraction when available, 17 significant digits otherwise.
    pub fn display(&self) -> String {
        self.exact_fraction()
            .unwrap_or_else(|| format_sig17(self.value()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffStatSeries<V> {
    pub label_a: String,
    pub label_b: String,
    pub scale: V,
    pub entries: Vec<DiffEntry<V>>,
}

impl<V: Value> DiffStatSeries<V> {
    pub fn values(&self) -> Vec<(u32, f64)> {
        self.entries.iter().map(|e| (e.t, e.value())).collect()
    }

    pub fn at(&self, t: u32) -> Option<&DiffEntry<V>> {
        self.entries.iter().find(|e| e.t == t)
    }
}

fn check_compatible<V: Value>(a: &RegretSeries<V>, b: &RegretSeries<V>) -> Result<()> {
    if a.k != b.k {
        return Err(Error::MismatchedSeries(format!(
            "k = {} vs k = {}",
            a.k, b.k
        )));
    }
    if a.t_max() != b.t_max() {
        return Err(Error::MismatchedSeries(format!(
            "T ranges 1..={} vs 1..={}",
            a.t_max(),
            b.t_max()
        )));
    }
    Ok(())
}

pub fn diff_stat<V: Value>(
    a: &RegretSeries<V>,
    b: &RegretSeries<V>,
    scale: &V,
) -> Result<DiffStatSeries<V>> {
    check_compatible(a, b)?;
    let entries = (1..=a.t_max())
        .map(|t| {
            let ra = a.regret(t);
            let rb = b.regret(t);
            DiffEntry {
                t,
                scaled_diff: scale.mul(&ra.mul(ra).sub(&rb.mul(rb))),
            }
        })
        .collect();
    Ok(DiffStatSeries {
        label_a: a.label(),
        label_b: b.label(),
        scale: scale.clone(),
        entries,
    })
}

/// Worst case of `D(T)` over the pruning intervals: `R_a` at its lower end and
/// `R_b` at its upper end. Positive entries certify `D(T) > 0`.
pub fn diff_lower_bounds<V: Value>(
    a: &RegretSeries<V>,
    b: &RegretSeries<V>,
    scale: &V,
) -> Result<Vec<(u32, f64)>> {
    check_compatible(a, b)?;
    Ok((1..=a.t_max())
        .map(|t| {
            let ra = a.regret(t);
            let rb_hi = b.regret(t).add(b.error_bound(t));
            let lower = scale.mul(&ra.mul(ra).sub(&rb_hi.mul(&rb_hi)));
            (t, lower.to_f64() / f64::from(t))
        })
        .collect())
}

/// Dispersion of `D` over a window.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstancySummary {
    pub t_lo: u32,
    pub t_hi: u32,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Ordinary least squares slope of `D(T)` against `T`.
    pub slope: f64,
}

impl ConstancySummary {
    /// `max / min`; infinite unless `min > 0`.
    pub fn ratio(&self) -> f64 {
        if self.min > 0.0 {
            self.max / self.min
        } else {
            f64::INFINITY
        }
    }
}

impl fmt::Display for ConstancySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "window={}..{}", self.t_lo, self.t_hi)?;
        writeln!(f, "min={}", format_sig17(self.min))?;
        writeln!(f, "max={}", format_sig17(self.max))?;
        writeln!(f, "mean={}", format_sig17(self.mean))?;
        writeln!(f, "slope={}", format_sig17(self.slope))?;
        writeln!(f, "max_over_min={}", format_sig17(self.ratio()))
    }
}

pub fn constancy_report<V: Value>(
    d: &DiffStatSeries<V>,
    t_lo: u32,
    t_hi: u32,
) -> Result<ConstancySummary> {
    let points: Vec<(f64, f64)> = d
        .entries
        .iter()
        .filter(|e| e.t >= t_lo && e.t <= t_hi)
        .map(|e| (f64::from(e.t), e.value()))
        .collect();
    if t_lo >= t_hi || points.is_empty() {
        return Err(Error::EmptyWindow { lo: t_lo, hi: t_hi });
    }
    Ok(summarize(t_lo, t_hi, &points))
}

fn summarize(t_lo: u32, t_hi: u32, points: &[(f64, f64)]) -> ConstancySummary {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean)).sum();
    ConstancySummary {
        t_lo,
        t_hi,
        min: points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        max: points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        mean,
        slope: if sxx > 0.0 { sxy / sxx } else { 0.0 },
    }
}

/// `T -> R(T) / sqrt(T)`, the empirical proxy for the growth constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantEstimate {
    pub label: String,
    pub entries: Vec<(u32, f64)>,
}

impl ConstantEstimate {
    pub fn last(&self) -> Option<f64> {
        self.entries.last().map(|e| e.1)
    }

    /// (min, max) over `[t_lo, t_hi]`.
    pub fn window_range(&self, t_lo: u32, t_hi: u32) -> Option<(f64, f64)> {
        let window: Vec<f64> = self
            .entries
            .iter()
            .filter(|e| e.0 >= t_lo && e.0 <= t_hi)
            .map(|e| e.1)
            .collect();
        if window.is_empty() {
            return None;
        }
        Some((
            window.iter().copied().fold(f64::INFINITY, f64::min),
            window.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ))
    }
}

pub fn sqrt_normalized<V: Value>(s: &RegretSeries<V>) -> ConstantEstimate {
    ConstantEstimate {
        label: s.label(),
        entries: (1..=s.t_max())
            .map(|t| (t, s.regret(t).to_f64() / f64::from(t).sqrt()))
            .collect(),
    }
}
