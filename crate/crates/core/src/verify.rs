//! Named check suites run by `regret verify`.

use std::fmt;

use crate::error::{Error, Result};
use crate::forward::{regret_series_fixed, ForwardOptions};
use crate::game::{canonical_subset, comb_subset, parse_family, RankSubset};
use crate::numeric::DyadicValue;
use crate::optimal::{best_fixed_subset, value_adaptive};
use crate::oracle::{brute_regret_fixed, k2_closed_form, TieOrder};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub expected: String,
    pub got: String,
}

impl CheckResult {
    fn new(
        name: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
        pass: bool,
    ) -> Self {
        Self {
            name: name.into(),
            pass,
            expected: expected.into(),
            got: got.into(),
        }
    }

    fn equal(name: impl Into<String>, expected: &DyadicValue, got: &DyadicValue) -> Self {
        Self::new(name, expected.to_string(), got.to_string(), expected == got)
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} expected={}, got={}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.expected,
            self.got
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    ReportedValues,
    Oracle,
    K2ClosedForm,
    Optimality,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-values" => Ok(Suite::ReportedValues),
            "oracle" => Ok(Suite::Oracle),
            "k2-closed-form" => Ok(Suite::K2ClosedForm),
            "optimality" => Ok(Suite::Optimality),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite {other:?} (paper-values, oracle, k2-closed-form, optimality, all)"
            ))),
        }
    }
}

fn dec(text: &str) -> DyadicValue {
    DyadicValue::parse_decimal(text).expect("literal")
}

/// The exact values reported for k=5 and k=6.
pub fn reported_values() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let family = parse_family("1,3,6:1,4,6", 6)?;
    let adaptive = value_adaptive::<DyadicValue>(6, &family, 13)?;
    out.push(CheckResult::equal(
        "k6_t13_adaptive",
        &dec("9.14453125"),
        &adaptive.expected_max,
    ));

    let best = best_fixed_subset::<DyadicValue>(6, 13)?;
    out.push(CheckResult::equal(
        "k6_t13_best_fixed",
        &dec("9.143310546875"),
        &best.expected_max,
    ));
    let has_136 = best.maximizers.contains(&canonical_subset(&[1, 3, 6], 6)?);
    out.push(CheckResult::new(
        "k6_t13_best_fixed_includes_1_3_6",
        "1,3,6",
        crate::game::format_family(&best.maximizers),
        has_136,
    ));
    out.push(CheckResult::new(
        "k6_t13_adaptive_beats_fixed",
        format!("> {}", best.expected_max),
        adaptive.expected_max.to_string(),
        adaptive.expected_max > best.expected_max,
    ));

    let a = canonical_subset(&[1, 3], 5)?;
    let b = comb_subset(5)?;
    let ra = regret_series_fixed::<DyadicValue>(5, &a, 5, &ForwardOptions::exact())?;
    let rb = regret_series_fixed::<DyadicValue>(5, &b, 5, &ForwardOptions::exact())?;
    let diff = ra.regret(5).sub(rb.regret(5));
    out.push(CheckResult::new(
        "k5_t5_1_3_beats_comb",
        "> 0",
        diff.to_string(),
        diff > DyadicValue::zero(),
    ));
    Ok(out)
}

/// Forward engine against raw-gain enumeration for every canonical subset.
pub fn oracle_equivalence(k: usize, t_max: u32) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for subset in RankSubset::all(k)? {
        let series =
            regret_series_fixed::<DyadicValue>(k, &subset, t_max, &ForwardOptions::exact())?;
        for t in 1..=t_max {
            let brute = brute_regret_fixed(k, &subset, t, TieOrder::LowerIndexFirst)?;
            out.push(CheckResult::equal(
                format!("oracle_k{k}_[{subset}]_t{t}"),
                &brute,
                series.regret(t),
            ));
        }
    }
    Ok(out)
}

pub fn k2_closed_form_checks(t_max: u32) -> Result<Vec<CheckResult>> {
    let series =
        regret_series_fixed::<DyadicValue>(2, &comb_subset(2)?, t_max, &ForwardOptions::exact())?;
    (1..=t_max)
        .map(|t| {
            Ok(CheckResult::equal(
                format!("k2_closed_form_t{t}"),
                &k2_closed_form(t)?,
                series.regret(t),
            ))
        })
        .collect()
}

/// Adaptive optimum over all subsets against a fixed reference subset.
pub fn optimality_checks(k: usize, reference: &RankSubset, t_max: u32) -> Result<Vec<CheckResult>> {
    let all = RankSubset::all(k)?;
    let series = regret_series_fixed::<DyadicValue>(k, reference, t_max, &ForwardOptions::exact())?;
    (1..=t_max)
        .map(|t| {
            let best = value_adaptive::<DyadicValue>(k, &all, t)?;
            Ok(CheckResult::equal(
                format!("optimal_k{k}_all_equals_[{reference}]_t{t}"),
                series.regret(t),
                &best.regret,
            ))
        })
        .collect()
}

/// Default optimality ranges: comb for k = 2, 3, 4 and `[1,3]` for k = 5.
pub fn default_optimality() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    out.extend(optimality_checks(2, &comb_subset(2)?, 15)?);
    out.extend(optimality_checks(3, &comb_subset(3)?, 15)?);
    out.extend(optimality_checks(4, &comb_subset(4)?, 12)?);
    out.extend(optimality_checks(5, &canonical_subset(&[1, 3], 5)?, 10)?);
    Ok(out)
}
