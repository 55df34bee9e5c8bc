//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p regret-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use regret_core::analysis::{constancy_report, diff_lower_bounds, diff_stat};
use regret_core::forward::{regret_series_fixed, ForwardOptions, RegretSeries};
use regret_core::game::{
    apply_gains, canonical_subset, comb_subset, parse_family, step, GapState, RankSubset,
};
use regret_core::numeric::DyadicValue;
use regret_core::optimal::{best_fixed_subset, value_adaptive};
use regret_core::oracle::{
    brute_expected_max_adaptive, brute_regret_fixed, brute_value_adaptive, k2_closed_form, TieOrder,
};
use regret_core::verify::default_optimality;

fn report(id: &str, name: &str, pass: bool, detail: impl AsRef<str>) -> bool {
    println!(
        "criterion {id} {name}: {} {}",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    pass
}

fn dec(text: &str) -> DyadicValue {
    DyadicValue::parse_decimal(text).unwrap()
}

fn half_of(t: u32) -> DyadicValue {
    DyadicValue::normalize(BigInt::from(t), 1)
}

fn exact_series(k: usize, subset: &RankSubset, t_max: u32) -> RegretSeries<DyadicValue> {
    regret_series_fixed(k, subset, t_max, &ForwardOptions::exact()).unwrap()
}

#[test]
fn criterion_1_adaptive_k6_t13() {
    let family = parse_family("1,3,6:1,4,6", 6).unwrap();
    let started = Instant::now();
    let v = value_adaptive::<DyadicValue>(6, &family, 13).unwrap();
    let elapsed = started.elapsed();
    let brute = brute_expected_max_adaptive(6, &family, 13, TieOrder::LowerIndexFirst).unwrap();
    let pass = v.expected_max == dec("9.14453125")
        && v.regret == v.expected_max.sub(&half_of(13))
        && brute == v.expected_max;
    assert!(report(
        "1",
        "adaptive {1,3,6},{1,4,6} k=6 T=13",
        pass,
        format!(
            "expected_max={} ({}) brute={} regret={} nodes={} in {:.2?}",
            v.expected_max,
            v.expected_max.to_exact_string(),
            brute,
            v.regret,
            v.node_count(),
            elapsed
        )
    ));
}

#[test]
fn criterion_2_best_fixed_k6_t13() {
    let started = Instant::now();
    let best = best_fixed_subset::<DyadicValue>(6, 13).unwrap();
    let elapsed = started.elapsed();
    let s136 = canonical_subset(&[1, 3, 6], 6).unwrap();
    let brute_136 = brute_regret_fixed(6, &s136, 13, TieOrder::LowerIndexFirst)
        .unwrap()
        .add(&half_of(13));
    let pass = best.expected_max == dec("9.143310546875")
        && best.maximizers.contains(&s136)
        && brute_136 == best.expected_max
        && elapsed < Duration::from_secs(60);
    assert!(report(
        "2",
        "best fixed subset k=6 T=13",
        pass,
        format!(
            "expected_max={} maximizers={:?} brute[1,3,6]={} in {:.2?}",
            best.expected_max, best.maximizers, brute_136, elapsed
        )
    ));
}

#[test]
fn criterion_3_k5_t5_strict() {
    let a = canonical_subset(&[1, 3], 5).unwrap();
    let b = comb_subset(5).unwrap();
    let ra = exact_series(5, &a, 5).regret(5).clone();
    let rb = exact_series(5, &b, 5).regret(5).clone();
    let mut brute_ok = true;
    for ties in [TieOrder::LowerIndexFirst, TieOrder::HigherIndexFirst] {
        brute_ok &= brute_regret_fixed(5, &a, 5, ties).unwrap() == ra;
        brute_ok &= brute_regret_fixed(5, &b, 5, ties).unwrap() == rb;
    }
    let pass = ra > rb && brute_ok;
    assert!(report(
        "3",
        "k=5 T=5 [1,3] beats [1,3,5]",
        pass,
        format!(
            "R[1,3]={} R[1,3,5]={} difference={} brute_confirmed={brute_ok}",
            ra.to_exact_string(),
            rb.to_exact_string(),
            ra.sub(&rb).to_exact_string()
        )
    ));
}

struct Sweep {
    a: RegretSeries<f64>,
    b: RegretSeries<f64>,
    elapsed: Duration,
}

fn figure1_sweep(t_max: u32) -> Sweep {
    let opts = ForwardOptions::float_sweep();
    let started = Instant::now();
    let a = regret_series_fixed::<f64>(5, &canonical_subset(&[1, 3], 5).unwrap(), t_max, &opts)
        .unwrap();
    let b = regret_series_fixed::<f64>(5, &comb_subset(5).unwrap(), t_max, &opts).unwrap();
    Sweep {
        a,
        b,
        elapsed: started.elapsed(),
    }
}

#[test]
fn criterion_4a_figure1_positivity() {
    let s = figure1_sweep(350);
    let d = diff_stat(&s.a, &s.b, &1000.0).unwrap();
    let lower = diff_lower_bounds(&s.a, &s.b, &1000.0).unwrap();
    let not_positive: Vec<(u32, f64)> = d
        .values()
        .into_iter()
        .filter(|&(t, v)| t >= 5 && v <= 0.0)
        .collect();
    let not_certified: Vec<u32> = lower
        .iter()
        .filter(|&&(t, lo)| t >= 5 && lo <= 0.0)
        .map(|&(t, _)| t)
        .collect();
    // Exact values at the failing horizons, for the record.
    let exact_note: Vec<String> = not_positive
        .iter()
        .filter(|&&(t, _)| t <= 20)
        .map(|&(t, _)| {
            let ra = brute_regret_fixed(5, &s.a.subset, t, TieOrder::LowerIndexFirst).unwrap();
            let rb = brute_regret_fixed(5, &s.b.subset, t, TieOrder::LowerIndexFirst).unwrap();
            format!("T={t}: brute R[1,3]={ra} R[1,3,5]={rb}")
        })
        .collect();
    let min_later = lower
        .iter()
        .filter(|&&(t, _)| t >= 7)
        .map(|&(_, lo)| lo)
        .fold(f64::INFINITY, f64::min);
    let pass = not_positive.is_empty() && not_certified.is_empty();
    assert!(report(
        "4a",
        "D(T) > 0 interval-safe for 5 <= T <= 350",
        pass,
        format!(
            "non-positive D at {not_positive:?}; uncertified T {not_certified:?}; {}; \
             min certified lower bound over 7..=350 = {min_later}",
            exact_note.join("; ")
        )
    ));
}

#[test]
fn criterion_4b_figure1_constancy() {
    let s = figure1_sweep(350);
    let d = diff_stat(&s.a, &s.b, &1000.0).unwrap();
    let summary = constancy_report(&d, 100, 350).unwrap();
    let pass = summary.ratio() <= 1.5 && summary.min > 0.0;
    assert!(report(
        "4b",
        "max/min of D over [100,350] <= 1.5",
        pass,
        format!(
            "min={} max={} mean={} slope={} ratio={} peak_frontier={} error_bound(350)={:e}/{:e} in {:.2?}",
            summary.min,
            summary.max,
            summary.mean,
            summary.slope,
            summary.ratio(),
            s.a.peak_frontier.max(s.b.peak_frontier),
            s.a.error_bound(350),
            s.b.error_bound(350),
            s.elapsed
        )
    ));
}

#[test]
fn criterion_4c_figure1_gate_t150() {
    let s = figure1_sweep(150);
    let pass = s.elapsed < Duration::from_secs(60) && s.a.t_max() == 150;
    assert!(report(
        "4c",
        "T <= 150 sweep under 60 s",
        pass,
        format!("{:.2?}", s.elapsed)
    ));
}

#[test]
fn criterion_5_exact_optimality() {
    let checks = default_optimality().unwrap();
    let failed: Vec<_> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.clone())
        .collect();
    assert!(report(
        "5",
        "adaptive over all subsets equals comb (k=2,3,4) and [1,3] (k=5)",
        failed.is_empty(),
        format!("{} equalities, failed {failed:?}", checks.len())
    ));
}

#[test]
fn criterion_6_oracle_equivalence() {
    let mut mismatches = Vec::new();
    let mut count = 0;
    for k in 2..=5 {
        for subset in RankSubset::all(k).unwrap() {
            let series = exact_series(k, &subset, 7);
            for t in 1..=7 {
                count += 1;
                let brute = brute_regret_fixed(k, &subset, t, TieOrder::LowerIndexFirst).unwrap();
                if &brute != series.regret(t) {
                    mismatches.push(format!("k={k} [{subset}] T={t}"));
                }
            }
        }
    }
    let all3 = RankSubset::all(3).unwrap();
    let pair6 = parse_family("1,3,6:1,4,6", 6).unwrap();
    for (k, family, t_max) in [(3, &all3, 6), (6, &pair6, 10)] {
        for t in 1..=t_max {
            count += 1;
            let engine = value_adaptive::<DyadicValue>(k, family, t).unwrap().regret;
            let brute = brute_value_adaptive(k, family, t, TieOrder::HigherIndexFirst).unwrap();
            if engine != brute {
                mismatches.push(format!("adaptive k={k} T={t}"));
            }
        }
    }
    assert!(report(
        "6",
        "engines equal brute-force enumeration",
        mismatches.is_empty(),
        format!("{count} exact comparisons, mismatches {mismatches:?}")
    ));
}

#[test]
fn criterion_7_k2_closed_form() {
    let comb = comb_subset(2).unwrap();
    let exact = exact_series(2, &comb, 60);
    let exact_ok = (1..=60).all(|t| exact.regret(t) == &k2_closed_form(t).unwrap());
    let float = regret_series_fixed::<f64>(2, &comb, 350, &ForwardOptions::float_sweep()).unwrap();
    let max_err = (1..=350)
        .map(|t| (float.regret(t) - k2_closed_form(t).unwrap().to_f64()).abs())
        .fold(0.0, f64::max);
    let ratio = float.regret(350) / 350f64.sqrt();
    let target = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let rel = (ratio - target).abs() / target;
    let pass = exact_ok && max_err <= 1e-9 && rel <= 0.05;
    assert!(report(
        "7",
        "k=2 closed form",
        pass,
        format!(
            "exact T<=60 {exact_ok}; float max error {max_err:e}; \
             R(350)/sqrt(350)={ratio} vs {target} ({:.2}% off)",
            rel * 100.0
        )
    ));
}

/// Gains and leader increase for one branch, ranking tied experts by `ties`.
fn raw_branch(
    gains: &[u32],
    subset: &RankSubset,
    in_subset: bool,
    lower_first: bool,
) -> (GapState, u32) {
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&i, &j| {
        gains[j]
            .cmp(&gains[i])
            .then(if lower_first { i.cmp(&j) } else { j.cmp(&i) })
    });
    let mut next = gains.to_vec();
    for (rank0, &expert) in order.iter().enumerate() {
        if subset.contains(rank0 + 1) == in_subset {
            next[expert] += 1;
        }
    }
    let before = *gains.iter().max().unwrap();
    let after = *next.iter().max().unwrap();
    let gaps: Vec<u32> = {
        let mut g: Vec<u32> = next.iter().map(|&x| after - x).collect();
        g.sort_unstable();
        g
    };
    (GapState::new(&gaps).unwrap(), after - before)
}

#[test]
fn criterion_8_properties() {
    let mut failures = Vec::new();

    // monotone R(T) and complement invariance
    let a = canonical_subset(&[1, 3], 5).unwrap();
    let b = comb_subset(5).unwrap();
    for subset in [&a, &b] {
        let s = exact_series(5, subset, 40);
        if !(1..40).all(|t| s.regret(t + 1) >= s.regret(t)) {
            failures.push(format!("monotone [{subset}]"));
        }
    }
    for (members, k) in [
        (&[2usize, 4, 5][..], 5),
        (&[2, 4][..], 5),
        (&[2, 3, 5][..], 6),
        (&[2][..], 3),
    ] {
        let raw = canonical_subset(members, k).unwrap();
        let complement: Vec<usize> = (1..=k).filter(|r| !members.contains(r)).collect();
        let other = canonical_subset(&complement, k).unwrap();
        if exact_series(k, &raw, 20).values != exact_series(k, &other, 20).values {
            failures.push(format!("complement {members:?} k={k}"));
        }
    }

    // tie-permutation invariance of step on tied raw-gain states
    let mut tied = 0usize;
    let k = 6;
    let subsets = RankSubset::all(k).unwrap();
    for code in 0..5u32.pow(k as u32) {
        let gains: Vec<u32> = (0..k).map(|i| code / 5u32.pow(i as u32) % 5).collect();
        let mut sorted = gains.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == k {
            continue;
        }
        tied += 1;
        let top = *gains.iter().max().unwrap();
        let mut gaps: Vec<u32> = gains.iter().map(|&g| top - g).collect();
        gaps.sort_unstable();
        let state = GapState::new(&gaps).unwrap();
        let subset = &subsets[code as usize % subsets.len()];
        let (win, lose) = step(&state, subset).unwrap();
        for lower_first in [true, false] {
            let (sw, dw) = raw_branch(&gains, subset, true, lower_first);
            let (sl, dl) = raw_branch(&gains, subset, false, lower_first);
            if sw != win.next
                || sl != lose.next
                || dw != u32::from(win.leader_delta)
                || dl != u32::from(lose.leader_delta)
            {
                failures.push(format!("tie permutation {gains:?} [{subset}]"));
            }
        }
        // applying the same gain mask to the sorted state is also order-free
        let again = apply_gains(&state, subset.mask());
        if again.next != win.next {
            failures.push(format!("apply_gains {gains:?}"));
        }
    }
    if tied < 10_000 {
        failures.push(format!("only {tied} tied states"));
    }

    // full set is a no-op
    for k in 2..=6 {
        let full = canonical_subset(&(1..=k).collect::<Vec<_>>(), k).unwrap();
        let s = exact_series(k, &full, 30);
        if !s.values.iter().all(|v| v.is_zero()) {
            failures.push(format!("full set k={k}"));
        }
    }

    // pruning intervals contain the exact value
    let exact = exact_series(5, &a, 40);
    let mut widest = 0.0f64;
    for power in [30, 40] {
        let pruned = regret_series_fixed::<DyadicValue>(
            5,
            &a,
            40,
            &ForwardOptions::pruned(DyadicValue::pow2_neg(power)),
        )
        .unwrap();
        for t in 1..=40 {
            let lo = pruned.regret(t);
            let hi = lo.add(pruned.error_bound(t));
            if !(lo <= exact.regret(t) && exact.regret(t) <= &hi) {
                failures.push(format!("pruning 2^-{power} T={t}"));
            }
            widest = widest.max(pruned.error_bound(t).to_f64());
        }
    }

    assert!(report(
        "8",
        "monotone, complement, tie permutation, full set, pruning interval",
        failures.is_empty(),
        format!("{tied} tied states; widest pruning interval {widest:e}; failures {failures:?}")
    ));
}
