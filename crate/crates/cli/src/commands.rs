use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;

use regret_core::analysis::{
    constancy_report, diff_lower_bounds, diff_stat, ConstancySummary, DiffStatSeries,
};
use regret_core::forward::{regret_series_with, ForwardOptions, RegretSeries};
use regret_core::game::{check_k, format_family, parse_family, RankSubset, MAX_GAP};
use regret_core::numeric::{format_sig17, parse_threshold, DyadicValue, Value, ValueBackend};
use regret_core::optimal::{
    best_fixed_subset, value_adaptive_with_budget, BestFixed, DEFAULT_NODE_BUDGET,
};
use regret_core::report::{write_diff_csv, write_regret_csv};
use regret_core::verify::{self, CheckResult, Suite};

use crate::svg::line_chart;
use crate::{UsageError, VerificationFailed};

/// Commands with horizons up to this default to the exact backend.
const EXACT_DEFAULT_MAX_T: u32 = 30;

fn usage(msg: impl std::fmt::Display) -> anyhow::Error {
    UsageError(msg.to_string()).into()
}

fn parse_k(k: usize) -> Result<usize> {
    check_k(k).map_err(usage)?;
    Ok(k)
}

fn parse_subset(text: &str, k: usize) -> Result<RankSubset> {
    RankSubset::parse(text, k).map_err(usage)
}

fn parse_horizon(t: u32, flag: &str) -> Result<u32> {
    if t == 0 {
        return Err(usage(format!("{flag} must be at least 1")));
    }
    if t >= MAX_GAP {
        return Err(usage(format!("{flag} must be below {MAX_GAP}")));
    }
    Ok(t)
}

fn resolve_backend(text: Option<&str>, horizon: u32) -> Result<ValueBackend> {
    match text {
        Some(text) => text.parse().map_err(usage),
        None if horizon <= EXACT_DEFAULT_MAX_T => Ok(ValueBackend::Exact),
        None => Ok(ValueBackend::FLOAT),
    }
}

fn resolve_prune(text: Option<&str>, backend: ValueBackend) -> Result<DyadicValue> {
    match text {
        Some(text) => parse_threshold(text).map_err(usage),
        None if backend.is_exact() => Ok(DyadicValue::zero()),
        None => Ok(DyadicValue::pow2_neg(50)),
    }
}

fn parse_scale(text: &str) -> Result<DyadicValue> {
    let scale = parse_threshold(text).map_err(usage)?;
    if scale.is_zero() {
        return Err(usage("--scale must be positive"));
    }
    Ok(scale)
}

/// Opens the output before any computation so a bad path fails fast.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run_series<V: Value>(
    k: usize,
    subset: &RankSubset,
    t_max: u32,
    opts: &ForwardOptions,
    verbose: bool,
) -> Result<RegretSeries<V>> {
    let started = Instant::now();
    let series = regret_series_with::<V>(k, subset, t_max, opts, |day, frontier| {
        if verbose && (day % 25 == 0 || day == t_max) {
            eprintln!(
                "[{subset}] day {day}: {frontier} states, {:.1}s",
                started.elapsed().as_secs_f64()
            );
        }
    })?;
    Ok(series)
}

fn print_value<V: Value>(out: &mut dyn Write, key: &str, v: &V) -> io::Result<()> {
    writeln!(out, "{key}={}", v.to_decimal())?;
    if let Some(exact) = v.to_exact() {
        writeln!(out, "{key}_exact={exact}")?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    k: usize,
    /// Ranks receiving gain in one branch, e.g. 1,3
    #[arg(long)]
    subset: String,
    #[arg(long = "t-max")]
    t_max: u32,
    /// exact, float or float-fast (default: exact for T <= 30, else float)
    #[arg(long)]
    backend: Option<String>,
    /// Prune threshold, e.g. 2^-50 (default: 0 exact, 2^-50 float)
    #[arg(long)]
    prune: Option<String>,
    /// CSV output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report frontier sizes on stderr
    #[arg(long)]
    verbose: bool,
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let k = parse_k(args.k)?;
    let subset = parse_subset(&args.subset, k)?;
    let t_max = parse_horizon(args.t_max, "--t-max")?;
    let backend = resolve_backend(args.backend.as_deref(), t_max)?;
    let opts = ForwardOptions::for_backend(backend, resolve_prune(args.prune.as_deref(), backend)?);
    let mut out = open_output(args.out.as_deref())?;
    if backend.is_exact() {
        let series = run_series::<DyadicValue>(k, &subset, t_max, &opts, args.verbose)?;
        write_regret_csv(&series, &mut out)?;
    } else {
        let series = run_series::<f64>(k, &subset, t_max, &opts, args.verbose)?;
        write_regret_csv(&series, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long = "t-max")]
    t_max: u32,
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    prune: Option<String>,
    #[arg(long, default_value = "1000")]
    scale: String,
    #[arg(long = "window-lo", default_value_t = 100)]
    window_lo: u32,
    #[arg(long = "window-hi", default_value_t = 350)]
    window_hi: u32,
    /// CSV output path (default: stdout, with the summary on stderr)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

/// Everything `compare` and `figure1` report.
struct Comparison<V> {
    a: RegretSeries<V>,
    b: RegretSeries<V>,
    diff: DiffStatSeries<V>,
    lower: Vec<(u32, f64)>,
    summary: Option<ConstancySummary>,
}

fn run_comparison<V: Value>(
    k: usize,
    (a, b): (&RankSubset, &RankSubset),
    t_max: u32,
    opts: &ForwardOptions,
    scale: &DyadicValue,
    window: (u32, u32),
    verbose: bool,
) -> Result<Comparison<V>> {
    let sa = run_series::<V>(k, a, t_max, opts, verbose)?;
    let sb = run_series::<V>(k, b, t_max, opts, verbose)?;
    let scale = V::from_dyadic(scale);
    let diff = diff_stat(&sa, &sb, &scale)?;
    let lower = diff_lower_bounds(&sa, &sb, &scale)?;
    let hi = window.1.min(t_max);
    let summary = constancy_report(&diff, window.0, hi).ok();
    Ok(Comparison {
        a: sa,
        b: sb,
        diff,
        lower,
        summary,
    })
}

fn write_summary<V: Value>(out: &mut dyn Write, c: &Comparison<V>) -> io::Result<()> {
    writeln!(out, "a={}", c.a.label())?;
    writeln!(out, "b={}", c.b.label())?;
    writeln!(out, "backend={}", c.a.backend)?;
    writeln!(out, "prune={}", c.a.prune.to_exact_string())?;
    writeln!(out, "scale={}", c.diff.scale.to_decimal())?;
    match &c.summary {
        Some(s) => write!(out, "{s}")?,
        None => writeln!(out, "window=empty")?,
    }
    let from5 = || c.diff.entries.iter().filter(|e| e.t >= 5);
    if c.a.t_max() >= 5 {
        writeln!(out, "positive_from_t5={}", from5().all(|e| e.value() > 0.0))?;
        writeln!(
            out,
            "certified_positive_from_t5={}",
            c.lower
                .iter()
                .filter(|(t, _)| *t >= 5)
                .all(|(_, lo)| *lo > 0.0)
        )?;
    }
    let t = c.a.t_max();
    let bound = c.a.error_bound(t).to_f64().max(c.b.error_bound(t).to_f64());
    writeln!(out, "max_error_bound={}", format_sig17(bound))?;
    writeln!(
        out,
        "peak_frontier={}",
        c.a.peak_frontier.max(c.b.peak_frontier)
    )
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let k = parse_k(args.k)?;
    let a = parse_subset(&args.a, k)?;
    let b = parse_subset(&args.b, k)?;
    let t_max = parse_horizon(args.t_max, "--t-max")?;
    let backend = resolve_backend(args.backend.as_deref(), t_max)?;
    let opts = ForwardOptions::for_backend(backend, resolve_prune(args.prune.as_deref(), backend)?);
    let scale = parse_scale(&args.scale)?;
    let window = (args.window_lo, args.window_hi);
    let to_file = args.out.is_some();
    let mut out = open_output(args.out.as_deref())?;

    // The summary goes to stderr when the CSV occupies stdout.
    let mut summary: Box<dyn Write> = if to_file {
        Box::new(io::stdout())
    } else {
        Box::new(io::stderr())
    };
    if backend.is_exact() {
        let c =
            run_comparison::<DyadicValue>(k, (&a, &b), t_max, &opts, &scale, window, args.verbose)?;
        write_diff_csv(&c.diff, &mut out)?;
        out.flush()?;
        write_summary(&mut summary, &c)?;
    } else {
        let c = run_comparison::<f64>(k, (&a, &b), t_max, &opts, &scale, window, args.verbose)?;
        write_diff_csv(&c.diff, &mut out)?;
        out.flush()?;
        write_summary(&mut summary, &c)?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct OptimalArgs {
    #[arg(long)]
    k: usize,
    /// Colon-separated subsets (1,3,6:1,4,6) or `all`
    #[arg(long)]
    family: String,
    #[arg(long)]
    t: u32,
    /// exact (default) or float
    #[arg(long, default_value = "exact")]
    backend: String,
    /// Write the maximizing subsets of every memoized node here
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long = "max-nodes", default_value_t = DEFAULT_NODE_BUDGET)]
    max_nodes: usize,
}

fn report_optimal<V: Value>(
    args: &OptimalArgs,
    k: usize,
    family: &[RankSubset],
    trace: Option<Box<dyn Write>>,
) -> Result<()> {
    let v = value_adaptive_with_budget::<V>(k, family, args.t, args.max_nodes)?;
    let mut out = io::stdout().lock();
    writeln!(out, "k={k}")?;
    writeln!(out, "family={}", format_family(v.family()))?;
    writeln!(out, "T={}", args.t)?;
    print_value(&mut out, "expected_max", &v.expected_max)?;
    print_value(&mut out, "regret", &v.regret)?;
    writeln!(out, "nodes={}", v.node_count())?;
    if let Some(mut trace) = trace {
        for line in v.solver.trace_lines() {
            writeln!(trace, "{line}")?;
        }
        trace.flush()?;
    }
    Ok(())
}

pub fn optimal(args: OptimalArgs) -> Result<()> {
    let k = parse_k(args.k)?;
    let family = parse_family(&args.family, k).map_err(usage)?;
    let backend: ValueBackend = args.backend.parse().map_err(usage)?;
    if args.t >= MAX_GAP {
        return Err(usage(format!("--t must be below {MAX_GAP}")));
    }
    let trace = match &args.trace {
        Some(path) => Some(open_output(Some(path))?),
        None => None,
    };
    if backend.is_exact() {
        report_optimal::<DyadicValue>(&args, k, &family, trace)
    } else {
        report_optimal::<f64>(&args, k, &family, trace)
    }
}

#[derive(Args, Debug)]
pub struct BestFixedArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: u32,
    #[arg(long, default_value = "exact")]
    backend: String,
    /// Also list every subset's value
    #[arg(long)]
    scan: bool,
}

fn report_best<V: Value>(best: &BestFixed<V>, scan: bool) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "k={}", best.k)?;
    writeln!(out, "T={}", best.horizon)?;
    writeln!(out, "subset={}", best.subset)?;
    writeln!(out, "maximizers={}", format_family(&best.maximizers))?;
    print_value(&mut out, "expected_max", &best.expected_max)?;
    print_value(&mut out, "regret", &best.regret)?;
    if scan {
        for (subset, regret) in &best.scan {
            writeln!(out, "scan [{subset}] regret={}", regret.to_decimal())?;
        }
    }
    Ok(())
}

pub fn best_fixed(args: BestFixedArgs) -> Result<()> {
    let k = parse_k(args.k)?;
    let t = parse_horizon(args.t, "--t")?;
    let backend: ValueBackend = args.backend.parse().map_err(usage)?;
    if backend.is_exact() {
        report_best(&best_fixed_subset::<DyadicValue>(k, t)?, args.scan)
    } else {
        report_best(&best_fixed_subset::<f64>(k, t)?, args.scan)
    }
}

#[derive(Args, Debug)]
pub struct Figure1Args {
    #[arg(long = "t-max")]
    t_max: u32,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value = "1,3")]
    a: String,
    #[arg(long, default_value = "1,3,5")]
    b: String,
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    prune: Option<String>,
    #[arg(long, default_value = "1000")]
    scale: String,
    #[arg(long = "window-lo", default_value_t = 100)]
    window_lo: u32,
    #[arg(long = "window-hi", default_value_t = 350)]
    window_hi: u32,
    #[arg(long, default_value = "figure1.csv")]
    csv: PathBuf,
    #[arg(long, default_value = "figure1.svg")]
    svg: PathBuf,
    #[arg(long)]
    verbose: bool,
}

pub fn figure1(args: Figure1Args) -> Result<()> {
    let k = parse_k(args.k)?;
    let a = parse_subset(&args.a, k)?;
    let b = parse_subset(&args.b, k)?;
    let t_max = parse_horizon(args.t_max, "--t-max")?;
    let backend = resolve_backend(args.backend.as_deref(), t_max)?;
    let opts = ForwardOptions::for_backend(backend, resolve_prune(args.prune.as_deref(), backend)?);
    let scale = parse_scale(&args.scale)?;
    let window = (args.window_lo, args.window_hi);
    let mut csv = open_output(Some(&args.csv))?;
    let mut svg = open_output(Some(&args.svg))?;

    let title = format!(
        "{} x ((R[{a}]^2 - R[{b}]^2) / T), k = {k}",
        scale.to_decimal_string()
    );
    let mut stdout = io::stdout().lock();
    if backend.is_exact() {
        let c =
            run_comparison::<DyadicValue>(k, (&a, &b), t_max, &opts, &scale, window, args.verbose)?;
        write_diff_csv(&c.diff, &mut csv)?;
        svg.write_all(line_chart(&title, "T", "D(T)", &c.diff.values()).as_bytes())?;
        write_summary(&mut stdout, &c)?;
    } else {
        let c = run_comparison::<f64>(k, (&a, &b), t_max, &opts, &scale, window, args.verbose)?;
        write_diff_csv(&c.diff, &mut csv)?;
        svg.write_all(line_chart(&title, "T", "D(T)", &c.diff.values()).as_bytes())?;
        write_summary(&mut stdout, &c)?;
    }
    csv.flush()?;
    svg.flush()?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// paper-values, oracle, k2-closed-form, optimality or all
    #[arg(long, default_value = "all")]
    suite: String,
    /// Expert count for the oracle suite (default: 2 through 5)
    #[arg(long)]
    k: Option<usize>,
    /// Largest horizon (oracle default 7, k2-closed-form default 60)
    #[arg(long = "t-max")]
    t_max: Option<u32>,
}

pub fn verify(args: VerifyArgs) -> Result<()> {
    let suite: Suite = args.suite.parse().map_err(usage)?;
    let ks: Vec<usize> = match args.k {
        Some(k) => vec![parse_k(k)?],
        None => (2..=5).collect(),
    };
    if let Some(t) = args.t_max {
        parse_horizon(t, "--t-max")?;
    }
    let oracle_t = args.t_max.unwrap_or(7);
    if oracle_t > regret_core::oracle::MAX_BRUTE_HORIZON
        && matches!(suite, Suite::Oracle | Suite::All)
    {
        return Err(usage(format!(
            "--t-max {oracle_t} too large for the oracle suite (max {})",
            regret_core::oracle::MAX_BRUTE_HORIZON
        )));
    }

    let mut checks: Vec<CheckResult> = Vec::new();
    if matches!(suite, Suite::ReportedValues | Suite::All) {
        checks.extend(verify::reported_values()?);
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        for &k in &ks {
            checks.extend(verify::oracle_equivalence(k, oracle_t)?);
        }
    }
    if matches!(suite, Suite::K2ClosedForm | Suite::All) {
        checks.extend(verify::k2_closed_form_checks(args.t_max.unwrap_or(60))?);
    }
    if matches!(suite, Suite::Optimality | Suite::All) {
        checks.extend(verify::default_optimality()?);
    }

    let mut out = io::stdout().lock();
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(
        out,
        "{}/{} checks passed",
        checks.len() - failed,
        checks.len()
    )?;
    out.flush()?;
    if failed > 0 {
        return Err(VerificationFailed(failed).into());
    }
    Ok(())
}
