//! CSV readers and writers for the emitted series.

use std::io::{Read, Write};

use crate::analysis::{ConstantEstimate, DiffStatSeries};
use crate::error::{Error, Result};
use crate::forward::RegretSeries;
use crate::numeric::{format_sig17, DyadicValue, Value};

pub const REGRET_HEADER: [&str; 4] = ["T", "regret", "regret_exact", "error_bound"];
pub const DIFF_HEADER: [&str; 2] = ["T", "D"];
pub const SQRT_HEADER: [&str; 2] = ["T", "R_over_sqrtT"];

fn io_err(err: std::io::Error) -> Error {
    Error::Csv(err.to_string())
}

pub fn write_regret_csv<V: Value, W: Write>(series: &RegretSeries<V>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REGRET_HEADER)?;
    for t in 1..=series.t_max() {
        w.write_record([
            t.to_string(),
            series.regret(t).to_decimal(),
            series.regret(t).to_exact().unwrap_or_default(),
            series.error_bound(t).to_decimal(),
        ])?;
    }
    w.flush().map_err(io_err)
}

pub fn write_diff_csv<V: Value, W: Write>(d: &DiffStatSeries<V>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIFF_HEADER)?;
    for e in &d.entries {
        w.write_record([e.t.to_string(), e.display()])?;
    }
    w.flush().map_err(io_err)
}

pub fn write_sqrt_csv<W: Write>(est: &ConstantEstimate, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SQRT_HEADER)?;
    for (t, v) in &est.entries {
        w.write_record([t.to_string(), format_sig17(*v)])?;
    }
    w.flush().map_err(io_err)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretRow {
    pub t: u32,
    pub regret: f64,
    pub regret_exact: Option<DyadicValue>,
    pub error_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffRow {
    pub t: u32,
    pub d: f64,
    /// The cell as written: an exact `p/q` or a decimal.
    pub text: String,
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().ne(expected.iter().copied()) {
        return Err(Error::Csv(format!(
            "unexpected header {:?}, expected {:?}",
            found.iter().collect::<Vec<_>>(),
            expected
        )));
    }
    Ok(())
}

fn parse_f64(cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad number {cell:?}")))
}

fn parse_t(cell: &str) -> Result<u32> {
    cell.parse::<u32>()
        .map_err(|_| Error::Parse(format!("bad T {cell:?}")))
}

/// Reads a `p/q` fraction or a decimal as f64.
fn parse_ratio(cell: &str) -> Result<f64> {
    match cell.split_once('/') {
        Some((p, q)) => Ok(parse_f64(p)? / parse_f64(q)?),
        None => parse_f64(cell),
    }
}

pub fn read_regret_csv<R: Read>(input: R) -> Result<Vec<RegretRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &REGRET_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            let exact = rec.get(2).unwrap_or("");
            Ok(RegretRow {
                t: parse_t(&rec[0])?,
                regret: parse_f64(&rec[1])?,
                regret_exact: if exact.is_empty() {
                    None
                } else {
                    Some(DyadicValue::parse_exact(exact)?)
                },
                error_bound: parse_f64(&rec[3])?,
            })
        })
        .collect()
}

pub fn read_diff_csv<R: Read>(input: R) -> Result<Vec<DiffRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &DIFF_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(DiffRow {
                t: parse_t(&rec[0])?,
                d: parse_ratio(&rec[1])?,
                text: rec[1].to_string(),
            })
        })
        .collect()
}

pub fn read_sqrt_csv<R: Read>(input: R) -> Result<Vec<(u32, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &SQRT_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok((parse_t(&rec[0])?, parse_f64(&rec[1])?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{diff_stat, sqrt_normalized};
    use crate::forward::{regret_series_fixed, ForwardOptions};
    use crate::game::{canonical_subset, comb_subset};

    #[test]
    fn exact_regret_csv_rows() {
        let s = comb_subset(2).unwrap();
        let series =
            regret_series_fixed::<DyadicValue>(2, &s, 3, &ForwardOptions::exact()).unwrap();
        let mut buf = Vec::new();
        write_regret_csv(&series, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text.lines().next(),
            Some("T,regret,regret_exact,error_bound")
        );
        assert_eq!(text.lines().last(), Some("3,0.75,3/2^2,0"));
        let rows = read_regret_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(
            rows[2].regret_exact,
            Some(DyadicValue::parse_exact("3/2^2").unwrap())
        );
    }

    #[test]
    fn float_regret_csv_roundtrip() {
        let s = canonical_subset(&[1, 3], 5).unwrap();
        let series = regret_series_fixed::<f64>(
            5,
            &s,
            30,
            &ForwardOptions::pruned(DyadicValue::pow2_neg(20)),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_regret_csv(&series, &mut buf).unwrap();
        let rows = read_regret_csv(buf.as_slice()).unwrap();
        for (row, t) in rows.iter().zip(1..) {
            assert_eq!(row.t, t);
            assert_eq!(row.regret, *series.regret(t));
            assert_eq!(row.error_bound, *series.error_bound(t));
            assert!(row.regret_exact.is_none());
        }
    }

    #[test]
    fn diff_and_sqrt_roundtrip() {
        let a = regret_series_fixed::<DyadicValue>(
            5,
            &canonical_subset(&[1, 3], 5).unwrap(),
            6,
            &ForwardOptions::exact(),
        )
        .unwrap();
        let b = regret_series_fixed::<DyadicValue>(
            5,
            &comb_subset(5).unwrap(),
            6,
            &ForwardOptions::exact(),
        )
        .unwrap();
        let d = diff_stat(&a, &b, &DyadicValue::from_int(1000)).unwrap();
        let mut buf = Vec::new();
        write_diff_csv(&d, &mut buf).unwrap();
        let rows = read_diff_csv(buf.as_slice()).unwrap();
        assert_eq!(rows[4].text, "2475/128");
        for (row, e) in rows.iter().zip(&d.entries) {
            assert!((row.d - e.value()).abs() <= 1e-14 * e.value().abs());
        }

        let est = sqrt_normalized(&a);
        let mut buf = Vec::new();
        write_sqrt_csv(&est, &mut buf).unwrap();
        assert_eq!(read_sqrt_csv(buf.as_slice()).unwrap(), est.entries);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_regret_csv("T,D\n1,0\n".as_bytes()).is_err());
        assert!(read_diff_csv("T,regret\n".as_bytes()).is_err());
    }
}
