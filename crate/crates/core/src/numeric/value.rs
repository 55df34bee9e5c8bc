use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::DyadicValue;

/// Selects the arithmetic used by the engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueBackend {
    /// Exact dyadic rationals; evaluation order never matters.
    Exact,
    /// IEEE binary64. With `deterministic_reduction` every sum is taken in
    /// sorted state-key order so results are bit-stable across runs and
    /// worker counts.
    Float { deterministic_reduction: bool },
}

impl ValueBackend {
    pub const FLOAT: ValueBackend = ValueBackend::Float {
        deterministic_reduction: true,
    };

    pub fn is_exact(self) -> bool {
        matches!(self, ValueBackend::Exact)
    }

    pub fn deterministic_reduction(self) -> bool {
        match self {
            ValueBackend::Exact => true,
            ValueBackend::Float {
                deterministic_reduction,
            } => deterministic_reduction,
        }
    }
}

impl fmt::Display for ValueBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueBackend::Exact => f.write_str("exact"),
            ValueBackend::Float {
                deterministic_reduction: true,
            } => f.write_str("float"),
            ValueBackend::Float {
                deterministic_reduction: false,
            } => f.write_str("float-fast"),
        }
    }
}

impl FromStr for ValueBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ValueBackend::Exact),
            "float" => Ok(ValueBackend::FLOAT),
            "float-fast" => Ok(ValueBackend::Float {
                deterministic_reduction: false,
            }),
            other => Err(Error::Parse(format!(
                "unknown backend {other:?} (expected exact, float or float-fast)"
            ))),
        }
    }
}

/// Arithmetic the engines need from a number type.
pub trait Value: Clone + fmt::Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_dyadic(d: &DyadicValue) -> Self;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn half(&self) -> Self;

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    fn mul_int(&self, n: u64) -> Self {
        self.mul(&Self::from_int(n as i64))
    }

    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// Exact decimal for exact values, 17 significant digits for floats.
    fn to_decimal(&self) -> String;

    /// `n/2^e` form, exact backend only.
    fn to_exact(&self) -> Option<String>;

    fn to_dyadic(&self) -> Option<DyadicValue>;
}

impl Value for DyadicValue {
    const EXACT: bool = true;

    fn zero() -> Self {
        DyadicValue::zero()
    }

    fn from_int(n: i64) -> Self {
        DyadicValue::from_int(n)
    }

    fn from_dyadic(d: &DyadicValue) -> Self {
        d.clone()
    }

    fn add(&self, other: &Self) -> Self {
        DyadicValue::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        DyadicValue::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        DyadicValue::mul(self, other)
    }

    fn half(&self) -> Self {
        DyadicValue::half(self)
    }

    fn is_zero(&self) -> bool {
        DyadicValue::is_zero(self)
    }

    fn to_f64(&self) -> f64 {
        DyadicValue::to_f64(self)
    }

    fn to_decimal(&self) -> String {
        self.to_decimal_string()
    }

    fn to_exact(&self) -> Option<String> {
        Some(self.to_exact_string())
    }

    fn to_dyadic(&self) -> Option<DyadicValue> {
        Some(self.clone())
    }
}

impl Value for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_dyadic(d: &DyadicValue) -> Self {
        d.to_f64()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn half(&self) -> Self {
        self * 0.5
    }

    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_decimal(&self) -> String {
        format_sig17(*self)
    }

    fn to_exact(&self) -> Option<String> {
        None
    }

    fn to_dyadic(&self) -> Option<DyadicValue> {
        None
    }
}

/// Positional decimal with 17 significant digits (enough to round-trip any
/// binary64), trailing zeros trimmed.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let mut out = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int_part, frac_part) = digits.split_at(point as usize);
        format!("{int_part}.{frac_part}")
    };
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    format!("{sign}{out}")
}

/// Parses a prune threshold: `0`, `2^-p`, `n/2^e`, or a decimal/scientific float.
/// Non-dyadic float thresholds are taken at their exact binary64 value.
pub fn parse_threshold(text: &str) -> Result<DyadicValue> {
    let text = text.trim();
    let parsed = if text.contains('^') {
        Some(DyadicValue::parse_exact(text)?)
    } else {
        DyadicValue::parse_decimal(text).ok()
    };
    if let Some(d) = parsed {
        if d.is_negative() {
            return Err(Error::Parse(format!("threshold must be >= 0: {text:?}")));
        }
        return Ok(d);
    }
    let x: f64 = text
        .parse()
        .map_err(|_| Error::Parse(format!("bad threshold {text:?}")))?;
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Parse(format!(
            "threshold must be finite and >= 0: {text:?}"
        )));
    }
    Ok(dyadic_from_f64(x))
}

/// Exact dyadic value of a finite binary64.
pub fn dyadic_from_f64(x: f64) -> DyadicValue {
    assert!(x.is_finite());
    if x == 0.0 {
        return DyadicValue::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    let n = num_bigint::BigInt::from(sign) * num_bigint::BigInt::from(mantissa);
    if exp >= 0 {
        DyadicValue::normalize(n << exp as u32, 0)
    } else {
        DyadicValue::normalize(n, (-exp) as u32)
    }
}
