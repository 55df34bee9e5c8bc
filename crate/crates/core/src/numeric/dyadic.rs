use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational `numerator / 2^exponent`.
///
/// Always canonical: the numerator is odd, or the value is zero with
/// exponent 0. Structural equality is therefore value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicValue {
    numerator: BigInt,
    exponent: u32,
}

impl DyadicValue {
    pub fn normalize(numerator: BigInt, exponent: u32) -> Self {
        if numerator.is_zero() {
            return Self::zero();
        }
        let twos = numerator.trailing_zeros().unwrap_or(0);
        let shift = twos.min(u64::from(exponent)) as u32;
        Self {
            numerator: numerator >> shift,
            exponent: exponent - shift,
        }
    }

    pub fn zero() -> Self {
        Self {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::normalize(BigInt::from(n), 0)
    }

    /// `2^-power`.
    pub fn pow2_neg(power: u32) -> Self {
        Self {
            numerator: BigInt::one(),
            exponent: power,
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    fn scaled_to(&self, exponent: u32) -> BigInt {
        debug_assert!(exponent >= self.exponent);
        &self.numerator << (exponent - self.exponent)
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = self.exponent.max(other.exponent);
        Self::normalize(self.scaled_to(e) + other.scaled_to(e), e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let e = self.exponent.max(other.exponent);
        Self::normalize(self.scaled_to(e) - other.scaled_to(e), e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::normalize(
            &self.numerator * &other.numerator,
            self.exponent + other.exponent,
        )
    }

    pub fn neg(&self) -> Self {
        Self {
            numerator: -&self.numerator,
            exponent: self.exponent,
        }
    }

    pub fn half(&self) -> Self {
        Self::normalize(self.numerator.clone(), self.exponent + 1)
    }

    /// `(a + b) / 2`, exact.
    pub fn average2(a: &Self, b: &Self) -> Self {
        let e = a.exponent.max(b.exponent);
        Self::normalize(a.scaled_to(e) + b.scaled_to(e), e + 1)
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.numerator.bits();
        // keep the integer conversion finite before scaling
        let shift = bits.saturating_sub(1000);
        let mantissa = (&self.numerator >> shift).to_f64().unwrap_or(f64::NAN);
        ldexp(mantissa, shift as i64 - i64::from(self.exponent))
    }

    /// Exact terminating decimal expansion.
    pub fn to_decimal_string(&self) -> String {
        let magnitude = self.numerator.abs() * BigInt::from(5u32).pow(self.exponent);
        let digits = magnitude.to_string();
        let e = self.exponent as usize;
        let sign = if self.is_negative() { "-" } else { "" };
        if e == 0 {
            return format!("{sign}{digits}");
        }
        let padded = if digits.len() <= e {
            format!("{}{}", "0".repeat(e + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - e);
        format!("{sign}{int_part}.{frac_part}")
    }

    /// Interchange form `n/2^e`.
    pub fn to_exact_string(&self) -> String {
        format!("{}/2^{}", self.numerator, self.exponent)
    }

    /// Parses a terminating decimal; fails if the value is not dyadic.
    pub fn parse_decimal(text: &str) -> Result<Self> {
        let text = text.trim();
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty())
            || !all_digits(int_part)
            || !all_digits(frac_part)
        {
            return Err(Error::Parse(format!("not a decimal number: {text:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        let scaled = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|e| Error::Parse(e.to_string()))?;
        let places = frac_part.len() as u32;
        let (quotient, remainder) = scaled.div_rem(&BigInt::from(5u32).pow(places));
        if !remainder.is_zero() {
            return Err(Error::Parse(format!("{text:?} is not a dyadic rational")));
        }
        let value = Self::normalize(quotient, places);
        Ok(if negative { value.neg() } else { value })
    }

    /// Parses `n/2^e`, `2^-e`, or a plain integer.
    pub fn parse_exact(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Parse(format!("not an exact dyadic: {text:?}"));
        if let Some(power) = text.strip_prefix("2^-") {
            let power = power.parse::<u32>().map_err(|_| bad())?;
            return Ok(Self::pow2_neg(power));
        }
        let (num, exp) = match text.split_once("/2^") {
            Some((n, e)) => (n, e.parse::<u32>().map_err(|_| bad())?),
            None => (text, 0),
        };
        let num = BigInt::from_str(num).map_err(|_| bad())?;
        Ok(Self::normalize(num, exp))
    }
}

pub(crate) fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    let up = 2f64.powi(1000);
    let down = 2f64.powi(-1000);
    while exp > 1000 {
        x *= up;
        exp -= 1000;
    }
    while exp < -1000 {
        x *= down;
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

impl Ord for DyadicValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numerator.sign(), other.numerator.sign()) {
            (a, b) if a != b => return sign_rank(a).cmp(&sign_rank(b)),
            _ => {}
        }
        let e = self.exponent.max(other.exponent);
        self.scaled_to(e).cmp(&other.scaled_to(e))
    }
}

fn sign_rank(sign: Sign) -> i8 {
    match sign {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for DyadicValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl FromStr for DyadicValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains('^') {
            Self::parse_exact(s)
        } else {
            Self::parse_decimal(s)
        }
    }
}

/// Exact comparison of two dyadics.
pub fn compare(a: &DyadicValue, b: &DyadicValue) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(n: i64, e: u32) -> DyadicValue {
        DyadicValue::normalize(BigInt::from(n), e)
    }

    #[test]
    fn normalize_examples() {
        let v = d(6, 3);
        assert_eq!((v.numerator().clone(), v.exponent()), (BigInt::from(3), 2));
        let z = d(0, 7);
        assert_eq!((z.numerator().clone(), z.exponent()), (BigInt::from(0), 0));
        let p = d(2341, 8);
        assert_eq!(
            (p.numerator().clone(), p.exponent()),
            (BigInt::from(2341), 8)
        );
        assert_eq!(p.to_f64(), 9.14453125);
    }

    #[test]
    fn average2_examples() {
        assert_eq!(DyadicValue::average2(&d(1, 1), &d(1, 1)), d(1, 1));
        assert_eq!(DyadicValue::average2(&d(1, 0), &d(0, 0)), d(1, 1));
        assert_eq!(DyadicValue::average2(&d(3, 2), &d(1, 1)), d(5, 3));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&d(1, 1), &d(1, 1)), Ordering::Equal);
        assert_eq!(compare(&d(2341, 8), &d(37451, 12)), Ordering::Greater);
        assert_eq!(
            compare(&d(0, 0), &DyadicValue::pow2_neg(60)),
            Ordering::Less
        );
        assert_eq!(compare(&d(-1, 3), &d(0, 0)), Ordering::Less);
        assert_eq!(compare(&d(-3, 1), &d(-1, 0)), Ordering::Less);
    }

    #[test]
    fn decimal_examples() {
        assert_eq!(d(2341, 8).to_decimal_string(), "9.14453125");
        assert_eq!(d(37451, 12).to_decimal_string(), "9.143310546875");
        assert_eq!(DyadicValue::zero().to_decimal_string(), "0");
        assert_eq!(d(1, 3).to_decimal_string(), "0.125");
        assert_eq!(d(-5, 1).to_decimal_string(), "-2.5");
        assert_eq!(d(-12, 0).to_decimal_string(), "-12");
    }

    #[test]
    fn exact_string_roundtrip() {
        assert_eq!(d(2341, 8).to_exact_string(), "2341/2^8");
        assert_eq!(DyadicValue::parse_exact("2341/2^8").unwrap(), d(2341, 8));
        assert_eq!(
            DyadicValue::parse_exact("2^-50").unwrap(),
            DyadicValue::pow2_neg(50)
        );
        assert_eq!(DyadicValue::parse_exact("12/2^3").unwrap(), d(3, 1));
        assert!(DyadicValue::parse_exact("1/3").is_err());
    }

    #[test]
    fn parse_decimal_rejects_non_dyadic() {
        assert!(DyadicValue::parse_decimal("0.1").is_err());
        assert!(DyadicValue::parse_decimal("abc").is_err());
        assert!(DyadicValue::parse_decimal(".").is_err());
        assert_eq!(DyadicValue::parse_decimal("0.75").unwrap(), d(3, 2));
        assert_eq!(DyadicValue::parse_decimal("-2.50").unwrap(), d(-5, 1));
    }

    #[test]
    fn to_f64_handles_wide_values() {
        let tiny = DyadicValue::pow2_neg(1100);
        assert_eq!(tiny.to_f64(), 0.0);
        let big = DyadicValue::normalize(BigInt::one() << 1500u32, 1490);
        assert_eq!(big.to_f64(), 1024.0);
        assert_eq!(DyadicValue::pow2_neg(1060).to_f64(), 2f64.powi(-1060));
    }

    fn arb_dyadic() -> impl Strategy<Value = DyadicValue> {
        (any::<i64>(), 0u32..80).prop_map(|(n, e)| d(n, e))
    }

    proptest! {
        #[test]
        fn canonical_and_rescale_invariant(n in any::<i64>(), e in 0u32..80, m in 0u32..40) {
            let v = d(n, e);
            prop_assert!(v.is_zero() && v.exponent() == 0 || v.numerator().is_odd() || v.exponent() == 0);
            let scaled = DyadicValue::normalize(BigInt::from(n) << m, e + m);
            prop_assert_eq!(scaled, v);
        }

        #[test]
        fn average2_symmetric_and_between(a in arb_dyadic(), b in arb_dyadic()) {
            let m = DyadicValue::average2(&a, &b);
            prop_assert_eq!(&m, &DyadicValue::average2(&b, &a));
            let (lo, hi) = if a <= b { (&a, &b) } else { (&b, &a) };
            prop_assert!(&m >= lo && &m <= hi);
            prop_assert_eq!(m.add(&m), a.add(&b));
        }

        #[test]
        fn decimal_roundtrip(a in arb_dyadic()) {
            let text = a.to_decimal_string();
            prop_assert_eq!(DyadicValue::parse_decimal(&text).unwrap(), a.clone());
            prop_assert_eq!(DyadicValue::parse_exact(&a.to_exact_string()).unwrap(), a);
        }

        #[test]
        fn compare_agrees_with_subtraction(a in arb_dyadic(), b in arb_dyadic()) {
            let diff = a.sub(&b);
            let expected = if diff.is_zero() { Ordering::Equal } else if diff.is_negative() { Ordering::Less } else { Ordering::Greater };
            prop_assert_eq!(compare(&a, &b), expected);
        }
    }
}
