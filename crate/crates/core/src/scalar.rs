//! Scalar modes: exact rationals and guarded binary floats.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Three-valued sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_i64(v: i64) -> Sign {
        match v.cmp(&0) {
            std::cmp::Ordering::Less => Sign::Negative,
            std::cmp::Ordering::Equal => Sign::Zero,
            std::cmp::Ordering::Greater => Sign::Positive,
        }
    }

    pub fn of_bigint(v: &BigInt) -> Sign {
        match v.sign() {
            BigSign::Minus => Sign::Negative,
            BigSign::NoSign => Sign::Zero,
            BigSign::Plus => Sign::Positive,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::of_i64(self.as_i64() * rhs.as_i64())
    }
}

/// Arithmetic needed by the map in either scalar mode.
///
/// `sign` takes the float guard; exact scalars ignore it.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn sign(&self, epsilon: f64) -> Sign;
    /// Combined numerator and denominator bit length (0 for floats).
    fn bits(&self) -> u64;
    /// Canonical text form: "p/q" for rationals, shortest round-trip for floats.
    fn render(&self) -> String;
    /// JSON form: rationals as "p/q" strings, floats as numbers.
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Option<Self>;
    fn abs_value(&self) -> Self {
        if self.sign(0.0) == Sign::Negative {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn sign(&self, _epsilon: f64) -> Sign {
        Sign::of_bigint(self.numer()) * Sign::of_bigint(self.denom())
    }
    fn bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
    fn render(&self) -> String {
        format_rational(self)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s).ok(),
            serde_json::Value::Number(n) => f64_to_rational(n.as_f64()?),
            _ => None,
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sign(&self, epsilon: f64) -> Sign {
        if self.abs() < epsilon || *self == 0.0 {
            Sign::Zero
        } else if *self > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
    fn bits(&self) -> u64 {
        0
    }
    fn render(&self) -> String {
        format!("{self:?}")
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map_or_else(|| serde_json::Value::String(self.render()), serde_json::Value::Number)
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        match v {
            serde_json::Value::Number(n) => n.as_f64(),
            serde_json::Value::String(s) => {
                s.parse().ok().or_else(|| parse_rational(s).ok().map(|q| rational_to_f64(&q)))
            }
            _ => None,
        }
    }
}

/// Nearest-ish f64 of a rational, robust to huge numerators and denominators.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(q) {
        if v.is_finite() {
            return v;
        }
    }
    ratio_to_f64(q.numer(), q.denom())
}

/// f64 approximation of n/d without forming n/d exactly.
pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    if d.is_zero() {
        return f64::NAN;
    }
    if n.is_zero() {
        return 0.0;
    }
    let shift_n = n.bits().saturating_sub(64) as i64;
    let shift_d = d.bits().saturating_sub(64) as i64;
    let nn = (n >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
    let dd = (d >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
    let e = shift_n - shift_d;
    let e = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    (nn / dd) * 2f64.powi(e.clamp(-1100, 1100))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// "p/q" in lowest terms with q > 0; integers keep the "/1".
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Exact rational value of a finite f64.
pub fn f64_to_rational(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a number: {reason}")]
pub struct ParseNumberError {
    pub input: String,
    pub reason: &'static str,
}

/// Parses "p/q", integers, decimals and exponent forms into an exact rational.
/// Accepts U+2212 as a minus sign.
pub fn parse_rational(input: &str) -> Result<Rational, ParseNumberError> {
    let err = |reason| ParseNumberError { input: input.to_string(), reason };
    let s: String = input.trim().replace('\u{2212}', "-");
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_decimal(p.trim()).ok_or_else(|| err("bad numerator"))?;
        let q = parse_decimal(q.trim()).ok_or_else(|| err("bad denominator"))?;
        if q.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(p / q);
    }
    parse_decimal(&s).ok_or_else(|| err("not a rational or decimal"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{whole}{frac}");
    let mut n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    if neg {
        n = -n;
    }
    let scale = exp - frac.len() as i32;
    if scale.unsigned_abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10);
    let p = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 { Rational::from_integer(n * p) } else { Rational::new(n, p) })
}

/// The simplest rational (smallest denominator) in the closed interval [lo, hi].
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "empty interval");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return <Rational as Zero>::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl < hi.floor() || hi.is_integer() {
        return fl + <Rational as One>::one();
    }
    // Same integer part: recurse on reciprocals of fractional parts.
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_between(&b.recip(), &a.recip());
    fl + inner.recip()
}

/// Midpoint helper used by bisection.
pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Greatest common divisor of three integers (used to tidy homogeneous triples).
pub fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_and_unicode_minus() {
        assert_eq!(parse_rational("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("\u{2212}1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1e3").unwrap(), int(1000));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
    }

    #[test]
    fn simplest_rational_search() {
        assert_eq!(simplest_between(&rat(99, 100), &rat(101, 100)), int(1));
        assert_eq!(simplest_between(&rat(1, 3), &rat(1, 2)), rat(1, 2));
        assert_eq!(simplest_between(&rat(31, 100), &rat(34, 100)), rat(1, 3));
        assert_eq!(simplest_between(&rat(-34, 100), &rat(-31, 100)), rat(-1, 3));
    }

    #[test]
    fn huge_ratio_to_float() {
        let big = BigInt::from(3) << 5000usize;
        let d = BigInt::from(2) << 5000usize;
        assert!((ratio_to_f64(&big, &d) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn float_guard() {
        assert_eq!(1e-13f64.sign(1e-12), Sign::Zero);
        assert_eq!((-1e-3f64).sign(1e-12), Sign::Negative);
    }
}
