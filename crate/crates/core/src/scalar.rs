//! Numeric modes.
//!
//! Everything downstream of an instance is generic over [`Scalar`], which is
//! implemented for `f64` (tolerant comparisons) and [`Rational`] (arbitrary
//! precision, no rounding anywhere).

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Relative tolerance used by float-mode comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Which numeric representation an instance uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumericMode {
    Float,
    Rational,
}

impl NumericMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NumericMode::Float => "f64",
            NumericMode::Rational => "rational",
        }
    }
}

impl FromStr for NumericMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" | "float" => Ok(NumericMode::Float),
            "rational" => Ok(NumericMode::Rational),
            other => Err(format!("unknown numeric_mode {other:?} (expected \"f64\" or \"rational\")")),
        }
    }
}

pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const MODE: NumericMode;

    fn from_u64(v: u64) -> Self;

    /// `num / den`; `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact for rationals (every finite float is a dyadic rational).
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn is_finite(&self) -> bool;

    /// `self <= other`, allowing relative slack in float mode.
    fn approx_le(&self, other: &Self) -> bool;

    fn approx_eq(&self, other: &Self) -> bool {
        self.approx_le(other) && other.approx_le(self)
    }

    /// Total order for values known to be finite.
    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).expect("non-finite value in comparison")
    }

    fn parse_json(v: &Value) -> Result<Self, String>;

    fn to_json(&self) -> Value;

    fn is_integer(&self) -> bool;

    fn to_u64(&self) -> Option<u64>;
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float;

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn approx_le(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs());
        *self - *other <= FLOAT_REL_TOL * scale
    }

    fn parse_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| format!("{n} is not representable as f64")),
            Value::String(s) => parse_float_text(s),
            other => Err(format!("expected a number, found {other}")),
        }
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn is_integer(&self) -> bool {
        self.fract() == 0.0
    }

    fn to_u64(&self) -> Option<u64> {
        (self.is_integer() && *self >= 0.0 && *self <= u64::MAX as f64).then_some(*self as u64)
    }
}

fn parse_float_text(s: &str) -> Result<f64, String> {
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if q == 0.0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(p / q)
    } else {
        s.trim().parse().map_err(|_| format!("{s:?} is not a number"))
    }
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::Rational;

    fn from_u64(v: u64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn approx_le(&self, other: &Self) -> bool {
        self <= other
    }

    fn parse_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::String(s) => parse_rational_text(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(BigInt::from(i)))
                } else {
                    Err(format!("rational entries must be \"p/q\" strings or integers, found {n}"))
                }
            }
            other => Err(format!("expected a \"p/q\" string, found {other}")),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn is_integer(&self) -> bool {
        Rational::is_integer(self)
    }

    fn to_u64(&self) -> Option<u64> {
        if Rational::is_integer(self) {
            self.numer().to_u64()
        } else {
            None
        }
    }
}

/// `"p/q"` (always with the slash) or a bare integer `"p"`.
pub fn parse_rational_text(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let q: BigInt = q.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if !q.is_positive() {
        return Err(format!("denominator must be >= 1 in {s:?}"));
    }
    Ok(Rational::new(p, q))
}

/// Canonical `"p/q"` form; integers print as `"p"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A value that may be `+∞` (ratios against a zero optimum, unbounded relaxation factors).
#[derive(Debug, Clone, PartialEq)]
pub enum Extended<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    /// `numer / denom` with `0/0 = 1` and `x/0 = ∞` for `x > 0`.
    pub fn ratio(numer: &S, denom: &S) -> Self {
        if denom.is_zero() {
            if numer.is_zero() {
                Extended::Finite(S::one())
            } else {
                Extended::Infinite
            }
        } else {
            Extended::Finite(numer.clone() / denom.clone())
        }
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => {
                if b > a {
                    Extended::Finite(b)
                } else {
                    Extended::Finite(a)
                }
            }
            _ => Extended::Infinite,
        }
    }

    pub fn approx_le(&self, bound: &S) -> bool {
        match self {
            Extended::Finite(v) => v.approx_le(bound),
            Extended::Infinite => false,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Extended::Finite(v) => v.to_json(),
            Extended::Infinite => Value::String("inf".into()),
        }
    }
}

impl<S: Scalar> fmt::Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// Neumaier-compensated sum, used wherever float aggregates must not depend on
/// how the terms were produced.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
