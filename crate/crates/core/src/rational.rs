//! Exact rational scalars and their JSON encodings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}

/// Least common multiple of the denominators, as a positive integer.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn positive_part(x: Rational) -> Rational {
    if x.is_negative() {
        Rational::zero()
    } else {
        x
    }
}

fn bigint_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("expected an integer, got {n}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("expected an integer string, got {s:?}"))),
        other => Err(Error::Parse(format!("expected an integer, got {other}"))),
    }
}

/// Matrix-entry encoding: a plain integer, or a `[num, den]` pair.
pub fn to_json_entry(x: &Rational) -> Value {
    if is_integral(x) {
        bigint_to_json(x.numer())
    } else {
        json!([bigint_to_json(x.numer()), bigint_to_json(x.denom())])
    }
}

pub fn from_json_entry(v: &Value) -> Result<Rational> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let num = bigint_from_json(&pair[0])?;
            let den = bigint_from_json(&pair[1])?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rational::new(num, den))
        }
        Value::Object(_) => from_json_value(v),
        _ => Ok(Rational::from_integer(bigint_from_json(v)?)),
    }
}

/// Report encoding: `{"num": .., "den": ..}`.
pub fn to_json_value(x: &Rational) -> Value {
    json!({ "num": bigint_to_json(x.numer()), "den": bigint_to_json(x.denom()) })
}

pub fn from_json_value(v: &Value) -> Result<Rational> {
    match v {
        Value::Object(map) => {
            let num = map
                .get("num")
                .ok_or_else(|| Error::Parse("missing \"num\"".into()))?;
            let den = map
                .get("den")
                .ok_or_else(|| Error::Parse("missing \"den\"".into()))?;
            let den = bigint_from_json(den)?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rational::new(bigint_from_json(num)?, den))
        }
        _ => from_json_entry(v),
    }
}

pub fn format(x: &Rational) -> String {
    if is_integral(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
