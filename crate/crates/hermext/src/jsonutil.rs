//! Small helpers for exact JSON encoding of big integers and rationals.
//!
//! Integers are emitted as JSON numbers with full precision (serde_json's
//! `arbitrary_precision` feature), rationals as canonical strings `"p/q"`
//! with `q > 0` and the fraction reduced, or just `"p"` when `q = 1`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{Number, Value};

use crate::{Error, Result};

pub fn bigint_to_json(v: &BigInt) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("integer literal is a valid JSON number"))
}

pub fn bigint_from_json(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::Json(format!("{what}: expected an integer, got {n}"))),
        other => Err(Error::Json(format!("{what}: expected an integer, got {other}"))),
    }
}

pub fn u64_from_json(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| Error::Json(format!("{what}: expected a non-negative integer")))
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_from_string(s: &str, what: &str) -> Result<BigRational> {
    let parse = |t: &str| BigInt::from_str(t).map_err(|_| Error::Json(format!("{what}: bad integer `{t}`")));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse(s)?)),
        Some((p, q)) => {
            let den = parse(q)?;
            if den == BigInt::from(0) {
                return Err(Error::Json(format!("{what}: zero denominator")));
            }
            Ok(BigRational::new(parse(p)?, den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigint_json_preserves_large_values() {
        let v = BigInt::from_str("-123456789012345678901234567890123456789").unwrap();
        let j = bigint_to_json(&v);
        assert_eq!(serde_json::to_string(&j).unwrap(), "-123456789012345678901234567890123456789");
        assert_eq!(bigint_from_json(&j, "x").unwrap(), v);
    }

    #[test]
    fn rational_strings() {
        let q = BigRational::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(rational_to_string(&q), "-3/2");
        assert_eq!(rational_from_string("-3/2", "x").unwrap(), q);
        assert_eq!(rational_to_string(&BigRational::from_integer(BigInt::from(5))), "5");
        assert!(rational_from_string("1/0", "x").is_err());
    }
}
