//! JSON encoding for unbounded integers.
//!
//! Values with magnitude at most 2^53 are emitted as JSON numbers; anything
//! larger becomes a decimal string so that consumers with double-precision
//! numbers never silently round.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde_json::Value;

const SAFE: u64 = 1 << 53;

pub fn bigint(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.unsigned_abs() <= SAFE => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn biguint(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) if v <= SAFE => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int(x: i128) -> Value {
    if x.unsigned_abs() <= SAFE as u128 {
        Value::from(x as i64)
    } else {
        Value::String(x.to_string())
    }
}

/// Rationals are always strings: `"p"` for integers, `"p/q"` otherwise.
pub fn rational(x: &BigRational) -> Value {
    if x.is_integer() {
        Value::String(x.numer().to_string())
    } else {
        let sign = if x.is_negative() { "-" } else { "" };
        Value::String(format!("{sign}{}/{}", x.numer().abs(), x.denom()))
    }
}

pub fn biguints(xs: &[BigUint]) -> Value {
    Value::Array(xs.iter().map(biguint).collect())
}

/// Rewrites every integer in `v` whose magnitude exceeds 2^53 as a string.
pub fn portable(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let big = match (n.as_i64(), n.as_u64()) {
                (Some(i), _) => i.unsigned_abs() > SAFE,
                (None, Some(u)) => u > SAFE,
                _ => false,
            };
            if big {
                Value::String(n.to_string())
            } else {
                Value::Number(n)
            }
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(portable).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, portable(v))).collect()),
        other => other,
    }
}
