// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Exact rational helpers. Every threshold a verifier compares against goes
//! through here so that no invariant check depends on float rounding.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{input, Result};

pub type Q = BigRational;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn qi(value: i64) -> Q {
    Q::from_integer(BigInt::from(value))
}

pub fn qu(value: usize) -> Q {
    Q::from_integer(BigInt::from(value))
}

/// Parses `"a/b"` or `"a"`. Decimal and exponent forms are rejected.
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    if t.is_empty() {
        return input("empty rational");
    }
    if t.contains(['.', 'e', 'E']) {
        return input(format!("`{t}` is not an exact rational; write it as a fraction like 1/4"));
    }
    let parsed = match t.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad(t))?;
            let b: BigInt = b.trim().parse().map_err(|_| bad(t))?;
            if b.is_zero() {
                return input(format!("`{t}` has a zero denominator"));
            }
            Q::new(a, b)
        }
        None => Q::from_integer(t.parse().map_err(|_| bad(t))?),
    };
    Ok(parsed)
}

fn bad(t: &str) -> crate::error::Error {
    crate::error::Error::Input(format!("`{t}` is not a rational number"))
}

pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Floor of a nonnegative rational, saturating at `u64::MAX`; negatives map to 0.
pub fn floor_u64(x: &Q) -> u64 {
    if x.is_negative() {
        return 0;
    }
    x.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Ceiling of a nonnegative rational, saturating at `u64::MAX`; negatives map to 0.
pub fn ceil_u64(x: &Q) -> u64 {
    if x.is_negative() {
        return 0;
    }
    x.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Smallest integer strictly greater than `x` (so `d > x` iff `d >= above(x)`).
pub fn strictly_above(x: &Q) -> u64 {
    if x.is_negative() {
        return 0;
    }
    floor_u64(x).saturating_add(1)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn pow(x: &Q, e: u32) -> Q {
    num::traits::Pow::pow(x, e)
}

/// `x · y^e` for nonnegative `x` and `y`. Agrees with `x * pow(y, e)` but
/// reduces with `gcd(a, B mod a)` so that a huge power costs linear work
/// instead of a binary gcd over its full length.
pub fn scaled_pow(x: &Q, y: &Q, e: u32) -> Q {
    let (a, b) = (x.numer(), x.denom());
    let (c, d) = (y.numer().pow(e), y.denom().pow(e));
    let g1 = small_gcd(a, &d);
    let g2 = small_gcd(b, &c);
    Q::new_raw((a / &g1) * (c / &g2), (b / &g2) * (d / &g1))
}

fn small_gcd(a: &BigInt, big: &BigInt) -> BigInt {
    use num::Integer;
    if a.is_zero() {
        return big.clone();
    }
    a.gcd(&(big % a))
}

/// Serde adapter: rationals travel as strings such as `"1/4"`; plain JSON
/// integers are accepted on input.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).map_err(serde::de::Error::custom)
    }

    pub(crate) fn from_value(v: &serde_json::Value) -> Result<Q> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) if n.is_i64() => Ok(qi(n.as_i64().unwrap_or(0))),
            serde_json::Value::Number(n) if n.is_u64() => {
                Ok(Q::from_integer(BigInt::from(n.as_u64().unwrap_or(0))))
            }
            other => input(format!("expected an exact rational, got {other}")),
        }
    }
}

/// Same as [`serde_q`] for `Option<Q>`.
pub mod serde_opt_q {
    use super::*;
    use serde::Serialize;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        x.as_ref().map(format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        let v = Option::<serde_json::Value>::deserialize(d)?;
        match v {
            None | Some(serde_json::Value::Null) => Ok(None),
            Some(v) => serde_q::from_value(&v).map(Some).map_err(serde::de::Error::custom),
        }
    }
}

/// Vectors of rationals as JSON string arrays.
pub mod serde_vec_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        xs.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let vs = Vec::<serde_json::Value>::deserialize(d)?;
        vs.iter().map(|v| serde_q::from_value(v).map_err(serde::de::Error::custom)).collect()
    }
}

/// Exact Bernoulli trial with success probability `p` (clamped to [0, 1]).
pub fn bernoulli<R: rand::Rng + ?Sized>(rng: &mut R, p: &Q) -> bool {
    use num::ToPrimitive;
    if *p <= Q::zero() {
        return false;
    }
    if *p >= Q::one() {
        return true;
    }
    match (p.numer().to_u64(), p.denom().to_u64()) {
        (Some(a), Some(b)) => rng.gen_range(0..b) < a,
        _ => rng.gen_bool(to_f64(p)),
    }
}

/// A nonnegative rational with machine-sized parts for hot comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct SmallFrac {
    pub num: u128,
    pub den: u128,
}

impl SmallFrac {
    pub fn new(x: &Q) -> Result<Self> {
        match (x.numer().to_u64(), x.denom().to_u64()) {
            (Some(a), Some(b)) => Ok(SmallFrac { num: a as u128, den: b as u128 }),
            _ => input(format!("rational {} is negative or too large for this use", format_rational(x))),
        }
    }

    /// `a / b > self`.
    pub fn lt_ratio(&self, a: u64, b: u64) -> bool {
        (a as u128) * self.den > self.num * (b as u128)
    }
}

pub(crate) fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

pub(crate) fn one() -> Q {
    Q::one()
}

pub(crate) fn zero() -> Q {
    Q::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/4").unwrap(), q(1, 4));
        assert_eq!(parse_rational(" 6/8 ").unwrap(), q(3, 4));
        assert_eq!(parse_rational("7").unwrap(), qi(7));
        assert_eq!(parse_rational("-2/3").unwrap(), q(-2, 3));
    }

    #[test]
    fn rejects_floats_and_garbage() {
        assert!(parse_rational("0.25").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn integer_thresholds() {
        assert_eq!(floor_u64(&q(7, 2)), 3);
        assert_eq!(ceil_u64(&q(7, 2)), 4);
        assert_eq!(ceil_u64(&qi(4)), 4);
        assert_eq!(strictly_above(&qi(4)), 5);
        assert_eq!(strictly_above(&q(9, 2)), 5);
        assert_eq!(strictly_above(&q(-1, 2)), 0);
    }

    #[test]
    fn scaled_pow_matches_plain_arithmetic() {
        for (x, y, e) in [(q(3, 1), q(4, 1), 5), (q(6, 35), q(14, 9), 3), (q(0, 1), q(5, 2), 2), (q(7, 3), q(1, 1), 0)] {
            assert_eq!(scaled_pow(&x, &y, e), &x * pow(&y, e));
        }
    }

    #[test]
    fn formatting_round_trips() {
        for x in [q(1, 4), qi(3), q(-5, 7)] {
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }
}
