//! Non-negative exact rationals extended with infinity.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A cost: a finite rational or `Infinite`. Infinity absorbs addition.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cost {
    Finite(Rational64),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(Rational64::new_raw(0, 1));
    pub const ONE: Cost = Cost::Finite(Rational64::new_raw(1, 1));

    pub fn int(v: i64) -> Cost {
        Cost::Finite(Rational64::from_integer(v))
    }

    pub fn ratio(n: i64, d: i64) -> Cost {
        Cost::Finite(Rational64::new(n, d))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Cost::Finite(r) if r.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            Cost::Finite(r) => Some(*r),
            Cost::Infinite => None,
        }
    }

    /// `self * k`, with `inf * 0 = 0`.
    pub fn times(self, k: u64) -> Cost {
        match self {
            _ if k == 0 => Cost::ZERO,
            Cost::Finite(r) => Cost::Finite(r * Rational64::from_integer(k as i64)),
            Cost::Infinite => Cost::Infinite,
        }
    }

    /// Product of two costs, with `0 * inf = 0`.
    pub fn mul(self, other: Cost) -> Cost {
        if self.is_zero() || other.is_zero() {
            return Cost::ZERO;
        }
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a * b),
            _ => Cost::Infinite,
        }
    }
}

impl Default for Cost {
    fn default() -> Self {
        Cost::ZERO
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl From<Rational64> for Cost {
    fn from(r: Rational64) -> Self {
        Cost::Finite(r)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Infinite => f.write_str("inf"),
            Cost::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Cost::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Cost {
    type Err = Error;

    /// Accepts `inf`, integers, `n/d` fractions and finite decimals.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::input(format!("not a non-negative rational: `{s}`"));
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Cost::Infinite);
        }
        let r = if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Rational64::new(n, d)
        } else if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
                return Err(bad());
            }
            let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let scale = 10i64.pow(frac.len() as u32);
            let part: i64 = frac.parse().map_err(|_| bad())?;
            Rational64::new(whole * scale + part, scale)
        } else {
            Rational64::from_integer(s.parse().map_err(|_| bad())?)
        };
        if r.is_negative() {
            return Err(bad());
        }
        Ok(Cost::Finite(r))
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Cost::int(v as i64)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
