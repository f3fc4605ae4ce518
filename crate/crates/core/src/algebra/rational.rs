//! Exact rationals, tradeoff points and lower convex envelopes.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgebraError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_big(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// `num/den`, always with an explicit denominator.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a/b` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let bad = || AlgebraError::BadRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod big_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One achievable (memory, load) pair, both in units of files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    #[serde(with = "as_string")]
    pub memory: Rational,
    #[serde(with = "as_string")]
    pub load: Rational,
    #[serde(with = "big_as_string")]
    pub subpacketization: BigUint,
}

impl TradeoffPoint {
    pub fn new(memory: Rational, load: Rational, subpacketization: BigUint) -> Self {
        TradeoffPoint {
            memory,
            load,
            subpacketization,
        }
    }
}

impl fmt::Display for TradeoffPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) F={}",
            fmt_rational(&self.memory),
            fmt_rational(&self.load),
            self.subpacketization
        )
    }
}

/// z-component of (b - a) x (c - a); positive for a left turn.
fn cross(a: &TradeoffPoint, b: &TradeoffPoint, c: &TradeoffPoint) -> Rational {
    (&b.memory - &a.memory) * (&c.load - &a.load) - (&b.load - &a.load) * (&c.memory - &a.memory)
}

/// Vertices of the lower convex hull, in increasing memory.
///
/// Points sharing a memory value keep only the lowest load (smallest
/// subpacketization on ties). Interior collinear points are dropped.
pub fn lower_convex_envelope(points: &[TradeoffPoint]) -> Result<Vec<TradeoffPoint>, AlgebraError> {
    if points.is_empty() {
        return Err(AlgebraError::EmptyInput);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.memory
            .cmp(&b.memory)
            .then_with(|| a.load.cmp(&b.load))
            .then_with(|| a.subpacketization.cmp(&b.subpacketization))
    });
    sorted.dedup_by(|later, earlier| later.memory == earlier.memory);

    let mut hull: Vec<TradeoffPoint> = Vec::with_capacity(sorted.len());
    for p in sorted {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive() {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(hull)
}

/// Piecewise-linear value of an envelope at `memory`; `None` outside its range.
pub fn envelope_at(envelope: &[TradeoffPoint], memory: &Rational) -> Option<Rational> {
    let first = envelope.first()?;
    let last = envelope.last()?;
    if memory < &first.memory || memory > &last.memory {
        return None;
    }
    for w in envelope.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if memory >= &a.memory && memory <= &b.memory {
            let span = &b.memory - &a.memory;
            let frac = (memory - &a.memory) / span;
            return Some(&a.load + frac * (&b.load - &a.load));
        }
    }
    Some(first.load.clone())
}
