//! Non-negative rationals used for hyperbolicity constants.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A non-negative rational, serialized as `"p/q"` (or `"p"` when integral).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<u64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Ratio::new(num, den))
    }

    pub fn integer(n: u64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn floor(&self) -> u64 {
        self.numer() / self.denom()
    }

    pub fn ceil(&self) -> u64 {
        self.numer().div_ceil(self.denom())
    }

    pub fn scale(&self, k: u64) -> Rational {
        Rational(self.0 * Ratio::from_integer(k))
    }

    pub fn add_int(&self, k: u64) -> Rational {
        Rational(self.0 + Ratio::from_integer(k))
    }

    /// `n <= self`, for an integer `n`.
    pub fn bounds(&self, n: u64) -> bool {
        Ratio::from_integer(n) <= self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Config(format!("invalid rational {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                let q: u64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Rational::new(p, q))
            }
            None => Ok(Rational::integer(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
