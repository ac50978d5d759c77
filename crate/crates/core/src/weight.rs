//! Exact nonnegative rational weights.
//!
//! Every measure in this crate assigns a [`Weight`] to each point of a finite
//! set. Weights are arbitrary precision fractions kept in reduced form; the
//! textual form is `num/den`, with the denominator dropped when it is one.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative exact rational number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(BigRational);

impl Weight {
    pub fn zero() -> Self {
        Weight(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight(BigRational::one())
    }

    pub fn from_integer(n: u64) -> Self {
        Weight(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`. Panics if `den` is zero.
    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Weight(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Wraps a rational, rejecting negative values.
    pub fn from_rational(r: BigRational) -> Option<Self> {
        if r.is_negative() {
            None
        } else {
            Some(Weight(r))
        }
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// `self / other`, or `None` when `other` is zero.
    pub fn checked_div(&self, other: &Weight) -> Option<Weight> {
        if other.is_zero() {
            None
        } else {
            Some(Weight(&self.0 / &other.0))
        }
    }

    pub fn recip(&self) -> Option<Weight> {
        Weight::one().checked_div(self)
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::zero()
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, rhs: &Weight) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl Mul for Weight {
    type Output = Weight;
    fn mul(self, rhs: Weight) -> Weight {
        Weight(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn mul(self, rhs: &Weight) -> Weight {
        Weight(&self.0 * &rhs.0)
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::zero(), |acc, w| acc + w)
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        let mut acc = Weight::zero();
        for w in iter {
            acc += w;
        }
        acc
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightParseError(pub String);

impl fmt::Display for WeightParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for WeightParseError {}

fn parse_digits(s: &str, what: &str) -> Result<BigInt, WeightParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(WeightParseError(format!("invalid {what} `{s}`")));
    }
    s.parse::<BigInt>()
        .map_err(|e| WeightParseError(format!("invalid {what} `{s}`: {e}")))
}

impl FromStr for Weight {
    type Err = WeightParseError;

    /// Accepts `n` or `n/d` with decimal digits only. Signs, decimal points
    /// and zero denominators are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains('.') {
            return Err(WeightParseError(format!(
                "decimal literal `{s}` is not an exact weight"
            )));
        }
        if s.starts_with('-') {
            return Err(WeightParseError(format!("negative weight `{s}`")));
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (parse_digits(n, "numerator")?, parse_digits(d, "denominator")?),
            None => (parse_digits(s, "numerator")?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(WeightParseError(format!("zero denominator in `{s}`")));
        }
        Ok(Weight(BigRational::new(num, den)))
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
