use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::scalar::{pow2, Scalar};

/// Largest supported exponent in `num / 2^exp`.
pub const MAX_EXP: u32 = 62;

/// A dyadic rational `num / 2^exp` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// Panics if `exp > MAX_EXP`.
    pub fn new(mut num: i64, mut exp: u32) -> Self {
        assert!(exp <= MAX_EXP, "dyadic exponent {exp} too large");
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        if num == 0 {
            exp = 0;
        }
        Self { num, exp }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn to_scalar<T: Scalar>(&self) -> T {
        T::from_i64(self.num).expect("integer") / pow2::<T>(self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }

    fn scaled(&self, exp: u32) -> i128 {
        (self.num as i128) << (exp - self.exp)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled(e).cmp(&other.scaled(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u64 << self.exp)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Format(format!("not a dyadic rational: {s:?}"));
        let (p, q) = match s.trim().split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let num: i64 = p.parse().map_err(|_| bad())?;
        let den: u64 = q.parse().map_err(|_| bad())?;
        if den == 0 || !den.is_power_of_two() || den.trailing_zeros() > MAX_EXP {
            return Err(bad());
        }
        Ok(Self::new(num, den.trailing_zeros()))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_order() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 5), Dyadic::ZERO);
        assert!(Dyadic::new(1, 3) < Dyadic::new(1, 2));
        assert!(Dyadic::new(3, 1) > Dyadic::ONE);
        assert_eq!(Dyadic::new(3, 3).to_f64(), 0.375);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!("6/16".parse::<Dyadic>().unwrap(), Dyadic::new(3, 3));
        assert_eq!("1".parse::<Dyadic>().unwrap(), Dyadic::ONE);
        assert_eq!(Dyadic::new(3, 3).to_string(), "3/8");
        assert_eq!(Dyadic::ONE.to_string(), "1/1");
        for bad in ["1/3", "x", "1/0", "0.5"] {
            assert!(bad.parse::<Dyadic>().is_err(), "{bad}");
        }
    }
}
