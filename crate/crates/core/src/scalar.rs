//! Scalar abstractions.
//!
//! Storage and exact integration only need ring arithmetic, so they are
//! generic over [`Scalar`], which admits `BigRational`. Solvers need roots
//! and transcendental functions and are generic over [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Ring-like scalar usable for storage and exact arithmetic.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute value.
    fn magnitude(&self) -> Self;

    /// Converts an `f64` literal (tolerances, sampling points).
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    /// Lossy conversion for reporting.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating-point scalar used by solvers.
pub trait Real: Scalar + Float + Sum + Display + Default {}

impl Scalar for f64 {
    fn magnitude(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for f32 {
    fn magnitude(&self) -> Self {
        f32::abs(*self)
    }
}

impl Real for f64 {}
impl Real for f32 {}

impl Scalar for BigRational {
    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }
}

impl Scalar for Ratio<i64> {
    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }
}

/// `2^exp` as a scalar.
pub fn pow2<T: Scalar>(exp: u32) -> T {
    if exp < 63 {
        return T::from_u64(1u64 << exp).expect("power of two");
    }
    let two = T::one() + T::one();
    (0..exp).fold(T::one(), |acc, _| acc * two.clone())
}

/// Signed power of two, `2^exp` for any integer exponent.
pub fn pow2_signed<T: Scalar>(exp: i32) -> T {
    if exp >= 0 {
        pow2(exp as u32)
    } else {
        T::one() / pow2(exp.unsigned_abs())
    }
}

/// Integer power by repeated multiplication, exact for rationals.
pub fn powi<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

/// Exact rational from `numer / denom`.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2::<f64>(10), 1024.0);
        assert_eq!(pow2_signed::<f64>(-3), 0.125);
        assert_eq!(pow2::<BigRational>(70), ratio(1 << 35, 1) * ratio(1 << 35, 1));
        assert_eq!(powi(&ratio(1, 2), 3), ratio(1, 8));
    }

    #[test]
    fn magnitude_is_abs() {
        assert_eq!((-2.5f64).magnitude(), 2.5);
        assert_eq!(ratio(-1, 3).magnitude(), ratio(1, 3));
    }
}
