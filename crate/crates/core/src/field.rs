//! Scalar fields the polynomial machinery is generic over.
//!
//! Everything in this crate is exact: the only implementors are rational
//! types. `BigRational` is the workhorse; `Rational64` is handy for quick
//! experiments but panics on overflow like any fixed-width ratio.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact field of characteristic zero.
pub trait Field:
    Clone
    + Eq
    + Hash
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(n: i64) -> Self;

    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::one() / self.clone()
    }

    /// Lossless view as a big rational.
    fn to_big(&self) -> BigRational;

    /// Inverse of [`Field::to_big`]; `None` when the value does not fit.
    fn from_big(q: &BigRational) -> Option<Self>;

    fn is_negative(&self) -> bool {
        Signed::is_negative(&self.to_big())
    }
}

impl Field for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_big(&self) -> BigRational {
        self.clone()
    }

    fn from_big(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
}

impl Field for Rational64 {
    fn from_i64(n: i64) -> Self {
        Rational64::from_integer(n)
    }

    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }

    fn from_big(q: &BigRational) -> Option<Self> {
        Some(Rational64::new(q.numer().to_i64()?, q.denom().to_i64()?))
    }
}

/// Least common multiple of the denominators of `values`.
pub(crate) fn common_denominator<'a, F: Field>(values: impl IntoIterator<Item = &'a F>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.to_big().denom()))
}

/// Gcd of the numerators after scaling by `den`; used to make vectors primitive.
pub(crate) fn content_after_scaling<'a, F: Field>(values: impl IntoIterator<Item = &'a F>, den: &BigInt) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |acc, v| {
        let scaled = v.to_big() * BigRational::from_integer(den.clone());
        acc.gcd(scaled.numer())
    })
}
