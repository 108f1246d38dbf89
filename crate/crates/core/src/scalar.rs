//! Exact scalar types.
//!
//! Everything in this crate is computed exactly. The power sums are generic over
//! an exact ring (integers, or rationals when negative exponents must be
//! allowed); the Clifford-algebra oracle is generic over an exact field.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::SmallRational;

/// Exact commutative ring with a canonical map from the integers.
pub trait Exact: Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> {
    fn from_int(n: i64) -> Self;

    /// `base^exp`; `None` when the value is not representable (negative exponent in a ring,
    /// overflow in a fixed-width type).
    fn power(base: i64, exp: i64) -> Option<Self>;

    /// Exact quotient; `None` when the division leaves a remainder.
    fn exact_div(&self, d: &Self) -> Option<Self>;
}

/// Exact field.
pub trait ExactField: Exact {
    /// Square root when it exists in the field.
    fn sqrt_exact(&self) -> Option<Self>;

    fn to_small(&self) -> Option<SmallRational>;
}

impl Exact for BigInt {
    fn from_int(n: i64) -> Self {
        BigInt::from(n)
    }

    fn power(base: i64, exp: i64) -> Option<Self> {
        let e = u32::try_from(exp).ok()?;
        Some(num_traits::pow(BigInt::from(base), e as usize))
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() || !(self % d).is_zero() {
            None
        } else {
            Some(self / d)
        }
    }
}

impl Exact for i128 {
    fn from_int(n: i64) -> Self {
        n as i128
    }

    fn power(base: i64, exp: i64) -> Option<Self> {
        let e = u32::try_from(exp).ok()?;
        (base as i128).checked_pow(e)
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if *d == 0 || self % d != 0 {
            None
        } else {
            Some(self / d)
        }
    }
}

fn ratio_power<T>(base: i64, exp: i64) -> Option<Ratio<T>>
where
    T: Clone + num_integer::Integer + From<i64> + num_traits::CheckedMul,
{
    if base == 0 && exp < 0 {
        return None;
    }
    let e = usize::try_from(exp.unsigned_abs()).ok()?;
    let p = num_traits::checked_pow(T::from(base), e)?;
    Some(if exp < 0 {
        Ratio::new(T::one(), p)
    } else {
        Ratio::from_integer(p)
    })
}

impl Exact for BigRational {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn power(base: i64, exp: i64) -> Option<Self> {
        if base == 0 && exp < 0 {
            return None;
        }
        let p = num_traits::pow(BigInt::from(base), usize::try_from(exp.unsigned_abs()).ok()?);
        Some(if exp < 0 {
            Ratio::new(BigInt::one(), p)
        } else {
            Ratio::from_integer(p)
        })
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            None
        } else {
            Some(self / d)
        }
    }
}

impl Exact for Ratio<i128> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n as i128)
    }

    fn power(base: i64, exp: i64) -> Option<Self> {
        ratio_power::<i128>(base, exp)
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            None
        } else {
            Some(self / d)
        }
    }
}

fn exact_isqrt_big(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl ExactField for BigRational {
    fn sqrt_exact(&self) -> Option<Self> {
        Some(Ratio::new(
            exact_isqrt_big(self.numer())?,
            exact_isqrt_big(self.denom())?,
        ))
    }

    fn to_small(&self) -> Option<SmallRational> {
        Some(Ratio::new(self.numer().to_i64()?, self.denom().to_i64()?))
    }
}

impl ExactField for Ratio<i128> {
    fn sqrt_exact(&self) -> Option<Self> {
        let s = |n: i128| {
            if n < 0 {
                return None;
            }
            let r = n.sqrt();
            (r * r == n).then_some(r)
        };
        Some(Ratio::new(s(*self.numer())?, s(*self.denom())?))
    }

    fn to_small(&self) -> Option<SmallRational> {
        Some(Ratio::new(
            i64::try_from(*self.numer()).ok()?,
            i64::try_from(*self.denom()).ok()?,
        ))
    }
}

/// Binomial coefficient with `binom(a, b) = 0` for `b < 0` or `b > a`.
pub fn binomial<T: Exact>(a: i64, b: i64) -> T {
    if b < 0 || a < 0 || b > a {
        return T::zero();
    }
    let b = b.min(a - b);
    let mut acc = T::one();
    for i in 0..b {
        acc = (acc * T::from_int(a - i))
            .exact_div(&T::from_int(i + 1))
            .expect("partial binomial products are integral");
    }
    acc
}
