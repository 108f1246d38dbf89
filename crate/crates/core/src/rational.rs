//! The Brauer group of the rationals, modelled by local invariants.
//!
//! A class is a finitely supported map from places of ℚ to ℚ/ℤ whose values sum
//! to zero; the invariant at the real place is `0` or `1/2`. Quaternion classes
//! come from Hilbert symbols computed with the classical closed formulas.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::arith::{self, is_prime, legendre, valuation};
use crate::error::{Error, Result};
use crate::SmallRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    pub fn finite(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::Argument(format!("{p} is not a prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Reduces `x` into `[0, 1)`.
fn frac(x: SmallRational) -> SmallRational {
    let fl = x.floor();
    x - fl
}

/// Element of Br(ℚ) ⊂ ⊕_v ℚ/ℤ. Zero invariants are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalBrauerClass {
    invariants: BTreeMap<Place, SmallRational>,
}

impl RationalBrauerClass {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a class from local invariants, checking the real-place and reciprocity constraints.
    pub fn from_invariants<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Place, SmallRational)>,
    {
        let mut invariants = BTreeMap::new();
        for (place, inv) in entries {
            if let Place::Finite(p) = place {
                if !is_prime(p) {
                    return Err(Error::Argument(format!("place {p} is not a prime")));
                }
            }
            let slot = invariants.entry(place).or_insert_with(SmallRational::zero);
            *slot = frac(*slot + inv);
        }
        invariants.retain(|_, v| !v.is_zero());
        let class = Self { invariants };
        class.validate()?;
        Ok(class)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.invariants.get(&Place::Real) {
            if *r != Ratio::new(1, 2) {
                return Err(Error::Argument(format!(
                    "real invariant must be 0 or 1/2, got {r}"
                )));
            }
        }
        let total = self
            .invariants
            .values()
            .fold(SmallRational::zero(), |acc, v| frac(acc + v));
        if !total.is_zero() {
            return Err(Error::Argument(format!(
                "local invariants sum to {total}, not 0 mod 1"
            )));
        }
        Ok(())
    }

    pub fn invariants(&self) -> &BTreeMap<Place, SmallRational> {
        &self.invariants
    }

    pub fn invariant(&self, place: Place) -> SmallRational {
        self.invariants.get(&place).copied().unwrap_or_else(Zero::zero)
    }

    pub fn is_identity(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Places with nonzero invariant.
    pub fn ramification(&self) -> Vec<Place> {
        self.invariants.keys().copied().collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut invariants = self.invariants.clone();
        for (place, v) in &other.invariants {
            let slot = invariants.entry(*place).or_insert_with(SmallRational::zero);
            *slot = frac(*slot + v);
        }
        invariants.retain(|_, v| !v.is_zero());
        Self { invariants }
    }

    pub fn neg(&self) -> Self {
        Self {
            invariants: self
                .invariants
                .iter()
                .map(|(p, v)| (*p, frac(-*v)))
                .collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut invariants: BTreeMap<_, _> = self
            .invariants
            .iter()
            .map(|(p, v)| (*p, frac(*v * SmallRational::from_integer(k))))
            .collect();
        invariants.retain(|_, v| !v.is_zero());
        Self { invariants }
    }

    /// Period: the lcm of the denominators of the local invariants.
    pub fn order(&self) -> u64 {
        self.invariants
            .values()
            .fold(1u64, |acc, v| arith::lcm(acc, *v.denom() as u64))
    }

    /// `p`-primary component, taken place by place in ℚ/ℤ.
    pub fn p_part(&self, p: u64) -> Self {
        let mut invariants = BTreeMap::new();
        for (place, v) in &self.invariants {
            let den = *v.denom() as u64;
            let (e, m) = arith::split_prime_power(den, p);
            if e == 0 {
                continue;
            }
            let pe = p.pow(e);
            let u = arith::mod_inv(m % pe, pe).expect("coprime by construction");
            let num = (*v.numer() as i128 * u as i128).rem_euclid(pe as i128) as i64;
            let r = Ratio::new(num, pe as i64);
            if !r.is_zero() {
                invariants.insert(*place, r);
            }
        }
        Self { invariants }
    }
}

impl fmt::Display for RationalBrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariants
            .iter()
            .map(|(p, v)| format!("{p}:{v}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Square-free integer representing the square class of `x`.
pub fn square_free_part(x: &SmallRational) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::Argument("zero has no square class".into()));
    }
    let n = (*x.numer() as i128) * (*x.denom() as i128);
    let sign = if n < 0 { -1 } else { 1 };
    let mut m = n.unsigned_abs();
    let mut out: u128 = 1;
    let mut d: u128 = 2;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    out *= m;
    let out = i64::try_from(out)
        .map_err(|_| Error::Argument(format!("square class of {x} out of range")))?;
    Ok(sign * out)
}

fn eps2(u: i64) -> u32 {
    // (u - 1)/2 mod 2 for odd u
    if u.rem_euclid(4) == 1 {
        0
    } else {
        1
    }
}

fn omega2(u: i64) -> u32 {
    // (u^2 - 1)/8 mod 2 for odd u
    match u.rem_euclid(8) {
        1 | 7 => 0,
        _ => 1,
    }
}

/// Hilbert symbol of two nonzero square-free integers.
pub(crate) fn hilbert_squarefree(a: i64, b: i64, v: Place) -> i8 {
    match v {
        Place::Real => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let alpha = valuation(a, 2);
            let beta = valuation(b, 2);
            let u = a >> alpha;
            let w = b >> beta;
            let e = eps2(u) * eps2(w) + alpha * omega2(w) + beta * omega2(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let alpha = valuation(a, p);
            let beta = valuation(b, p);
            let u = a / (p as i64).pow(alpha);
            let w = b / (p as i64).pow(beta);
            let mut s: i8 = if (alpha * beta) % 2 == 1 && (p - 1) / 2 % 2 == 1 {
                -1
            } else {
                1
            };
            if beta % 2 == 1 {
                s *= legendre(u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(w, p);
            }
            s
        }
    }
}

/// Local Hilbert symbol `(a, b)_v` of two nonzero rationals.
pub fn hilbert_symbol(a: &SmallRational, b: &SmallRational, v: Place) -> Result<i8> {
    if let Place::Finite(p) = v {
        Place::finite(p)?;
    }
    let a = square_free_part(a)?;
    let b = square_free_part(b)?;
    Ok(hilbert_squarefree(a, b, v))
}

/// Places at which `(a, b)_v` can be nontrivial: the real place, 2, and the odd primes dividing `ab`.
pub fn relevant_places(a: i64, b: i64) -> Vec<Place> {
    let mut primes = arith::prime_divisors(a.unsigned_abs());
    primes.extend(arith::prime_divisors(b.unsigned_abs()));
    primes.push(2);
    primes.sort_unstable();
    primes.dedup();
    std::iter::once(Place::Real)
        .chain(primes.into_iter().map(Place::Finite))
        .collect()
}

/// Class of the quaternion algebra `(a, b)`: invariant 1/2 exactly where the symbol is −1.
pub fn quaternion_class(a: &SmallRational, b: &SmallRational) -> Result<RationalBrauerClass> {
    let a = square_free_part(a)?;
    let b = square_free_part(b)?;
    Ok(quaternion_class_squarefree(a, b))
}

pub(crate) fn quaternion_class_squarefree(a: i64, b: i64) -> RationalBrauerClass {
    let half = Ratio::new(1, 2);
    let invariants = relevant_places(a, b)
        .into_iter()
        .filter(|&v| hilbert_squarefree(a, b, v) == -1)
        .map(|v| (v, half))
        .collect();
    let class = RationalBrauerClass { invariants };
    debug_assert!(class.validate().is_ok(), "product formula violated for ({a},{b})");
    class
}

/// Classes of the conics `(-1, p)` for primes `p ≡ 3 (mod 4)`.
pub fn distinct_conic_family(primes: &[u64]) -> Result<Vec<RationalBrauerClass>> {
    primes
        .iter()
        .map(|&p| {
            if !is_prime(p) || p % 4 != 3 {
                return Err(Error::Argument(format!("{p} is not a prime congruent to 3 mod 4")));
            }
            Ok(quaternion_class_squarefree(-1, p as i64))
        })
        .collect()
}

/// The first `count` primes congruent to 3 mod 4.
pub fn primes_3_mod_4(count: usize) -> Vec<u64> {
    (3u64..)
        .filter(|&p| p % 4 == 3 && is_prime(p))
        .take(count)
        .collect()
}

pub fn parse_rational(s: &str) -> Result<SmallRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Ratio::new(parse_int(n)?, d))
        }
        None => Ok(Ratio::from_integer(parse_int(s)?)),
    }
}

/// Exact string form `num/den` (or just `num` for integers).
pub fn format_rational(x: &SmallRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
