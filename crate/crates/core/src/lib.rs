//! Exact computation of the Tits-algebra motivic measure and the rank measure of
//! twisted flag varieties (Severi–Brauer varieties, twisted Grassmannians,
//! quadrics, involution varieties and their products), together with
//! brute-force verifiers for the combinatorial statements that make the measure
//! useful.
//!
//! Brauer groups are modelled either as finite abelian groups `⊕ ℤ/nᵢ` or as
//! Br(ℚ) through local invariants. Direct sums of motives of central simple
//! algebras are represented by multisets of Brauer classes, compared prime by
//! prime.

pub mod arith;
pub mod brauer;
mod error;
pub mod forms;
pub mod json;
pub mod motives;
pub mod rational;
pub mod ring;
pub mod scalar;
pub mod sigma;
pub mod varieties;
pub mod verifier;

pub use brauer::{BrauerClass, BrauerGroupModel, CSAlgebra, Coords};
pub use error::{Error, Result};
pub use motives::MotiveSum;
pub use ring::RBElement;

/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;
/// Arbitrary-precision rational; the default field for the Clifford oracle.
pub type Rational = num_rational::BigRational;
/// Machine-word rational used for quadratic-form entries and local invariants.
pub type SmallRational = num_rational::Ratio<i64>;
/// 128-bit rational; a faster field for small Clifford computations.
pub type Rational128 = num_rational::Ratio<i128>;

/// Version string embedded in verification certificates.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
