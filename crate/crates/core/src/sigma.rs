//! Power sums in `(n - 2)` that gate the product-of-quadrics cancellation argument.
//!
//! `Σ¹` counts the fewest copies of a fixed class on one side of a matching
//! of subset decompositions, `Σ²` the most on the other side; the matching is
//! forced whenever `Σ¹ > Σ²`. Arithmetic is exact; binomials with out-of-range
//! lower index vanish.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomial, Exact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SigmaKind {
    #[serde(rename = "1even")]
    OneEven,
    #[serde(rename = "1odd")]
    OneOdd,
    #[serde(rename = "2even")]
    TwoEven,
    #[serde(rename = "2odd")]
    TwoOdd,
}

impl SigmaKind {
    pub const ALL: [SigmaKind; 4] = [Self::OneEven, Self::OneOdd, Self::TwoEven, Self::TwoOdd];

    pub fn name(self) -> &'static str {
        match self {
            Self::OneEven => "1even",
            Self::OneOdd => "1odd",
            Self::TwoEven => "2even",
            Self::TwoOdd => "2odd",
        }
    }
}

impl fmt::Display for SigmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SigmaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown sigma kind {s:?} (1even, 1odd, 2even, 2odd)")))
    }
}

/// Parameters `(m, n, l)`: number of quadrics, form dimension, codimension of the span.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SigmaInput {
    pub m: i64,
    pub n: i64,
    pub l: i64,
}

impl SigmaInput {
    pub fn new(m: i64, n: i64, l: i64) -> Result<Self> {
        if m < 1 || n < 3 || l < 0 {
            return Err(Error::Argument(format!(
                "sigma needs m >= 1, n >= 3, l >= 0; got m={m}, n={n}, l={l}"
            )));
        }
        Ok(Self { m, n, l })
    }
}

/// The six partial sums the recurrences are stated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartialSum {
    OneOneEven,
    OneTwoEven,
    OneOneOdd,
    OneTwoOdd,
    TwoEven,
    TwoOdd,
}

impl PartialSum {
    pub fn name(self) -> &'static str {
        match self {
            Self::OneOneEven => "sigma11_even",
            Self::OneTwoEven => "sigma12_even",
            Self::OneOneOdd => "sigma11_odd",
            Self::OneTwoOdd => "sigma12_odd",
            Self::TwoEven => "sigma2_even",
            Self::TwoOdd => "sigma2_odd",
        }
    }
}

struct Term {
    binom_top: i64,
    binom_bottom: i64,
    two_exp: i64,
    base_exp: i64,
}

fn eval_terms<T: Exact>(input: SigmaInput, terms: impl Iterator<Item = Term>) -> Result<T> {
    let base = input.n - 2;
    let mut acc = T::zero();
    for t in terms {
        let b: T = binomial(t.binom_top, t.binom_bottom);
        if b == T::zero() {
            continue;
        }
        let unrepresentable = || {
            Error::Domain(format!(
                "term 2^{} * {}^{} is not representable in this scalar type (m={}, n={}, l={})",
                t.two_exp, base, t.base_exp, input.m, input.n, input.l
            ))
        };
        let two = T::power(2, t.two_exp).ok_or_else(unrepresentable)?;
        let pw = T::power(base, t.base_exp).ok_or_else(unrepresentable)?;
        acc = acc + b * two * pw;
    }
    Ok(acc)
}

/// One of the six partial sums, evaluated in `T`.
pub fn partial_sum<T: Exact>(which: PartialSum, input: SigmaInput) -> Result<T> {
    let SigmaInput { m, l, .. } = input;
    let rs = 0..=l / 2;
    match which {
        PartialSum::OneOneEven => eval_terms(
            input,
            rs.map(|r| Term {
                binom_top: l,
                binom_bottom: 2 * r,
                two_exp: 2 * r + 1,
                base_exp: m - (2 * r + 1),
            }),
        ),
        PartialSum::OneTwoEven => eval_terms(
            input,
            rs.map(|r| Term {
                binom_top: l,
                binom_bottom: 2 * r + 1,
                two_exp: m - l + 2 * r + 1,
                base_exp: l - (2 * r + 1),
            }),
        ),
        PartialSum::OneOneOdd => eval_terms(
            input,
            rs.map(|r| Term {
                binom_top: l,
                binom_bottom: 2 * r,
                two_exp: 0,
                base_exp: m - (2 * r + 1),
            }),
        ),
        PartialSum::OneTwoOdd => eval_terms(
            input,
            rs.map(|r| Term {
                binom_top: l,
                binom_bottom: 2 * r + 1,
                two_exp: 0,
                base_exp: l - (2 * r + 1),
            }),
        ),
        PartialSum::TwoEven => eval_terms(
            input,
            rs.flat_map(|r| {
                [
                    Term {
                        binom_top: l,
                        binom_bottom: 2 * r,
                        two_exp: 2 * r + 2,
                        base_exp: m - (2 * r + 2),
                    },
                    Term {
                        binom_top: l,
                        binom_bottom: 2 * r + 1,
                        two_exp: 2 * r + 1,
                        base_exp: m - (2 * r + 2),
                    },
                ]
            }),
        ),
        PartialSum::TwoOdd => eval_terms(
            input,
            rs.flat_map(|r| {
                [
                    Term {
                        binom_top: l,
                        binom_bottom: 2 * r,
                        two_exp: 0,
                        base_exp: m - (2 * r + 2),
                    },
                    Term {
                        binom_top: l,
                        binom_bottom: 2 * r + 1,
                        two_exp: 0,
                        base_exp: m - (2 * r + 2),
                    },
                ]
            }),
        ),
    }
}

/// `Σ¹_even`, `Σ¹_odd`, `Σ²_even` or `Σ²_odd` at `(m, n, l)`.
pub fn sigma<T: Exact>(kind: SigmaKind, input: SigmaInput) -> Result<T> {
    match kind {
        SigmaKind::OneEven => Ok(partial_sum::<T>(PartialSum::OneOneEven, input)?
            + partial_sum::<T>(PartialSum::OneTwoEven, input)?),
        SigmaKind::OneOdd => Ok(partial_sum::<T>(PartialSum::OneOneOdd, input)?
            + partial_sum::<T>(PartialSum::OneTwoOdd, input)?),
        SigmaKind::TwoEven => partial_sum(PartialSum::TwoEven, input),
        SigmaKind::TwoOdd => partial_sum(PartialSum::TwoOdd, input),
    }
}

/// Integer-valued convenience wrapper.
pub fn sigma_int(kind: SigmaKind, m: i64, n: i64, l: i64) -> Result<BigInt> {
    sigma(kind, SigmaInput::new(m, n, l)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub l: i64,
    #[serde(with = "crate::json::big_integer")]
    pub sigma1: BigInt,
    #[serde(with = "crate::json::big_integer")]
    pub sigma2: BigInt,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraCondition {
    pub m: i64,
    pub n: i64,
    pub parity: String,
    pub holds: bool,
    pub rows: Vec<SigmaRow>,
}

impl ExtraCondition {
    pub fn first_failure(&self) -> Option<&SigmaRow> {
        self.rows.iter().find(|r| !r.holds)
    }
}

/// `Σ¹(m,n,l) > Σ²(m,n,l)` for every `2 <= l <= m - 3`, with the parity of `n` selecting
/// the even or odd sums. Only meaningful for `m >= 6`.
pub fn extra_condition(m: i64, n: i64) -> Result<ExtraCondition> {
    if m < 6 {
        return Err(Error::Domain(format!(
            "condition only gates the m >= 6 case (got m = {m})"
        )));
    }
    if n < 3 {
        return Err(Error::Argument(format!("form dimension must be >= 3, got {n}")));
    }
    let (k1, k2, parity) = if n % 2 == 0 {
        (SigmaKind::OneEven, SigmaKind::TwoEven, "even")
    } else {
        (SigmaKind::OneOdd, SigmaKind::TwoOdd, "odd")
    };
    let mut rows = Vec::new();
    for l in 2..=m - 3 {
        let input = SigmaInput::new(m, n, l)?;
        let sigma1: BigInt = sigma(k1, input)?;
        let sigma2: BigInt = sigma(k2, input)?;
        let holds = sigma1 > sigma2;
        rows.push(SigmaRow {
            l,
            sigma1,
            sigma2,
            holds,
        });
    }
    Ok(ExtraCondition {
        m,
        n,
        parity: parity.to_string(),
        holds: rows.iter().all(|r| r.holds),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub m: i64,
    pub n: i64,
    pub l: i64,
    pub relations: Vec<RelationCheck>,
}

impl RecurrenceReport {
    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &RelationCheck> {
        self.relations.iter().filter(|r| !r.holds)
    }
}

/// How a partial sum at `m - 1` is related to its value at `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// `S(m - 1) = S(m) / (n - 2)`
    DivideByBase,
    /// `S(m - 1) = S(m)`
    Unchanged,
    /// `S(m - 1) = S(m) / 2`
    Halve,
}

/// The six step-down relations as they are customarily stated (`Σ^{1,2}_odd` unchanged,
/// every other sum divided by `n - 2`).
pub const STATED_RELATIONS: [(PartialSum, Step); 6] = [
    (PartialSum::OneOneEven, Step::DivideByBase),
    (PartialSum::OneOneOdd, Step::DivideByBase),
    (PartialSum::OneTwoEven, Step::DivideByBase),
    (PartialSum::OneTwoOdd, Step::Unchanged),
    (PartialSum::TwoEven, Step::DivideByBase),
    (PartialSum::TwoOdd, Step::DivideByBase),
];

/// The same relations with the one for `Σ^{1,2}_even` replaced by halving: its `m`-dependence
/// sits in the power of two, not in the power of `n - 2`.
pub const CORRECTED_RELATIONS: [(PartialSum, Step); 6] = [
    (PartialSum::OneOneEven, Step::DivideByBase),
    (PartialSum::OneOneOdd, Step::DivideByBase),
    (PartialSum::OneTwoEven, Step::Halve),
    (PartialSum::OneTwoOdd, Step::Unchanged),
    (PartialSum::TwoEven, Step::DivideByBase),
    (PartialSum::TwoOdd, Step::DivideByBase),
];

/// Checks a set of step-down relations at `(m, n, l)` as exact rational identities
/// (negative powers of `n - 2` are allowed so the whole grid `0 <= l <= m - 1` is covered).
pub fn check_recurrences(
    relations: &[(PartialSum, Step)],
    m: i64,
    n: i64,
    l: i64,
) -> Result<RecurrenceReport> {
    if m < 2 {
        return Err(Error::Argument(format!("recurrences need m >= 2, got {m}")));
    }
    let at_m = SigmaInput::new(m, n, l)?;
    let below = SigmaInput::new(m - 1, n, l)?;
    let base = BigRational::from_int(n - 2);
    let two = BigRational::from_int(2);
    let mut out = Vec::new();
    for &(which, step) in relations {
        let lhs: BigRational = partial_sum(which, below)?;
        let top: BigRational = partial_sum(which, at_m)?;
        let (rhs, shape) = match step {
            Step::DivideByBase => (top / &base, "S(m)/(n-2)"),
            Step::Unchanged => (top, "S(m)"),
            Step::Halve => (top / &two, "S(m)/2"),
        };
        out.push(RelationCheck {
            relation: format!("{}(m-1) = {}", which.name(), shape),
            holds: lhs == rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    }
    Ok(RecurrenceReport {
        m,
        n,
        l,
        relations: out,
    })
}

/// The stated step-down relations at `(m, n, l)`.
pub fn lemma_recurrences(m: i64, n: i64, l: i64) -> Result<RecurrenceReport> {
    check_recurrences(&STATED_RELATIONS, m, n, l)
}

pub fn lemma_recurrences_hold(m: i64, n: i64, l: i64) -> Result<bool> {
    Ok(lemma_recurrences(m, n, l)?.all_hold())
}

/// `Σ¹(m) > Σ²(m)  ⟹  Σ¹(m-1) > Σ²(m-1)` for the parity of `n`, evaluated over ℚ.
pub fn step_down_implication_holds(m: i64, n: i64, l: i64) -> Result<bool> {
    if m < 2 {
        return Err(Error::Argument(format!("implication needs m >= 2, got {m}")));
    }
    let (k1, k2) = if n % 2 == 0 {
        (SigmaKind::OneEven, SigmaKind::TwoEven)
    } else {
        (SigmaKind::OneOdd, SigmaKind::TwoOdd)
    };
    let at = |m| -> Result<bool> {
        let input = SigmaInput::new(m, n, l)?;
        let a: BigRational = sigma(k1, input)?;
        let b: BigRational = sigma(k2, input)?;
        Ok(a > b)
    };
    Ok(!at(m)? || at(m - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn direct(kind: SigmaKind, m: i64, n: i64, l: i64) -> i128 {
        // straight transcription of the displayed sums with i128 arithmetic
        let b = |a: i64, k: i64| -> i128 {
            if k < 0 || k > a {
                return 0;
            }
            let mut acc: i128 = 1;
            for i in 0..k {
                acc = acc * (a - i) as i128 / (i + 1) as i128;
            }
            acc
        };
        let p = |x: i64, e: i64| -> i128 {
            assert!(e >= 0);
            (x as i128).pow(e as u32)
        };
        let t = n - 2;
        let mut s = 0i128;
        for r in 0..=l / 2 {
            s += match kind {
                SigmaKind::OneEven => {
                    b(l, 2 * r) * p(2, 2 * r + 1) * p(t, m - 2 * r - 1)
                        + if b(l, 2 * r + 1) == 0 { 0 } else { b(l, 2 * r + 1) * p(2, m - l + 2 * r + 1) * p(t, l - 2 * r - 1) }
                }
                SigmaKind::OneOdd => {
                    b(l, 2 * r) * p(t, m - 2 * r - 1)
                        + if b(l, 2 * r + 1) == 0 { 0 } else { b(l, 2 * r + 1) * p(t, l - 2 * r - 1) }
                }
                SigmaKind::TwoEven => {
                    b(l, 2 * r) * p(2, 2 * r + 2) * p(t, m - 2 * r - 2)
                        + b(l, 2 * r + 1) * p(2, 2 * r + 1) * p(t, m - 2 * r - 2)
                }
                SigmaKind::TwoOdd => (b(l, 2 * r) + b(l, 2 * r + 1)) * p(t, m - 2 * r - 2),
            };
        }
        s
    }

    #[test]
    fn anchor_values() {
        assert_eq!(sigma_int(SigmaKind::OneEven, 5, 6, 2).unwrap(), BigInt::from(768));
        assert_eq!(sigma_int(SigmaKind::TwoEven, 5, 6, 2).unwrap(), BigInt::from(576));
    }

    #[test]
    fn l_zero_leaves_one_term() {
        for m in 1..8 {
            for n in 3..12 {
                let v = sigma_int(SigmaKind::OneEven, m, n, 0).unwrap();
                assert_eq!(v.to_i128().unwrap(), 2 * ((n - 2) as i128).pow((m - 1) as u32));
            }
        }
    }

    #[test]
    fn agrees_with_direct_summation() {
        for m in 2..9 {
            for n in 3..15 {
                for l in 0..m - 1 {
                    for kind in SigmaKind::ALL {
                        let v = sigma_int(kind, m, n, l).unwrap();
                        assert_eq!(v.to_i128().unwrap(), direct(kind, m, n, l), "{kind} {m} {n} {l}");
                    }
                }
            }
        }
    }

    #[test]
    fn negative_powers_need_rationals() {
        // m = 1 puts (n-2)^{-1} into the second sums
        assert!(sigma_int(SigmaKind::TwoOdd, 1, 6, 0).is_err());
        let v: BigRational = sigma(SigmaKind::TwoOdd, SigmaInput::new(1, 6, 0).unwrap()).unwrap();
        assert_eq!(v.to_string(), "1/4");
    }

    #[test]
    fn extra_condition_regimes() {
        assert!(matches!(extra_condition(5, 6), Err(Error::Domain(_))));
        let big = extra_condition(6, 50).unwrap();
        assert!(big.holds);
        assert_eq!(big.rows.iter().map(|r| r.l).collect::<Vec<_>>(), vec![2, 3]);
        let odd = extra_condition(6, 5).unwrap();
        assert_eq!(odd.parity, "odd");
        let rows: Vec<(i64, i64, i64)> = odd
            .rows
            .iter()
            .map(|r| (r.l, r.sigma1.to_i64().unwrap(), r.sigma2.to_i64().unwrap()))
            .collect();
        assert_eq!(rows, vec![(2, 276, 252), (3, 352, 360)]);
        assert!(!odd.holds);
        assert_eq!(odd.first_failure().unwrap().l, 3);
    }

    #[test]
    fn stated_relations_fail_only_for_sigma12_even() {
        let report = lemma_recurrences(5, 6, 2).unwrap();
        let failing: Vec<_> = report.failing().map(|r| r.relation.clone()).collect();
        assert_eq!(failing, vec!["sigma12_even(m-1) = S(m)/(n-2)".to_string()]);
        // l = 0 makes the sum empty, so every relation holds
        assert!(lemma_recurrences_hold(5, 6, 0).unwrap());
    }

    #[test]
    fn corrected_relations_hold_on_grid() {
        for n in 5..=20 {
            for m in 2..=12 {
                for l in 0..m {
                    let r = check_recurrences(&CORRECTED_RELATIONS, m, n, l).unwrap();
                    assert!(r.all_hold(), "{m} {n} {l}: {:?}", r.failing().collect::<Vec<_>>());
                    assert!(step_down_implication_holds(m, n, l).unwrap());
                }
            }
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in SigmaKind::ALL {
            assert_eq!(k.name().parse::<SigmaKind>().unwrap(), k);
        }
        assert!("3even".parse::<SigmaKind>().is_err());
    }
}
