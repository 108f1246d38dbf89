//! The ring `R_B(k) = ℤ[Br(k)] / ⟨[0] + [a+b] − [a] − [b] : ind a, ind b coprime⟩`.
//!
//! Every class `c` splits as the sum of its primary parts, which have pairwise
//! coprime orders, so `[c] = Σ_p [c_p] − (ν − 1)·[0]` with `ν` the number of primes
//! dividing `ord c`. The normal form keeps only generators of prime-power order
//! together with the identity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::prime_divisors;
use crate::brauer::{same_model, BrauerClass, BrauerGroupModel, Coords};
use crate::error::{Error, Result};
use crate::motives::MotiveSum;

#[derive(Clone, Debug)]
pub struct RBElement {
    model: Arc<BrauerGroupModel>,
    terms: BTreeMap<Coords, i64>,
}

fn accumulate(terms: &mut BTreeMap<Coords, i64>, c: Coords, k: i64) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    let slot = terms.entry(c).or_insert(0);
    *slot = slot
        .checked_add(k)
        .ok_or_else(|| Error::Resource("coefficient overflow".into()))?;
    Ok(())
}

impl RBElement {
    pub fn zero(model: &Arc<BrauerGroupModel>) -> Self {
        Self {
            model: Arc::clone(model),
            terms: BTreeMap::new(),
        }
    }

    /// The unit `[0]`.
    pub fn one(model: &Arc<BrauerGroupModel>) -> Self {
        Self::from_class(&model.identity())
    }

    pub fn from_class(c: &BrauerClass) -> Self {
        Self::normalize(c.model(), [(c.coords().clone(), 1)]).expect("valid class")
    }

    pub fn from_motive_sum(s: &MotiveSum) -> Self {
        Self::normalize(s.model(), s.entries().map(|(c, m)| (c.clone(), m as i64)))
            .expect("motive sums hold valid classes")
    }

    /// Rewrites a raw combination into normal form.
    pub fn normalize<I>(model: &Arc<BrauerGroupModel>, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Coords, i64)>,
    {
        let mut terms = BTreeMap::new();
        let id = model.identity_coords();
        for (c, k) in raw {
            model.validate_coords(&c)?;
            let primes = prime_divisors(model.order_of(&c));
            if primes.len() <= 1 {
                accumulate(&mut terms, c, k)?;
                continue;
            }
            for &p in &primes {
                accumulate(&mut terms, model.p_part_coords(&c, p), k)?;
            }
            let extra = (primes.len() as i64 - 1)
                .checked_mul(k)
                .ok_or_else(|| Error::Resource("coefficient overflow".into()))?;
            accumulate(&mut terms, id.clone(), -extra)?;
        }
        terms.retain(|_, k| *k != 0);
        Ok(Self {
            model: Arc::clone(model),
            terms,
        })
    }

    pub fn model(&self) -> &Arc<BrauerGroupModel> {
        &self.model
    }

    /// Normal-form terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Coords, i64)> {
        self.terms.iter().map(|(c, &k)| (c, k))
    }

    pub fn coefficient(&self, c: &Coords) -> i64 {
        self.terms.get(c).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_model(&self.model, &other.model) {
            Ok(())
        } else {
            Err(Error::Argument("ring elements over different group models".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Self::normalize(
            &self.model,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(c, &k)| (c.clone(), k)),
        )
    }

    pub fn neg(&self) -> Self {
        Self {
            model: Arc::clone(&self.model),
            terms: self.terms.iter().map(|(c, &k)| (c.clone(), -k)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Group-ring convolution followed by normalization.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, &i) in &self.terms {
            for (b, &j) in &other.terms {
                let k = i
                    .checked_mul(j)
                    .ok_or_else(|| Error::Resource("coefficient overflow".into()))?;
                raw.push((self.model.add_coords(a, b), k));
            }
        }
        Self::normalize(&self.model, raw)
    }

    /// `Σ nⱼ [Aⱼ] ↦ Σ nⱼ`.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn equal(&self, other: &Self) -> bool {
        self == other
    }
}

impl PartialEq for RBElement {
    fn eq(&self, other: &Self) -> bool {
        same_model(&self.model, &other.model) && self.terms == other.terms
    }
}

impl Eq for RBElement {}

impl fmt::Display for RBElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, &k)) in self.terms.iter().enumerate() {
            let class = BrauerClass::from_parts(Arc::clone(&self.model), c.clone());
            let sign = if k < 0 { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            let space = if i > 0 { " " } else { "" };
            match k.unsigned_abs() {
                1 => write!(f, "{sep}{sign}{space}[{class}]")?,
                a => write!(f, "{sep}{sign}{space}{a}[{class}]")?,
            }
        }
        Ok(())
    }
}

/// Applies the defining relations of `R_B(k)` to a raw combination in a random
/// order, independently of [`RBElement::normalize`].
///
/// A forward move picks a term `k·[c]` whose order has at least two prime factors,
/// a random chunk `j` of `k` and a random coprime splitting `c = a + b`, and
/// replaces `j·[c]` by `j·([a] + [b] − [0])`. Before the forward phase, up to
/// `merges` backward moves `[a] + [b] → [a + b] + [0]` are applied to random
/// coprime pairs, which scrambles the starting point.
#[derive(Debug)]
pub struct RewriteEngine<'a> {
    model: &'a Arc<BrauerGroupModel>,
    pub merges: usize,
}

impl<'a> RewriteEngine<'a> {
    pub fn new(model: &'a Arc<BrauerGroupModel>, merges: usize) -> Self {
        Self { model, merges }
    }

    /// Rewrites until no forward move applies; returns the final combination and the
    /// number of moves applied.
    pub fn run<R: Rng>(&self, raw: &[(Coords, i64)], rng: &mut R) -> Result<(BTreeMap<Coords, i64>, usize)> {
        let m = self.model;
        let mut terms = BTreeMap::new();
        for (c, k) in raw {
            m.validate_coords(c)?;
            accumulate(&mut terms, c.clone(), *k)?;
        }
        terms.retain(|_, k| *k != 0);
        let id = m.identity_coords();
        let mut moves = 0usize;

        for _ in 0..self.merges {
            let keys: Vec<&Coords> = terms.keys().collect();
            if keys.len() < 2 {
                break;
            }
            let a = keys[rng.gen_range(0..keys.len())].clone();
            let b = keys[rng.gen_range(0..keys.len())].clone();
            let (oa, ob) = (m.order_of(&a), m.order_of(&b));
            if a == b || oa == 1 || ob == 1 || crate::arith::gcd(oa, ob) != 1 {
                continue;
            }
            let k = terms[&a].signum();
            if terms[&b].signum() != k {
                continue;
            }
            let ab = m.add_coords(&a, &b);
            accumulate(&mut terms, a, -k)?;
            accumulate(&mut terms, b, -k)?;
            accumulate(&mut terms, ab, k)?;
            accumulate(&mut terms, id.clone(), k)?;
            terms.retain(|_, k| *k != 0);
            moves += 1;
        }

        loop {
            let splittable: Vec<Coords> = terms
                .keys()
                .filter(|c| prime_divisors(m.order_of(c)).len() >= 2)
                .cloned()
                .collect();
            let Some(c) = splittable.choose(rng).cloned() else { break };
            let k = terms[&c];
            let chunk = if k > 0 { rng.gen_range(1..=k) } else { -rng.gen_range(1..=-k) };
            let primes = prime_divisors(m.order_of(&c));
            // a nonempty proper subset of the primes
            let mask = rng.gen_range(1..(1u32 << primes.len()) - 1);
            let mut a = id.clone();
            for (i, &p) in primes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a = m.add_coords(&a, &m.p_part_coords(&c, p));
                }
            }
            let b = m.add_coords(&c, &m.neg_coords(&a));
            accumulate(&mut terms, c, -chunk)?;
            accumulate(&mut terms, a, chunk)?;
            accumulate(&mut terms, b, chunk)?;
            accumulate(&mut terms, id.clone(), -chunk)?;
            terms.retain(|_, k| *k != 0);
            moves += 1;
        }
        Ok((terms, moves))
    }
}
