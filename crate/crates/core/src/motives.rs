//! Finite direct sums of motives of central simple algebras, as multisets of
//! Brauer classes.
//!
//! Two sums `⊕ U(Aⱼ)` and `⊕ U(A'ⱼ)` are isomorphic exactly when they have the
//! same number of summands and, for every prime `p`, the `p`-primary parts of
//! the classes agree as multisets. [`MotiveSum::isomorphism_key`] packages that
//! data as a canonical value, so that isomorphism is key equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::arith::prime_divisors;
use crate::brauer::{same_model, BrauerClass, BrauerGroupModel, Coords};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct MotiveSum {
    model: Arc<BrauerGroupModel>,
    classes: BTreeMap<Coords, u64>,
}

/// Canonical isomorphism invariant: cardinality plus, for each prime dividing
/// some class order, the multiset of `p`-primary parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoKey {
    pub cardinality: u64,
    pub primary: BTreeMap<u64, BTreeMap<Coords, u64>>,
}

impl MotiveSum {
    /// The zero object.
    pub fn empty(model: &Arc<BrauerGroupModel>) -> Self {
        Self {
            model: Arc::clone(model),
            classes: BTreeMap::new(),
        }
    }

    pub fn from_classes<'a, I>(model: &Arc<BrauerGroupModel>, classes: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BrauerClass>,
    {
        let mut out = Self::empty(model);
        for c in classes {
            out.push(c, 1)?;
        }
        Ok(out)
    }

    /// Builds from coordinates with multiplicities; zero multiplicities are dropped.
    pub fn from_coords<I>(model: &Arc<BrauerGroupModel>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Coords, u64)>,
    {
        let mut classes = BTreeMap::new();
        for (c, m) in entries {
            model.validate_coords(&c)?;
            if m > 0 {
                *classes.entry(c).or_insert(0) += m;
            }
        }
        Ok(Self {
            model: Arc::clone(model),
            classes,
        })
    }

    /// Abstract-model shorthand: one summand per residue vector.
    pub fn from_residues(model: &Arc<BrauerGroupModel>, rs: &[&[u64]]) -> Result<Self> {
        Self::from_coords(model, rs.iter().map(|r| (Coords::Residues(r.to_vec()), 1)))
    }

    pub fn push(&mut self, c: &BrauerClass, mult: u64) -> Result<()> {
        if !same_model(c.model(), &self.model) {
            return Err(Error::Argument("class from a different group model".into()));
        }
        if mult > 0 {
            *self.classes.entry(c.coords().clone()).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn model(&self) -> &Arc<BrauerGroupModel> {
        &self.model
    }

    /// Distinct classes with multiplicities, in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&Coords, u64)> {
        self.classes.iter().map(|(c, &m)| (c, m))
    }

    pub fn multiplicity(&self, c: &Coords) -> u64 {
        self.classes.get(c).copied().unwrap_or(0)
    }

    pub fn cardinality(&self) -> u64 {
        self.classes.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Distinct classes occurring in the sum.
    pub fn support(&self) -> Vec<BrauerClass> {
        self.classes
            .keys()
            .map(|c| BrauerClass::from_parts(Arc::clone(&self.model), c.clone()))
            .collect()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_model(&self.model, &other.model) {
            Ok(())
        } else {
            Err(Error::Argument("motive sums over different group models".into()))
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut classes = self.classes.clone();
        for (c, &m) in &other.classes {
            *classes.entry(c.clone()).or_insert(0) += m;
        }
        Ok(Self {
            model: Arc::clone(&self.model),
            classes,
        })
    }

    /// `n` copies of `self`.
    pub fn repeat(&self, n: u64) -> Self {
        Self {
            model: Arc::clone(&self.model),
            classes: if n == 0 {
                BTreeMap::new()
            } else {
                self.classes.iter().map(|(c, &m)| (c.clone(), m * n)).collect()
            },
        }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut classes = BTreeMap::new();
        for (a, &m) in &self.classes {
            for (b, &n) in &other.classes {
                *classes.entry(self.model.add_coords(a, b)).or_insert(0) += m * n;
            }
        }
        Ok(Self {
            model: Arc::clone(&self.model),
            classes,
        })
    }

    /// Shifts every summand by `c` (tensoring with `U(A)` for `[A] = c`).
    pub fn translate(&self, c: &Coords) -> Self {
        let classes = self
            .classes
            .iter()
            .map(|(a, &m)| (self.model.add_coords(a, c), m))
            .collect();
        Self {
            model: Arc::clone(&self.model),
            classes,
        }
    }

    pub fn isomorphism_key(&self) -> IsoKey {
        let mut primes = BTreeSet::new();
        for c in self.classes.keys() {
            primes.extend(prime_divisors(self.model.order_of(c)));
        }
        let primary = primes
            .into_iter()
            .map(|p| {
                let mut parts = BTreeMap::new();
                for (c, &m) in &self.classes {
                    *parts.entry(self.model.p_part_coords(c, p)).or_insert(0) += m;
                }
                (p, parts)
            })
            .collect();
        IsoKey {
            cardinality: self.cardinality(),
            primary,
        }
    }

    /// Per-prime multiset criterion for `⊕ U(Aⱼ) ≅ ⊕ U(A'ⱼ)`.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        same_model(&self.model, &other.model)
            && self.cardinality() == other.cardinality()
            && self.isomorphism_key() == other.isomorphism_key()
    }

    /// Evaluates `x ≅ y` and `x ⊕ n ≅ y ⊕ n`, returning the former after checking
    /// that both agree.
    pub fn cancel_common(x: &Self, y: &Self, n: &Self) -> Result<bool> {
        let direct = x.is_isomorphic(y);
        let padded = x.direct_sum(n)?.is_isomorphic(&y.direct_sum(n)?);
        if direct != padded {
            return Err(Error::Domain(format!(
                "cancellation failed: x={x}, y={y}, n={n}"
            )));
        }
        Ok(direct)
    }
}

impl PartialEq for MotiveSum {
    /// Multiset equality (not isomorphism).
    fn eq(&self, other: &Self) -> bool {
        same_model(&self.model, &other.model) && self.classes == other.classes
    }
}

impl Eq for MotiveSum {}

impl fmt::Display for MotiveSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (c, &m) in &self.classes {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            let class = BrauerClass::from_parts(Arc::clone(&self.model), c.clone());
            if m == 1 {
                write!(f, "{class}")?;
            } else {
                write!(f, "{m}×{class}")?;
            }
        }
        write!(f, "}}")
    }
}
