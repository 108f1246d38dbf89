//! Finite models of Brauer groups, Brauer classes and central simple algebras.
//!
//! Group elements are written additively: the class of `A ⊗ A'` is `[A] + [A']`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::arith::{self, is_prime, prime_divisors};
use crate::error::{Error, Result};
use crate::rational::RationalBrauerClass;

/// Coordinates of a class inside its model: residue vector for `⊕ ℤ/nᵢ`, local
/// invariants for Br(ℚ).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coords {
    Residues(Vec<u64>),
    Local(RationalBrauerClass),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// `⊕ᵢ ℤ/nᵢ` given by its invariant orders.
    Abstract { orders: Vec<u64> },
    RationalField,
}

/// How the index of a class is obtained.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum IndexPolicy {
    /// `ind = per`; exact over number fields.
    #[default]
    OrderIsIndex,
    /// User-supplied indices; classes missing from the map fall back to their period.
    Oracle(BTreeMap<Coords, u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerGroupModel {
    kind: GroupKind,
    index_policy: IndexPolicy,
}

impl BrauerGroupModel {
    pub fn abstract_group(orders: &[u64]) -> Result<Arc<Self>> {
        if let Some(bad) = orders.iter().find(|&&n| n < 2) {
            return Err(Error::Argument(format!("group orders must be >= 2, got {bad}")));
        }
        Ok(Arc::new(Self {
            kind: GroupKind::Abstract {
                orders: orders.to_vec(),
            },
            index_policy: IndexPolicy::OrderIsIndex,
        }))
    }

    /// The trivial group (no cyclic factors).
    pub fn trivial() -> Arc<Self> {
        Self::abstract_group(&[]).expect("empty order list is valid")
    }

    /// `(ℤ/2)^d`.
    pub fn elementary_two(d: usize) -> Arc<Self> {
        Self::abstract_group(&vec![2; d]).expect("orders are 2")
    }

    pub fn rational() -> Arc<Self> {
        Arc::new(Self {
            kind: GroupKind::RationalField,
            index_policy: IndexPolicy::OrderIsIndex,
        })
    }

    /// Replaces the index policy by an oracle, checking `per | ind` and equal prime support.
    pub fn with_index_oracle(&self, indices: BTreeMap<Coords, u64>) -> Result<Arc<Self>> {
        for (coords, &ind) in &indices {
            self.validate_coords(coords)?;
            let per = self.order_of(coords);
            if ind == 0 || ind % per != 0 {
                return Err(Error::Argument(format!(
                    "index {ind} is not a multiple of the period {per}"
                )));
            }
            if prime_divisors(ind) != prime_divisors(per) {
                return Err(Error::Argument(format!(
                    "index {ind} and period {per} have different prime support"
                )));
            }
        }
        Ok(Arc::new(Self {
            kind: self.kind.clone(),
            index_policy: IndexPolicy::Oracle(indices),
        }))
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn index_policy(&self) -> &IndexPolicy {
        &self.index_policy
    }

    pub fn orders(&self) -> Option<&[u64]> {
        match &self.kind {
            GroupKind::Abstract { orders } => Some(orders),
            GroupKind::RationalField => None,
        }
    }

    /// Group exponent; `None` for Br(ℚ), which has elements of every order.
    pub fn exponent(&self) -> Option<u64> {
        self.orders().map(|o| o.iter().fold(1, |a, &n| arith::lcm(a, n)))
    }

    pub fn cardinality(&self) -> Option<u64> {
        self.orders().map(|o| o.iter().product())
    }

    pub fn identity_coords(&self) -> Coords {
        match &self.kind {
            GroupKind::Abstract { orders } => Coords::Residues(vec![0; orders.len()]),
            GroupKind::RationalField => Coords::Local(RationalBrauerClass::identity()),
        }
    }

    pub fn validate_coords(&self, c: &Coords) -> Result<()> {
        match (&self.kind, c) {
            (GroupKind::Abstract { orders }, Coords::Residues(r)) => {
                if r.len() != orders.len() {
                    return Err(Error::Argument(format!(
                        "expected {} coordinates, got {}",
                        orders.len(),
                        r.len()
                    )));
                }
                if let Some((x, n)) = r.iter().zip(orders).find(|(x, n)| *x >= *n) {
                    return Err(Error::Argument(format!("residue {x} out of range for Z/{n}")));
                }
                Ok(())
            }
            (GroupKind::RationalField, Coords::Local(l)) => l.validate(),
            _ => Err(Error::Argument("coordinates do not match the group model".into())),
        }
    }

    pub fn add_coords(&self, a: &Coords, b: &Coords) -> Coords {
        match (&self.kind, a, b) {
            (GroupKind::Abstract { orders }, Coords::Residues(x), Coords::Residues(y)) => {
                Coords::Residues(
                    x.iter()
                        .zip(y)
                        .zip(orders)
                        .map(|((x, y), n)| (x + y) % n)
                        .collect(),
                )
            }
            (GroupKind::RationalField, Coords::Local(x), Coords::Local(y)) => Coords::Local(x.add(y)),
            _ => panic!("coordinates from a different model"),
        }
    }

    pub fn neg_coords(&self, a: &Coords) -> Coords {
        self.scale_coords(a, -1)
    }

    pub fn scale_coords(&self, a: &Coords, k: i64) -> Coords {
        match (&self.kind, a) {
            (GroupKind::Abstract { orders }, Coords::Residues(x)) => Coords::Residues(
                x.iter()
                    .zip(orders)
                    .map(|(x, &n)| ((*x as i128 * k as i128).rem_euclid(n as i128)) as u64)
                    .collect(),
            ),
            (GroupKind::RationalField, Coords::Local(x)) => Coords::Local(x.scale(k)),
            _ => panic!("coordinates from a different model"),
        }
    }

    /// Least `k >= 1` with `k·c = 0`.
    pub fn order_of(&self, a: &Coords) -> u64 {
        match (&self.kind, a) {
            (GroupKind::Abstract { orders }, Coords::Residues(x)) => x
                .iter()
                .zip(orders)
                .fold(1, |acc, (&x, &n)| arith::lcm(acc, n / arith::gcd(x, n))),
            (GroupKind::RationalField, Coords::Local(x)) => x.order(),
            _ => panic!("coordinates from a different model"),
        }
    }

    /// `p`-primary component. Caller guarantees `p` is prime.
    pub fn p_part_coords(&self, a: &Coords, p: u64) -> Coords {
        match (&self.kind, a) {
            (GroupKind::Abstract { .. }, Coords::Residues(_)) => {
                // c = c_p + c_{p'}: with ord(c) = p^e·m, c_p = (u·m)·c where u·m ≡ 1 mod p^e.
                let ord = self.order_of(a);
                let (e, m) = arith::split_prime_power(ord, p);
                if e == 0 {
                    return self.identity_coords();
                }
                let pe = p.pow(e);
                let u = arith::mod_inv(m % pe, pe).expect("coprime");
                let k = ((u as u128 * m as u128) % ord as u128) as i64;
                self.scale_coords(a, k)
            }
            (GroupKind::RationalField, Coords::Local(x)) => Coords::Local(x.p_part(p)),
            _ => panic!("coordinates from a different model"),
        }
    }

    pub fn index_of(&self, a: &Coords) -> u64 {
        match &self.index_policy {
            IndexPolicy::OrderIsIndex => self.order_of(a),
            IndexPolicy::Oracle(map) => map.get(a).copied().unwrap_or_else(|| self.order_of(a)),
        }
    }

    /// Every element of a finite model, in lexicographic residue order.
    pub fn elements(&self) -> Result<Vec<Coords>> {
        let orders = self
            .orders()
            .ok_or_else(|| Error::Argument("Br(Q) cannot be enumerated".into()))?;
        let total = self.cardinality().unwrap_or(0);
        if total > 1_000_000 {
            return Err(Error::Resource(format!("group of order {total} is too large to enumerate")));
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut cur = vec![0u64; orders.len()];
        loop {
            out.push(Coords::Residues(cur.clone()));
            let mut i = orders.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    pub fn class(self: &Arc<Self>, coords: Coords) -> Result<BrauerClass> {
        self.validate_coords(&coords)?;
        Ok(BrauerClass {
            model: Arc::clone(self),
            coords,
        })
    }

    /// Abstract-model shorthand.
    pub fn residues(self: &Arc<Self>, r: &[u64]) -> Result<BrauerClass> {
        self.class(Coords::Residues(r.to_vec()))
    }

    pub fn identity(self: &Arc<Self>) -> BrauerClass {
        BrauerClass {
            model: Arc::clone(self),
            coords: self.identity_coords(),
        }
    }

    pub fn all_classes(self: &Arc<Self>) -> Result<Vec<BrauerClass>> {
        Ok(self
            .elements()?
            .into_iter()
            .map(|coords| BrauerClass {
                model: Arc::clone(self),
                coords,
            })
            .collect())
    }
}

pub fn same_model(a: &Arc<BrauerGroupModel>, b: &Arc<BrauerGroupModel>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Argument(format!("{p} is not a prime")))
    }
}

#[derive(Clone, Debug)]
pub struct BrauerClass {
    model: Arc<BrauerGroupModel>,
    coords: Coords,
}

impl BrauerClass {
    pub fn model(&self) -> &Arc<BrauerGroupModel> {
        &self.model
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn into_coords(self) -> Coords {
        self.coords
    }

    pub(crate) fn from_parts(model: Arc<BrauerGroupModel>, coords: Coords) -> Self {
        Self { model, coords }
    }

    pub fn from_rational(model: &Arc<BrauerGroupModel>, class: RationalBrauerClass) -> Result<Self> {
        model.class(Coords::Local(class))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_model(&self.model, &other.model) {
            Ok(())
        } else {
            Err(Error::Argument("classes belong to different group models".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            model: Arc::clone(&self.model),
            coords: self.model.add_coords(&self.coords, &other.coords),
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            model: Arc::clone(&self.model),
            coords: self.model.scale_coords(&self.coords, k),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.coords == self.model.identity_coords()
    }

    /// The period of the class.
    pub fn order(&self) -> u64 {
        self.model.order_of(&self.coords)
    }

    pub fn index(&self) -> u64 {
        self.model.index_of(&self.coords)
    }

    pub fn is_two_torsion(&self) -> bool {
        self.order() <= 2
    }

    pub fn p_part(&self, p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self {
            model: Arc::clone(&self.model),
            coords: self.model.p_part_coords(&self.coords, p),
        })
    }

    /// Nonzero primary components, one per prime dividing the order.
    pub fn primary_parts(&self) -> Vec<(u64, BrauerClass)> {
        prime_divisors(self.order())
            .into_iter()
            .map(|p| {
                let part = Self {
                    model: Arc::clone(&self.model),
                    coords: self.model.p_part_coords(&self.coords, p),
                };
                (p, part)
            })
            .collect()
    }
}

impl PartialEq for BrauerClass {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && same_model(&self.model, &other.model)
    }
}

impl Eq for BrauerClass {}

impl PartialOrd for BrauerClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BrauerClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl Hash for BrauerClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Display for BrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coords {
            Coords::Residues(r) => {
                let parts: Vec<String> = r.iter().map(u64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            Coords::Local(l) => write!(f, "{l}"),
        }
    }
}

/// Subgroup generated by `gens` inside `model`, by closure under addition.
pub fn generated_subgroup(
    model: &Arc<BrauerGroupModel>,
    gens: &[BrauerClass],
) -> Result<BTreeSet<BrauerClass>> {
    if gens.iter().any(|g| !same_model(g.model(), model)) {
        return Err(Error::Argument("generators belong to different group models".into()));
    }
    let mut seen: BTreeSet<Coords> = BTreeSet::new();
    let identity = model.identity_coords();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = model.add_coords(&x, &g.coords);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    // finite order makes the additive closure a subgroup
    Ok(seen
        .into_iter()
        .map(|coords| BrauerClass::from_parts(Arc::clone(model), coords))
        .collect())
}

/// Central simple algebra up to isomorphism: Brauer class plus degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CSAlgebra {
    class: BrauerClass,
    degree: u64,
}

impl CSAlgebra {
    pub fn new(class: BrauerClass, degree: u64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Argument("degree must be positive".into()));
        }
        let per = class.order();
        let ind = class.index();
        if degree % per != 0 {
            return Err(Error::Argument(format!(
                "period {per} does not divide degree {degree}"
            )));
        }
        if degree % ind != 0 {
            return Err(Error::Argument(format!(
                "index {ind} does not divide degree {degree}"
            )));
        }
        Ok(Self { class, degree })
    }

    pub fn class(&self) -> &BrauerClass {
        &self.class
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn period(&self) -> u64 {
        self.class.order()
    }

    pub fn index(&self) -> u64 {
        self.class.index()
    }
}

/// Whether the two algebras have coprime indices.
pub fn coprime_indexes(a: &CSAlgebra, b: &CSAlgebra) -> Result<bool> {
    if !same_model(a.class.model(), b.class.model()) {
        return Err(Error::Argument("algebras belong to different group models".into()));
    }
    Ok(arith::gcd(a.index(), b.index()) == 1)
}
