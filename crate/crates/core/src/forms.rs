//! Diagonal quadratic forms over ℚ and their Brauer-class invariants.

pub mod clifford;

use std::sync::Arc;

use num_rational::Ratio;
use num_traits::Zero;

use crate::brauer::{same_model, BrauerClass, BrauerGroupModel};
use crate::error::{Error, Result};
use crate::rational::{self, quaternion_class_squarefree, square_free_part, RationalBrauerClass};
use crate::SmallRational;

/// Non-degenerate diagonal form `⟨a₁, …, aₙ⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    entries: Vec<SmallRational>,
}

impl QuadraticForm {
    pub fn new(entries: Vec<SmallRational>) -> Result<Self> {
        if entries.iter().any(Zero::is_zero) {
            return Err(Error::Argument("quadratic form entries must be nonzero".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_integers(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&a| Ratio::from_integer(a)).collect())
    }

    pub fn parse(entries: &[&str]) -> Result<Self> {
        Self::new(
            entries
                .iter()
                .map(|s| rational::parse_rational(s))
                .collect::<Result<_>>()?,
        )
    }

    pub fn entries(&self) -> &[SmallRational] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self { entries }
    }

    fn square_free_entries(&self) -> Vec<i64> {
        self.entries
            .iter()
            .map(|a| square_free_part(a).expect("entries are nonzero"))
            .collect()
    }

    /// Square-free integer representing the determinant modulo squares.
    pub fn determinant_class(&self) -> i64 {
        let prod = self
            .entries
            .iter()
            .fold(SmallRational::from_integer(1), |acc, a| {
                // reduce each factor first to keep the product small
                acc * Ratio::from_integer(square_free_part(a).expect("nonzero"))
            });
        square_free_part(&prod).expect("nonzero")
    }

    /// `(-1)^{n(n-1)/2} · ∏ aᵢ` modulo squares, as a square-free integer.
    pub fn signed_discriminant(&self) -> i64 {
        let n = self.dim();
        let sign = if (n * n.saturating_sub(1) / 2) % 2 == 0 { 1 } else { -1 };
        sign * self.determinant_class()
    }

    pub fn has_trivial_discriminant(&self) -> bool {
        self.signed_discriminant() == 1
    }

    /// `∑_{i<j} (aᵢ, aⱼ)`.
    pub fn hasse_invariant(&self) -> RationalBrauerClass {
        let a = self.square_free_entries();
        let mut acc = RationalBrauerClass::identity();
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                acc = acc.add(&quaternion_class_squarefree(a[i], a[j]));
            }
        }
        acc
    }

    /// Class of `C₀(q)` for odd `n`, of either simple component `C₀^±(q)` for even `n`.
    ///
    /// Closed form by `n mod 8`, combining the Hasse invariant with `(-1, ±det)` and
    /// `(-1, -1)`; it is pinned against the structure-constant oracle in
    /// [`clifford::even_clifford_class_oracle`].
    pub fn even_clifford_class(&self) -> Result<RationalBrauerClass> {
        let n = self.dim();
        if n < 3 {
            return Err(Error::Domain(format!("even Clifford class needs n >= 3, got {n}")));
        }
        if n % 2 == 0 && !self.has_trivial_discriminant() {
            return Err(Error::Domain(format!(
                "even-dimensional form with nontrivial signed discriminant {}",
                self.signed_discriminant()
            )));
        }
        let det = self.determinant_class();
        let correction = match n % 8 {
            1 | 2 => RationalBrauerClass::identity(),
            3 | 4 => quaternion_class_squarefree(-1, -det),
            5 | 6 => quaternion_class_squarefree(-1, -1),
            _ => quaternion_class_squarefree(-1, det),
        };
        Ok(self.hasse_invariant().add(&correction))
    }
}

/// Brauer-level shadow of a quadratic form of dimension `n >= 3`: the class of
/// `C₀⁺(q)` (even `n`) or `C₀(q)` (odd `n`), plus the `I³ = 0` modelling flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormShadow {
    dim: usize,
    clifford_class: BrauerClass,
    i3_zero: bool,
}

impl FormShadow {
    pub fn new(dim: usize, clifford_class: BrauerClass, i3_zero: bool) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Argument(format!("form shadows need dim >= 3, got {dim}")));
        }
        if !clifford_class.is_two_torsion() {
            return Err(Error::Argument(format!(
                "Clifford class must be 2-torsion, has order {}",
                clifford_class.order()
            )));
        }
        Ok(Self {
            dim,
            clifford_class,
            i3_zero,
        })
    }

    /// Shadow of a concrete form, in the Br(ℚ) model.
    pub fn from_form(q: &QuadraticForm, model: &Arc<BrauerGroupModel>, i3_zero: bool) -> Result<Self> {
        let class = BrauerClass::from_rational(model, q.even_clifford_class()?)?;
        Self::new(q.dim(), class, i3_zero)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clifford_class(&self) -> &BrauerClass {
        &self.clifford_class
    }

    pub fn i3_zero(&self) -> bool {
        self.i3_zero
    }
}

/// Decides similarity of two forms from their shadows, when a classification result
/// applies: dimension 6 (classified by the pair of even Clifford components) or
/// `I³ = 0` (classified by dimension, discriminant and Clifford invariant).
pub fn similar_under_classification(x: &FormShadow, y: &FormShadow) -> Result<bool> {
    if !same_model(x.clifford_class.model(), y.clifford_class.model()) {
        return Err(Error::Argument("shadows over different group models".into()));
    }
    if x.dim != y.dim {
        return Err(Error::Argument(format!(
            "dimensions differ ({} vs {})",
            x.dim, y.dim
        )));
    }
    if x.dim != 6 && !(x.i3_zero && y.i3_zero) {
        return Err(Error::Domain(
            "classification rule inapplicable: need dim 6 or I^3 = 0".into(),
        ));
    }
    Ok(x.clifford_class == y.clifford_class)
}
