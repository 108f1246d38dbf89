//! Structure-constant model of the Clifford algebra of a diagonal form.
//!
//! This is an independent check on the closed-form invariant: it builds the
//! multiplication table on basis blades, computes the centre of the even part by
//! linear algebra, and splits the even part into quaternion factors by a
//! symplectic reduction on even blades. Nothing here uses Hasse invariants.

use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::rational::{quaternion_class, RationalBrauerClass};
use crate::scalar::ExactField;
use crate::SmallRational;

/// `C(⟨a₁,…,aₙ⟩)` with basis `e_S`, `S ⊆ {0,…,n-1}` encoded as a bitmask.
#[derive(Clone, Debug)]
pub struct CliffordAlgebra<F> {
    squares: Vec<F>,
}

/// Scalar multiple of a basis blade.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<F> {
    pub coeff: F,
    pub mask: u32,
}

impl<F: ExactField> CliffordAlgebra<F> {
    pub fn new(squares: Vec<F>) -> Result<Self> {
        if squares.len() > 16 {
            return Err(Error::Resource(format!(
                "Clifford model limited to 16 generators, got {}",
                squares.len()
            )));
        }
        if squares.iter().any(|a| a.is_zero()) {
            return Err(Error::Argument("degenerate form".into()));
        }
        Ok(Self { squares })
    }

    pub fn from_form(q: &QuadraticForm) -> Result<Self> {
        Self::new(q.entries().iter().map(lift::<F>).collect())
    }

    pub fn rank(&self) -> usize {
        self.squares.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.rank()
    }

    fn full_mask(&self) -> u32 {
        ((1u64 << self.rank()) - 1) as u32
    }

    /// `e_S · e_T = coeff · e_{S △ T}`.
    pub fn blade_product(&self, s: u32, t: u32) -> Monomial<F> {
        // Each generator of T passes over the generators of S with a larger index.
        let mut swaps = 0u32;
        for j in 0..self.rank() {
            if t >> j & 1 == 1 {
                swaps += (s >> (j + 1)).count_ones();
            }
        }
        let mut coeff = if swaps % 2 == 0 { F::one() } else { -F::one() };
        for i in 0..self.rank() {
            if (s & t) >> i & 1 == 1 {
                coeff = coeff * self.squares[i].clone();
            }
        }
        Monomial { coeff, mask: s ^ t }
    }

    pub fn mul_monomials(&self, x: &Monomial<F>, y: &Monomial<F>) -> Monomial<F> {
        let p = self.blade_product(x.mask, y.mask);
        Monomial {
            coeff: x.coeff.clone() * y.coeff.clone() * p.coeff,
            mask: p.mask,
        }
    }

    /// Product of dense elements (coefficient vectors of length `2ⁿ`).
    pub fn mul(&self, x: &[F], y: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim()];
        for (s, xs) in x.iter().enumerate() {
            if xs.is_zero() {
                continue;
            }
            for (t, yt) in y.iter().enumerate() {
                if yt.is_zero() {
                    continue;
                }
                let p = self.blade_product(s as u32, t as u32);
                let slot = &mut out[p.mask as usize];
                *slot = slot.clone() + xs.clone() * yt.clone() * p.coeff;
            }
        }
        out
    }

    pub fn even_masks(&self) -> Vec<u32> {
        (0..=self.full_mask())
            .filter(|m| m.count_ones() % 2 == 0)
            .collect()
    }

    /// Basis of the centre of `C₀`, as dense vectors.
    pub fn even_centre(&self) -> Vec<Vec<F>> {
        let even = self.even_masks();
        let mut rows = Vec::new();
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                let g = (1u32 << i) | (1u32 << j);
                // column k is the commutator [e_{even[k]}, g]
                let mut block = vec![vec![F::zero(); even.len()]; self.dim()];
                for (k, &s) in even.iter().enumerate() {
                    let left = self.blade_product(s, g);
                    let right = self.blade_product(g, s);
                    let cell = &mut block[left.mask as usize][k];
                    *cell = cell.clone() + left.coeff;
                    let cell = &mut block[right.mask as usize][k];
                    *cell = cell.clone() - right.coeff;
                }
                rows.extend(block.into_iter().filter(|r| r.iter().any(|c| !c.is_zero())));
            }
        }
        nullspace(rows, even.len())
            .into_iter()
            .map(|v| {
                let mut dense = vec![F::zero(); self.dim()];
                for (k, c) in v.into_iter().enumerate() {
                    dense[even[k] as usize] = c;
                }
                dense
            })
            .collect()
    }

    fn commute(&self, s: u32, t: u32) -> bool {
        self.blade_product(s, t).coeff == self.blade_product(t, s).coeff
    }

    fn square(&self, m: &Monomial<F>) -> F {
        let sq = self.mul_monomials(m, m);
        debug_assert_eq!(sq.mask, 0);
        sq.coeff
    }

    /// Splits the even part into a tensor product of quaternion algebras `(α, β)`,
    /// returning the pairs. The even part (or one simple component of it, for even
    /// rank) is `⊗ (αᵢ, βᵢ)`.
    pub fn quaternion_decomposition(&self) -> Vec<(F, F)> {
        let full = self.full_mask();
        let central = |mask: u32| mask == 0 || (self.rank() % 2 == 0 && mask == full);
        let mut candidates: Vec<Monomial<F>> = self
            .even_masks()
            .into_iter()
            .filter(|&m| !central(m))
            .map(|mask| Monomial { coeff: F::one(), mask })
            .collect();
        let mut pairs = Vec::new();
        while let Some(u) = candidates.first().cloned() {
            let partner = candidates
                .iter()
                .position(|m| !self.commute(u.mask, m.mask));
            let Some(vi) = partner else {
                candidates.remove(0);
                continue;
            };
            let v = candidates[vi].clone();
            pairs.push((self.square(&u), self.square(&v)));
            let mut next: Vec<Monomial<F>> = Vec::new();
            for (i, m) in candidates.iter().enumerate() {
                if i == 0 || i == vi {
                    continue;
                }
                let mut m = m.clone();
                if !self.commute(m.mask, u.mask) {
                    m = self.mul_monomials(&m, &v);
                }
                if !self.commute(m.mask, v.mask) {
                    m = self.mul_monomials(&m, &u);
                }
                if central(m.mask) || next.iter().any(|x| x.mask == m.mask) {
                    continue;
                }
                next.push(m);
            }
            candidates = next;
        }
        pairs
    }
}

/// Class of `C₀(q)` (odd rank) or of its simple components (even rank, trivial
/// discriminant), computed from the structure constants.
pub fn even_clifford_class_oracle<F: ExactField>(q: &QuadraticForm) -> Result<RationalBrauerClass> {
    let n = q.dim();
    if n < 3 {
        return Err(Error::Domain(format!("need rank >= 3, got {n}")));
    }
    let alg = CliffordAlgebra::<F>::from_form(q)?;
    let centre = alg.even_centre();
    let expected_centre = if n % 2 == 0 { 2 } else { 1 };
    if centre.len() != expected_centre {
        return Err(Error::Domain(format!(
            "centre of the even part has dimension {}, expected {expected_centre}",
            centre.len()
        )));
    }
    if n % 2 == 0 {
        let z = Monomial { coeff: F::one(), mask: alg.full_mask() };
        let delta = alg.square(&z);
        let Some(root) = delta.sqrt_exact() else {
            return Err(Error::Domain("centre is a field: nontrivial discriminant".into()));
        };
        // the central idempotents (1 ± z/√δ)/2 must be orthogonal idempotents
        let two = F::from_int(2);
        let mut e_plus = vec![F::zero(); alg.dim()];
        let mut e_minus = vec![F::zero(); alg.dim()];
        e_plus[0] = F::one() / two.clone();
        e_minus[0] = F::one() / two.clone();
        let zc = F::one() / (two * root);
        e_plus[z.mask as usize] = zc.clone();
        e_minus[z.mask as usize] = -zc;
        if alg.mul(&e_plus, &e_plus) != e_plus || alg.mul(&e_plus, &e_minus).iter().any(|c| !c.is_zero()) {
            return Err(Error::Domain("central idempotents failed to split".into()));
        }
    }
    let pairs = alg.quaternion_decomposition();
    let r = (n - 1) / 2;
    if pairs.len() != r {
        return Err(Error::Domain(format!(
            "expected {r} quaternion factors, found {}",
            pairs.len()
        )));
    }
    let mut class = RationalBrauerClass::identity();
    for (a, b) in pairs {
        let (a, b) = (
            a.to_small().ok_or_else(|| Error::Resource("scalar overflow".into()))?,
            b.to_small().ok_or_else(|| Error::Resource("scalar overflow".into()))?,
        );
        class = class.add(&quaternion_class(&a, &b)?);
    }
    Ok(class)
}

fn lift<F: ExactField>(x: &SmallRational) -> F {
    F::from_int(*x.numer()) / F::from_int(*x.denom())
}

/// Basis of `{x : A x = 0}` by Gauss-Jordan elimination.
pub fn nullspace<F: ExactField>(mut rows: Vec<Vec<F>>, ncols: usize) -> Vec<Vec<F>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..ncols {
                    let d = f.clone() * rows[r][k].clone();
                    rows[i][k] = rows[i][k].clone() - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][f].clone();
            }
            v
        })
        .collect()
}
