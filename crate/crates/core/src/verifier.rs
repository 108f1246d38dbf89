//! Brute-force replay of the structural statements behind the measure on
//! enumerated finite models.
//!
//! Each suite returns a [`VerificationRun`] certificate recording the model, the
//! bounds, the seed and the outcome. Suites enumerate exhaustively below the
//! frontiers in [`VerifierConfig`] and sample with a seeded ChaCha generator
//! above them, so reruns with the same inputs are bit-identical. Counterexample
//! witnesses can be fed back through [`replay`].

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, prime_divisors};
use crate::brauer::{BrauerGroupModel, Coords, GroupKind};
use crate::error::{Error, Result};
use crate::json::{CoordsDoc, ModelDoc, MotiveSumDoc, TermDoc};
use crate::motives::MotiveSum;
use crate::ring::{RBElement, RewriteEngine};

/// Size frontiers and seeds shared by all suites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifierConfig {
    /// Largest number of multisets enumerated exhaustively by the cancellation suites.
    pub multiset_frontier: usize,
    /// Largest number of families enumerated by the quadric-product suite.
    pub family_frontier: u64,
    /// Largest group order accepted by the relation-equivalence suite.
    pub relation_order_limit: u64,
    /// Trials used when a suite falls back to sampling.
    pub random_trials: u64,
    /// Families cross-checked against the tensor construction in the quadric-product suite.
    pub tensor_crosschecks: usize,
    pub seed: u64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        Self {
            multiset_frontier: 5_000,
            family_frontier: 2_000_000,
            relation_order_limit: 100,
            random_trials: 10_000,
            tensor_crosschecks: 64,
            seed: 0x7175_6164_7269_6373,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cardinality: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_dim: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frontier: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two effective sums on which the closure, the per-prime test and the normal form disagree.
    RelationMismatch {
        x: MotiveSumDoc,
        y: MotiveSumDoc,
        closure: bool,
        isomorphic: bool,
        normal_form: bool,
    },
    SumCancellation {
        x: MotiveSumDoc,
        y: MotiveSumDoc,
        n: MotiveSumDoc,
    },
    TensorCancellation {
        x: MotiveSumDoc,
        y: MotiveSumDoc,
        c: CoordsDoc,
        n_dim: u64,
    },
    QuadricFamilies {
        n_dim: u64,
        first: Vec<CoordsDoc>,
        second: Vec<CoordsDoc>,
    },
    /// A subset expansion that disagrees with the tensor product of quadric motives.
    DecompositionMismatch {
        n_dim: u64,
        family: Vec<CoordsDoc>,
    },
    NormalForm {
        raw: Vec<TermDoc>,
        trial_seed: u64,
        merges: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Counterexample { witness: Box<Witness> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRun {
    pub suite: String,
    pub model: ModelDoc,
    pub mode: Mode,
    pub bounds: Bounds,
    pub seed: u64,
    /// `false` for probe runs that report without asserting.
    pub asserted: bool,
    pub checks: u64,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub version: String,
}

impl VerificationRun {
    fn new(suite: &str, model: &BrauerGroupModel, mode: Mode, bounds: Bounds, seed: u64) -> Self {
        Self {
            suite: suite.into(),
            model: ModelDoc::from_model(model),
            mode,
            bounds,
            seed,
            asserted: true,
            checks: 0,
            outcome: Outcome::Pass,
            notes: Vec::new(),
            version: crate::VERSION.into(),
        }
    }

    fn fail(&mut self, w: Witness) {
        self.outcome = Outcome::Counterexample { witness: Box::new(w) };
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::Pass => None,
            Outcome::Counterexample { witness } => Some(witness),
        }
    }

    /// `0` on pass or for probes, `2` on an asserted counterexample.
    pub fn exit_code(&self) -> i32 {
        if self.passed() || !self.asserted {
            0
        } else {
            2
        }
    }
}

fn finite_elements(model: &Arc<BrauerGroupModel>) -> Result<Vec<Coords>> {
    match model.kind() {
        GroupKind::Abstract { .. } => model.elements(),
        GroupKind::RationalField => Err(Error::Argument("suites need a finite abstract group model".into())),
    }
}

/// Every multiset of cardinality `0..=max_card` over `elems`, by cardinality then
/// lexicographically.
pub fn all_multisets(model: &Arc<BrauerGroupModel>, elems: &[Coords], max_card: usize) -> Result<Vec<MotiveSum>> {
    let mut out = Vec::new();
    for k in 0..=max_card {
        for combo in (0..elems.len()).combinations_with_replacement(k) {
            out.push(MotiveSum::from_coords(model, combo.into_iter().map(|i| (elems[i].clone(), 1)))?);
        }
    }
    Ok(out)
}

fn count_multisets(n: usize, max_card: usize) -> u128 {
    // Σ_k C(n + k - 1, k)
    let mut total = 0u128;
    for k in 0..=max_card {
        let mut c = 1u128;
        for i in 0..k {
            c = c * (n + i) as u128 / (i + 1) as u128;
        }
        total += c;
    }
    total
}

/// Canonical labelling of a partition: each item is labelled by the first index of
/// its block.
fn labels_by_key<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Vec<usize> {
    let mut first: HashMap<K, usize> = HashMap::new();
    keys.into_iter()
        .enumerate()
        .map(|(i, k)| *first.entry(k).or_insert(i))
        .collect()
}

/// First pair of items grouped together by one labelling and apart by the other.
fn first_disagreement(a: &[usize], b: &[usize]) -> Option<(usize, usize)> {
    let i = (0..a.len()).find(|&i| a[i] != b[i])?;
    // both labels are <= i; the smaller one names a block-mate in one partition only
    Some((i, a[i].min(b[i])))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// Keeps the smaller index as root, so roots are canonical labels.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

/// Dense integer model of a finite group for the inner loops.
struct Table {
    elems: Vec<Coords>,
    add: Vec<Vec<usize>>,
    order: Vec<u64>,
}

impl Table {
    fn new(model: &Arc<BrauerGroupModel>) -> Result<Self> {
        let elems = finite_elements(model)?;
        let index: HashMap<&Coords, usize> = elems.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let add = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&model.add_coords(a, b)]).collect())
            .collect();
        let order = elems.iter().map(|c| model.order_of(c)).collect();
        Ok(Self { elems, add, order })
    }

    fn sub(&self, a: usize, b: usize) -> usize {
        // the table is small; find the x with b + x = a
        (0..self.elems.len()).find(|&x| self.add[b][x] == a).expect("group")
    }
}

/// Equivalence classes, on effective sums of cardinality `k`, of the closure of the
/// coprime splitting relations `[c] + [a+b+c] ~ [a+c] + [b+c]` (`ord a`, `ord b`
/// coprime). The instance `c = 0` is the defining relation of `R_B(k)`; translating
/// by `c` is what the additive closure provides for free once cancellation is
/// available, which it is not inside a fixed cardinality.
fn relation_closure_labels(t: &Table, sets: &[Vec<usize>]) -> Vec<usize> {
    let index: HashMap<&[usize], usize> = sets.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut uf = UnionFind::new(sets.len());
    let n = t.elems.len();
    let mut scratch = Vec::new();
    for (si, s) in sets.iter().enumerate() {
        for i in 0..s.len() {
            for j in 0..s.len() {
                if i == j || (i > 0 && s[i] == s[i - 1]) || (j > 0 && j != i + 1 && s[j] == s[j - 1]) {
                    continue;
                }
                let (u, v) = (s[i], s[j]);
                let diff = t.sub(v, u);
                for a in 0..n {
                    let b = t.sub(diff, a);
                    if gcd(t.order[a], t.order[b]) != 1 {
                        continue;
                    }
                    scratch.clear();
                    scratch.extend(s.iter().enumerate().filter(|&(p, _)| p != i && p != j).map(|(_, &x)| x));
                    scratch.push(t.add[u][a]);
                    scratch.push(t.add[u][b]);
                    scratch.sort_unstable();
                    let target = index[scratch.as_slice()];
                    uf.union(si, target);
                }
            }
        }
    }
    (0..sets.len()).map(|i| uf.find(i)).collect()
}

/// Checks that the closure of the coprime splitting relations, the per-prime
/// permutation test and equality of normal forms induce the same equivalence on
/// effective sums of each cardinality `1..=m_max`.
pub fn verify_relation_equivalence(
    model: &Arc<BrauerGroupModel>,
    m_max: usize,
    cfg: &VerifierConfig,
) -> Result<VerificationRun> {
    let order = model
        .cardinality()
        .ok_or_else(|| Error::Argument("suites need a finite abstract group model".into()))?;
    if order > cfg.relation_order_limit {
        return Err(Error::Resource(format!(
            "group of order {order} exceeds the relation-suite limit {}",
            cfg.relation_order_limit
        )));
    }
    let t = Table::new(model)?;
    let bounds = Bounds {
        max_cardinality: Some(m_max),
        group_order: Some(order),
        frontier: Some(cfg.relation_order_limit),
        ..Bounds::default()
    };
    let mut run = VerificationRun::new("relation-equivalence", model, Mode::Exhaustive, bounds, cfg.seed);
    run.notes.push("closure generated by [c]+[a+b+c] ~ [a+c]+[b+c] with ord a, ord b coprime".into());
    for k in 1..=m_max {
        let sets: Vec<Vec<usize>> = (0..t.elems.len()).combinations_with_replacement(k).collect();
        let sums: Vec<MotiveSum> = sets
            .iter()
            .map(|s| MotiveSum::from_coords(model, s.iter().map(|&i| (t.elems[i].clone(), 1))))
            .collect::<Result<_>>()?;
        let closure = relation_closure_labels(&t, &sets);
        let iso = labels_by_key(sums.iter().map(MotiveSum::isomorphism_key));
        let nf = labels_by_key(sums.iter().map(|s| {
            RBElement::from_motive_sum(s)
                .terms()
                .map(|(c, k)| (c.clone(), k))
                .collect::<Vec<_>>()
        }));
        run.checks += (sets.len() * sets.len()) as u64;
        let bad = first_disagreement(&closure, &iso).or_else(|| first_disagreement(&iso, &nf));
        if let Some((i, j)) = bad {
            run.fail(Witness::RelationMismatch {
                x: MotiveSumDoc::from_sum(&sums[i]),
                y: MotiveSumDoc::from_sum(&sums[j]),
                closure: closure[i] == closure[j],
                isomorphic: iso[i] == iso[j],
                normal_form: nf[i] == nf[j],
            });
            return Ok(run);
        }
    }
    Ok(run)
}

/// `y` with the `p`-primary parts of the summands of `x` permuted: isomorphic to `x`.
fn scramble<R: Rng>(model: &Arc<BrauerGroupModel>, xs: &[Coords], rng: &mut R) -> Vec<Coords> {
    let exp = model.exponent().unwrap_or(1);
    let primes = prime_divisors(exp);
    if primes.is_empty() || xs.is_empty() {
        return xs.to_vec();
    }
    let p = primes[rng.gen_range(0..primes.len())];
    let parts: Vec<Coords> = xs.iter().map(|c| model.p_part_coords(c, p)).collect();
    let mut perm: Vec<usize> = (0..xs.len()).collect();
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), rng);
    xs.iter()
        .zip(&parts)
        .zip(&perm)
        .map(|((c, cp), &k)| model.add_coords(&model.add_coords(c, &model.neg_coords(cp)), &parts[k]))
        .collect()
}

fn random_sum<R: Rng>(elems: &[Coords], max_card: usize, rng: &mut R) -> Vec<Coords> {
    let k = rng.gen_range(0..=max_card);
    (0..k).map(|_| elems[rng.gen_range(0..elems.len())].clone()).collect()
}

fn sum_of(model: &Arc<BrauerGroupModel>, cs: Vec<Coords>) -> Result<MotiveSum> {
    MotiveSum::from_coords(model, cs.into_iter().map(|c| (c, 1)))
}

/// `x ⊕ n ≅ y ⊕ n ⟺ x ≅ y` for all effective sums of cardinality at most `max_card`.
pub fn verify_sum_cancellation(
    model: &Arc<BrauerGroupModel>,
    max_card: usize,
    cfg: &VerifierConfig,
) -> Result<VerificationRun> {
    let elems = finite_elements(model)?;
    let count = count_multisets(elems.len(), max_card);
    let mode = if count <= cfg.multiset_frontier as u128 { Mode::Exhaustive } else { Mode::Random };
    let bounds = Bounds {
        max_cardinality: Some(max_card),
        group_order: Some(elems.len() as u64),
        trials: (mode == Mode::Random).then_some(cfg.random_trials),
        frontier: Some(cfg.multiset_frontier as u64),
        ..Bounds::default()
    };
    let mut run = VerificationRun::new("sum-cancellation", model, mode, bounds, cfg.seed);
    match mode {
        Mode::Exhaustive => {
            let sums = all_multisets(model, &elems, max_card)?;
            let base = labels_by_key(sums.iter().map(MotiveSum::isomorphism_key));
            for n in &sums {
                let padded = sums.iter().map(|x| x.direct_sum(n)).collect::<Result<Vec<_>>>()?;
                let labels = labels_by_key(padded.iter().map(MotiveSum::isomorphism_key));
                run.checks += (sums.len() * sums.len()) as u64;
                if let Some((i, j)) = first_disagreement(&base, &labels) {
                    run.fail(Witness::SumCancellation {
                        x: MotiveSumDoc::from_sum(&sums[i]),
                        y: MotiveSumDoc::from_sum(&sums[j]),
                        n: MotiveSumDoc::from_sum(n),
                    });
                    return Ok(run);
                }
            }
        }
        Mode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.random_trials {
                let xs = random_sum(&elems, max_card, &mut rng);
                let ys = if rng.gen_bool(0.5) {
                    scramble(model, &xs, &mut rng)
                } else {
                    random_sum(&elems, max_card, &mut rng)
                };
                let ns = random_sum(&elems, max_card, &mut rng);
                let (x, y, n) = (sum_of(model, xs)?, sum_of(model, ys)?, sum_of(model, ns)?);
                run.checks += 1;
                if x.is_isomorphic(&y) != x.direct_sum(&n)?.is_isomorphic(&y.direct_sum(&n)?) {
                    run.fail(Witness::SumCancellation {
                        x: MotiveSumDoc::from_sum(&x),
                        y: MotiveSumDoc::from_sum(&y),
                        n: MotiveSumDoc::from_sum(&n),
                    });
                    return Ok(run);
                }
            }
        }
    }
    Ok(run)
}

/// Motive multiset of a quadric of dimension `n_dim` with Clifford class `c`:
/// `(n-2)·{0} ⊎ 2·{c}` for even `n`, `(n-2)·{0} ⊎ {c}` for odd `n`.
pub fn quadric_factor(model: &Arc<BrauerGroupModel>, c: &Coords, n_dim: u64) -> Result<MotiveSum> {
    MotiveSum::from_coords(
        model,
        [
            (model.identity_coords(), n_dim - 2),
            (c.clone(), if n_dim % 2 == 0 { 2 } else { 1 }),
        ],
    )
}

/// `x ⊗ Q_c ≅ y ⊗ Q_c ⟹ x ≅ y` for every 2-torsion `c` and all effective sums of
/// cardinality at most `max_card`. With `assert = false` the suite runs as a probe:
/// the outcome is reported but never counts as a failure, and `n_dim < 5` is allowed.
pub fn verify_tensor_cancellation(
    model: &Arc<BrauerGroupModel>,
    n_dim: u64,
    max_card: usize,
    assert: bool,
    cfg: &VerifierConfig,
) -> Result<VerificationRun> {
    if n_dim < 3 {
        return Err(Error::Argument(format!("quadric dimension must be >= 3, got {n_dim}")));
    }
    if assert && n_dim < 5 {
        return Err(Error::Domain(format!(
            "tensor cancellation is only asserted for n >= 5 (got {n_dim}); run it as a probe"
        )));
    }
    let elems = finite_elements(model)?;
    let twos: Vec<Coords> = elems.iter().filter(|c| model.order_of(c) <= 2).cloned().collect();
    let count = count_multisets(elems.len(), max_card);
    let mode = if count <= cfg.multiset_frontier as u128 { Mode::Exhaustive } else { Mode::Random };
    let bounds = Bounds {
        max_cardinality: Some(max_card),
        group_order: Some(elems.len() as u64),
        n_dim: Some(n_dim),
        trials: (mode == Mode::Random).then_some(cfg.random_trials),
        frontier: Some(cfg.multiset_frontier as u64),
        ..Bounds::default()
    };
    let suite = if assert { "tensor-cancellation" } else { "tensor-cancellation-probe" };
    let mut run = VerificationRun::new(suite, model, mode, bounds, cfg.seed);
    run.asserted = assert;
    match mode {
        Mode::Exhaustive => {
            let sums = all_multisets(model, &elems, max_card)?;
            let base = labels_by_key(sums.iter().map(MotiveSum::isomorphism_key));
            for c in &twos {
                let q = quadric_factor(model, c, n_dim)?;
                let tensored = sums.iter().map(|x| x.tensor(&q)).collect::<Result<Vec<_>>>()?;
                let labels = labels_by_key(tensored.iter().map(MotiveSum::isomorphism_key));
                run.checks += (sums.len() * sums.len()) as u64;
                // a block of the tensored partition must lie inside one block of the base partition
                if let Some(i) = (0..sums.len()).find(|&i| base[labels[i]] != base[i]) {
                    run.fail(Witness::TensorCancellation {
                        x: MotiveSumDoc::from_sum(&sums[labels[i]]),
                        y: MotiveSumDoc::from_sum(&sums[i]),
                        c: CoordsDoc::from_coords(c),
                        n_dim,
                    });
                    break;
                }
            }
        }
        Mode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.random_trials {
                let c = &twos[rng.gen_range(0..twos.len())];
                let q = quadric_factor(model, c, n_dim)?;
                let x = sum_of(model, random_sum(&elems, max_card, &mut rng))?;
                let y = sum_of(model, random_sum(&elems, max_card, &mut rng))?;
                run.checks += 1;
                if x.tensor(&q)?.is_isomorphic(&y.tensor(&q)?) && !x.is_isomorphic(&y) {
                    run.fail(Witness::TensorCancellation {
                        x: MotiveSumDoc::from_sum(&x),
                        y: MotiveSumDoc::from_sum(&y),
                        c: CoordsDoc::from_coords(c),
                        n_dim,
                    });
                    break;
                }
            }
        }
    }
    if !assert {
        run.notes.push(match run.outcome {
            Outcome::Pass => format!("probe: cancellation survives at n = {n_dim} on this model"),
            _ => format!("probe: cancellation fails at n = {n_dim}; reported, not asserted"),
        });
    }
    Ok(run)
}

/// Multiplicity of `Σ_{s∈S} c_s` in the product decomposition, for `|S| = s`.
fn subset_weight(n_dim: u64, m: usize, s: usize) -> u64 {
    let clifford = if n_dim % 2 == 0 { 2u64 } else { 1 };
    clifford.pow(s as u32) * (n_dim - 2).pow((m - s) as u32)
}

/// Class-level multiset of `∏ Q_{q_j}` for classes `c_j ∈ (ℤ/2)^d` given as bitmasks:
/// `⊎_{S ⊆ {1..m}} w(|S|) · {Σ_{s∈S} c_s}`.
pub fn product_decomposition(family: &[u32], d: u32, n_dim: u64) -> Vec<u64> {
    let m = family.len();
    let weights: Vec<u64> = (0..=m).map(|s| subset_weight(n_dim, m, s)).collect();
    let mut counts = vec![0u64; 1 << d];
    for subset in 0u32..(1 << m) {
        let mut x = 0u32;
        for (j, &c) in family.iter().enumerate() {
            if subset >> j & 1 == 1 {
                x ^= c;
            }
        }
        counts[x as usize] += weights[subset.count_ones() as usize];
    }
    counts
}

fn mask_coords(mask: u32, d: u32) -> Coords {
    Coords::Residues((0..d).map(|i| u64::from(mask >> i & 1)).collect())
}

/// For families of `m` classes in `(ℤ/2)^d`, equal product decompositions force equal
/// families (as multisets). Families are enumerated in full, without symmetry reduction.
pub fn verify_quadric_product_matching(
    d: u32,
    m: usize,
    n_dim: u64,
    i3_regime: bool,
    cfg: &VerifierConfig,
) -> Result<VerificationRun> {
    if m == 0 || m > 5 {
        return Err(Error::Domain(format!("matching is only claimed for 1 <= m <= 5, got {m}")));
    }
    if n_dim < 5 || (n_dim != 6 && !i3_regime) {
        return Err(Error::Domain(format!(
            "matching needs n = 6, or n >= 5 in the I^3 = 0 regime (got n = {n_dim})"
        )));
    }
    if d == 0 || d > 8 {
        return Err(Error::Argument(format!("d must lie in 1..=8, got {d}")));
    }
    let families_total = count_multisets(1 << d, m) - count_multisets(1 << d, m - 1);
    if families_total > cfg.family_frontier as u128 {
        return Err(Error::Resource(format!(
            "{families_total} families exceed the frontier {}",
            cfg.family_frontier
        )));
    }
    let model = BrauerGroupModel::elementary_two(d as usize);
    let bounds = Bounds {
        m: Some(m),
        d: Some(d),
        n_dim: Some(n_dim),
        frontier: Some(cfg.family_frontier),
        ..Bounds::default()
    };
    let mut run = VerificationRun::new("quadric-product-matching", &model, Mode::Exhaustive, bounds, cfg.seed);
    run.notes.push(format!("{families_total} families enumerated without symmetry reduction"));
    let to_docs = |f: &[u32]| f.iter().map(|&x| CoordsDoc::from_coords(&mask_coords(x, d))).collect::<Vec<_>>();

    // the subset expansion must agree with the tensor product of quadric motives
    let stride = (families_total as usize / cfg.tensor_crosschecks.max(1)).max(1);
    for family in (0u32..1 << d).combinations_with_replacement(m).step_by(stride) {
        let mut acc = MotiveSum::from_coords(&model, [(model.identity_coords(), 1)])?;
        for &c in &family {
            acc = acc.tensor(&quadric_factor(&model, &mask_coords(c, d), n_dim)?)?;
        }
        let counts = product_decomposition(&family, d, n_dim);
        let agree = (0u32..1 << d).all(|x| acc.multiplicity(&mask_coords(x, d)) == counts[x as usize]);
        if !agree {
            run.fail(Witness::DecompositionMismatch {
                n_dim,
                family: to_docs(&family),
            });
            return Ok(run);
        }
    }

    let mut seen: HashMap<Vec<u64>, Vec<u32>> = HashMap::with_capacity(families_total as usize);
    for family in (0u32..1 << d).combinations_with_replacement(m) {
        let sig = product_decomposition(&family, d, n_dim);
        run.checks += 1;
        if let Some(prev) = seen.get(&sig) {
            run.fail(Witness::QuadricFamilies {
                n_dim,
                first: to_docs(prev),
                second: to_docs(&family),
            });
            return Ok(run);
        }
        seen.insert(sig, family);
    }
    Ok(run)
}

fn random_raw<R: Rng>(elems: &[Coords], rng: &mut R) -> Vec<(Coords, i64)> {
    let len = rng.gen_range(1..=6);
    (0..len)
        .map(|_| {
            let k = loop {
                let k = rng.gen_range(-3i64..=3);
                if k != 0 {
                    break k;
                }
            };
            (elems[rng.gen_range(0..elems.len())].clone(), k)
        })
        .collect()
}

/// Random rewrite orders reach the canonical normal form.
pub fn verify_normal_form_confluence(
    model: &Arc<BrauerGroupModel>,
    trials: u64,
    cfg: &VerifierConfig,
) -> Result<VerificationRun> {
    let elems = finite_elements(model)?;
    let bounds = Bounds {
        trials: Some(trials),
        group_order: Some(elems.len() as u64),
        ..Bounds::default()
    };
    let mut run = VerificationRun::new("normal-form-confluence", model, Mode::Random, bounds, cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut moves = 0usize;
    for _ in 0..trials {
        let trial_seed = rng.next_u64();
        let (raw, merges, ok, used) = confluence_trial(model, &elems, trial_seed)?;
        moves += used;
        run.checks += 1;
        if !ok {
            run.fail(Witness::NormalForm {
                raw: raw
                    .iter()
                    .map(|(c, k)| TermDoc {
                        class: CoordsDoc::from_coords(c),
                        coeff: *k,
                    })
                    .collect(),
                trial_seed,
                merges,
            });
            return Ok(run);
        }
    }
    run.notes.push(format!("{moves} rewrite moves applied in total"));
    Ok(run)
}

type Trial = (Vec<(Coords, i64)>, usize, bool, usize);

fn confluence_trial(model: &Arc<BrauerGroupModel>, elems: &[Coords], trial_seed: u64) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let raw = random_raw(elems, &mut rng);
    let merges = rng.gen_range(0..=8);
    let (terms, used) = RewriteEngine::new(model, merges).run(&raw, &mut rng)?;
    let canonical = RBElement::normalize(model, raw.clone())?;
    let ok = terms.iter().map(|(c, &k)| (c, k)).eq(canonical.terms());
    Ok((raw, merges, ok, used))
}

/// Re-checks a counterexample witness; `true` when the failure reproduces.
pub fn replay(run: &VerificationRun) -> Result<bool> {
    let Some(w) = run.witness() else {
        return Ok(false);
    };
    let model = run.model.to_model()?;
    Ok(match w {
        Witness::RelationMismatch { x, y, .. } => {
            let (x, y) = (x.to_sum(&model)?, y.to_sum(&model)?);
            let t = Table::new(&model)?;
            let k = x.cardinality() as usize;
            let sets: Vec<Vec<usize>> = (0..t.elems.len()).combinations_with_replacement(k).collect();
            let pos = |s: &MotiveSum| {
                let mut v: Vec<usize> = s
                    .entries()
                    .flat_map(|(c, m)| std::iter::repeat_n(t.elems.iter().position(|e| e == c).unwrap(), m as usize))
                    .collect();
                v.sort_unstable();
                sets.iter().position(|s| *s == v).unwrap()
            };
            let closure = relation_closure_labels(&t, &sets);
            let together = closure[pos(&x)] == closure[pos(&y)];
            let iso = x.is_isomorphic(&y);
            let nf = RBElement::from_motive_sum(&x) == RBElement::from_motive_sum(&y);
            !(together == iso && iso == nf)
        }
        Witness::SumCancellation { x, y, n } => {
            let (x, y, n) = (x.to_sum(&model)?, y.to_sum(&model)?, n.to_sum(&model)?);
            x.is_isomorphic(&y) != x.direct_sum(&n)?.is_isomorphic(&y.direct_sum(&n)?)
        }
        Witness::TensorCancellation { x, y, c, n_dim } => {
            let (x, y) = (x.to_sum(&model)?, y.to_sum(&model)?);
            let q = quadric_factor(&model, &c.to_coords()?, *n_dim)?;
            x.tensor(&q)?.is_isomorphic(&y.tensor(&q)?) && !x.is_isomorphic(&y)
        }
        Witness::QuadricFamilies { n_dim, first, second } => {
            let d = run.bounds.d.unwrap_or(0);
            let masks = |v: &[CoordsDoc]| -> Result<Vec<u32>> {
                v.iter()
                    .map(|c| match c.to_coords()? {
                        Coords::Residues(r) => Ok(r.iter().enumerate().map(|(i, &b)| (b as u32) << i).sum()),
                        Coords::Local(_) => Err(Error::Argument("expected residues".into())),
                    })
                    .collect()
            };
            let (mut a, mut b) = (masks(first)?, masks(second)?);
            a.sort_unstable();
            b.sort_unstable();
            a != b && product_decomposition(&a, d, *n_dim) == product_decomposition(&b, d, *n_dim)
        }
        Witness::DecompositionMismatch { .. } => true,
        Witness::NormalForm { trial_seed, .. } => {
            let elems = finite_elements(&model)?;
            !confluence_trial(&model, &elems, *trial_seed)?.2
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> VerifierConfig {
        VerifierConfig::default()
    }

    fn group(orders: &[u64]) -> Arc<BrauerGroupModel> {
        BrauerGroupModel::abstract_group(orders).unwrap()
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(count_multisets(12, 3), 455);
        assert_eq!(count_multisets(8, 3), 165);
        let g = group(&[3]);
        let elems = g.elements().unwrap();
        assert_eq!(all_multisets(&g, &elems, 2).unwrap().len(), 1 + 3 + 6);
    }

    #[test]
    fn relation_equivalence_small() {
        for orders in [&[6][..], &[2, 2], &[30]] {
            let run = verify_relation_equivalence(&group(orders), 2, &cfg()).unwrap();
            assert!(run.passed(), "{orders:?}: {:?}", run.outcome);
        }
        assert!(verify_relation_equivalence(&group(&[2, 2]), 3, &cfg()).unwrap().passed());
        assert!(matches!(
            verify_relation_equivalence(&group(&[101]), 2, &cfg()),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn basic_relation_alone_is_too_weak() {
        // only c = 0 instances: Z/30 sums {16, 25} and {10, 1} stay apart
        let g = group(&[30]);
        let t = Table::new(&g).unwrap();
        let sets: Vec<Vec<usize>> = (0..30).combinations_with_replacement(2).collect();
        let idx = |a: usize, b: usize| sets.iter().position(|s| *s == vec![a.min(b), a.max(b)]).unwrap();
        let mut uf = UnionFind::new(sets.len());
        for a in 0..30 {
            for b in 0..30 {
                if gcd(t.order[a], t.order[b]) == 1 {
                    uf.union(idx(0, t.add[a][b]), idx(a, b));
                }
            }
        }
        assert_ne!(uf.find(idx(16, 25)), uf.find(idx(10, 1)));
        let full = relation_closure_labels(&t, &sets);
        assert_eq!(full[idx(16, 25)], full[idx(10, 1)]);
        let x = MotiveSum::from_residues(&g, &[&[16], &[25]]).unwrap();
        let y = MotiveSum::from_residues(&g, &[&[10], &[1]]).unwrap();
        assert!(x.is_isomorphic(&y));
    }

    #[test]
    fn sum_cancellation_examples() {
        assert!(verify_sum_cancellation(&group(&[2, 2, 2]), 2, &cfg()).unwrap().passed());
        assert!(verify_sum_cancellation(&BrauerGroupModel::trivial(), 3, &cfg()).unwrap().passed());
        let small = VerifierConfig {
            multiset_frontier: 10,
            random_trials: 500,
            ..cfg()
        };
        let run = verify_sum_cancellation(&group(&[12]), 4, &small).unwrap();
        assert_eq!(run.mode, Mode::Random);
        assert!(run.passed());
    }

    #[test]
    fn tensor_cancellation_and_probe() {
        let v = group(&[2, 2]);
        assert!(verify_tensor_cancellation(&v, 6, 2, true, &cfg()).unwrap().passed());
        assert!(matches!(
            verify_tensor_cancellation(&v, 4, 2, true, &cfg()),
            Err(Error::Domain(_))
        ));
        let probe = verify_tensor_cancellation(&v, 4, 2, false, &cfg()).unwrap();
        assert!(!probe.passed());
        assert_eq!(probe.exit_code(), 0);
        assert!(replay(&probe).unwrap());
    }

    #[test]
    fn decomposition_matches_hand_count() {
        // one quadric of dimension 6: 4·{0} ⊎ 2·{c}
        assert_eq!(product_decomposition(&[1], 1, 6), vec![4, 2]);
        // two equal classes: 16·{0} + 8·{c} + 8·{c} + 4·{0}
        assert_eq!(product_decomposition(&[1, 1], 1, 6), vec![20, 16]);
        assert_eq!(product_decomposition(&[1, 2], 2, 5), vec![9, 3, 3, 1]);
    }

    #[test]
    fn quadric_matching_small() {
        assert!(verify_quadric_product_matching(2, 2, 6, false, &cfg()).unwrap().passed());
        assert!(verify_quadric_product_matching(3, 3, 6, false, &cfg()).unwrap().passed());
        assert!(matches!(
            verify_quadric_product_matching(2, 6, 6, false, &cfg()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            verify_quadric_product_matching(2, 2, 8, false, &cfg()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn confluence_runs_are_deterministic() {
        let g = group(&[6]);
        let a = verify_normal_form_confluence(&g, 200, &cfg()).unwrap();
        let b = verify_normal_form_confluence(&g, 200, &cfg()).unwrap();
        assert!(a.passed());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(verify_normal_form_confluence(&group(&[8]), 50, &cfg()).unwrap().passed());
    }

    #[test]
    fn certificates_round_trip() {
        let run = verify_tensor_cancellation(&group(&[2, 2]), 4, 1, false, &cfg()).unwrap();
        let text = serde_json::to_string(&run).unwrap();
        let back: VerificationRun = serde_json::from_str(&text).unwrap();
        assert_eq!(back, run);
        assert!(replay(&back).unwrap());
    }
}
