//! Twisted flag varieties, their Tits-algebra measures, and the deduction rules
//! that turn equal measures into isomorphism statements.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::brauer::{generated_subgroup, same_model, BrauerClass, BrauerGroupModel, CSAlgebra, GroupKind};
use crate::error::{Error, Result};
use crate::forms::{FormShadow, QuadraticForm};
use crate::motives::MotiveSum;
use crate::ring::RBElement;
use crate::sigma;

/// `Gr(d; A)` with `1 <= d < deg A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grassmannian {
    d: u64,
    alg: CSAlgebra,
}

impl Grassmannian {
    pub fn new(d: u64, alg: CSAlgebra) -> Result<Self> {
        if d == 0 || d >= alg.degree() {
            return Err(Error::Descriptor(format!(
                "Grassmannian needs 1 <= d < deg = {}, got d = {d}",
                alg.degree()
            )));
        }
        Ok(Self { d, alg })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn alg(&self) -> &CSAlgebra {
        &self.alg
    }
}

/// Quadric `Q_q`, given by its Brauer shadow and optionally by the form itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadric {
    shadow: FormShadow,
    form: Option<QuadraticForm>,
}

impl Quadric {
    pub fn from_shadow(shadow: FormShadow) -> Self {
        Self { shadow, form: None }
    }

    /// Quadric of a concrete form over ℚ; the form must have trivial signed discriminant.
    pub fn from_form(form: QuadraticForm, model: &Arc<BrauerGroupModel>, i3_zero: bool) -> Result<Self> {
        if *model.kind() != GroupKind::RationalField {
            return Err(Error::Descriptor("concrete forms need the Br(Q) model".into()));
        }
        if form.dim() < 3 {
            return Err(Error::Descriptor(format!("quadric needs dim >= 3, got {}", form.dim())));
        }
        if !form.has_trivial_discriminant() {
            return Err(Error::Descriptor(format!(
                "quadric form must have trivial signed discriminant, got {}",
                form.signed_discriminant()
            )));
        }
        let shadow = FormShadow::from_form(&form, model, i3_zero).map_err(|e| Error::Descriptor(e.to_string()))?;
        Ok(Self {
            shadow,
            form: Some(form),
        })
    }

    pub fn shadow(&self) -> &FormShadow {
        &self.shadow
    }

    pub fn form(&self) -> Option<&QuadraticForm> {
        self.form.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.shadow.dim()
    }
}

/// `Iv(A, *)` for an orthogonal involution with trivial discriminant on `A` of even degree >= 6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    deg: u64,
    alg_class: BrauerClass,
    cplus: BrauerClass,
    cminus: BrauerClass,
    i3_zero: bool,
}

impl Involution {
    /// Checks the relations between `[A]` and the classes `[C₀^±(A,*)]`:
    /// for `deg ≡ 2 (mod 4)`, `2c₊ = [A]`, `3c₊ = c₋` and `4c₊ = 0`;
    /// for `deg ≡ 0 (mod 4)`, `2c₊ = 2c₋ = 0` and `c₊ + c₋ = [A]`.
    pub fn new(
        deg: u64,
        alg_class: BrauerClass,
        cplus: BrauerClass,
        cminus: BrauerClass,
        i3_zero: bool,
    ) -> Result<Self> {
        if deg < 6 || deg % 2 != 0 {
            return Err(Error::Descriptor(format!(
                "involution varieties need even degree >= 6, got {deg}"
            )));
        }
        if !same_model(alg_class.model(), cplus.model()) || !same_model(alg_class.model(), cminus.model()) {
            return Err(Error::Descriptor("involution classes from different models".into()));
        }
        CSAlgebra::new(alg_class.clone(), deg).map_err(|e| Error::Descriptor(e.to_string()))?;
        let rel = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Descriptor(format!(
                    "involution relation violated for deg {deg}: {what}"
                )))
            }
        };
        if deg % 4 == 2 {
            rel(cplus.scale(2) == alg_class, "2c+ = [A]")?;
            rel(cplus.scale(3) == cminus, "3c+ = c-")?;
            rel(cplus.scale(4).is_identity(), "4c+ = 0")?;
        } else {
            rel(cplus.scale(2).is_identity(), "2c+ = 0")?;
            rel(cminus.scale(2).is_identity(), "2c- = 0")?;
            rel(cplus.add(&cminus)? == alg_class, "c+ + c- = [A]")?;
        }
        Ok(Self {
            deg,
            alg_class,
            cplus,
            cminus,
            i3_zero,
        })
    }

    pub fn deg(&self) -> u64 {
        self.deg
    }

    pub fn alg_class(&self) -> &BrauerClass {
        &self.alg_class
    }

    pub fn cplus(&self) -> &BrauerClass {
        &self.cplus
    }

    pub fn cminus(&self) -> &BrauerClass {
        &self.cminus
    }

    pub fn i3_zero(&self) -> bool {
        self.i3_zero
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarietyDescriptor {
    SeveriBrauer(CSAlgebra),
    Grassmannian(Grassmannian),
    Quadric(Quadric),
    Involution(Involution),
    Product(Vec<VarietyDescriptor>),
}

impl VarietyDescriptor {
    /// Group model of the descriptor; `None` for an empty product.
    pub fn model(&self) -> Option<&Arc<BrauerGroupModel>> {
        match self {
            Self::SeveriBrauer(a) => Some(a.class().model()),
            Self::Grassmannian(g) => Some(g.alg.class().model()),
            Self::Quadric(q) => Some(q.shadow.clifford_class().model()),
            Self::Involution(iv) => Some(iv.alg_class.model()),
            Self::Product(xs) => xs.first().and_then(Self::model),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Product(xs) = self {
            let Some(first) = xs.first() else {
                return Err(Error::Descriptor("empty product".into()));
            };
            let model = first.model().cloned();
            for x in xs {
                x.validate()?;
                if let (Some(a), Some(b)) = (&model, x.model()) {
                    if !same_model(a, b) {
                        return Err(Error::Descriptor("product factors use different group models".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Leaves of nested products, in order.
    pub fn factors(&self) -> Vec<&VarietyDescriptor> {
        match self {
            Self::Product(xs) => xs.iter().flat_map(|x| x.factors()).collect(),
            other => vec![other],
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::SeveriBrauer(_) => "severi_brauer",
            Self::Grassmannian(_) => "grassmannian",
            Self::Quadric(_) => "quadric",
            Self::Involution(_) => "involution",
            Self::Product(_) => "product",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureReport {
    pub jt: RBElement,
    pub jt_effective: MotiveSum,
    pub rho: u64,
    pub dim: u64,
}

/// Number of partitions of each size fitting in a `rows × cols` box (coefficients of
/// the Gaussian binomial).
pub fn box_partition_counts(rows: u64, cols: u64) -> Vec<u64> {
    let (rows, cols) = (rows as usize, cols as usize);
    let mut table = vec![vec![0u64; rows * cols + 1]; rows + 1];
    // table[r][s]: partitions of s into at most r parts, each at most the current column
    for row in table.iter_mut() {
        row[0] = 1;
    }
    for c in 1..=cols {
        let mut next = vec![vec![0u64; rows * cols + 1]; rows + 1];
        next[0][0] = 1;
        for r in 1..=rows {
            for s in 0..=rows * cols {
                // either no part equals c (table[r][s]) or remove one part equal to c
                let keep = table[r][s];
                let take = if s >= c { next[r - 1][s - c] } else { 0 };
                next[r][s] = keep + take;
            }
        }
        table = next;
    }
    let mut out = table[rows].clone();
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn measure_leaf(v: &VarietyDescriptor) -> Result<(MotiveSum, u64)> {
    match v {
        VarietyDescriptor::SeveriBrauer(a) => {
            let model = a.class().model();
            let mut s = MotiveSum::empty(model);
            for i in 0..a.degree() {
                s.push(&a.class().scale(i as i64), 1)?;
            }
            Ok((s, a.degree() - 1))
        }
        VarietyDescriptor::Grassmannian(g) => {
            let n = g.alg.degree();
            let model = g.alg.class().model();
            let mut s = MotiveSum::empty(model);
            for (size, &count) in box_partition_counts(g.d, n - g.d).iter().enumerate() {
                s.push(&g.alg.class().scale(size as i64), count)?;
            }
            Ok((s, g.d * (n - g.d)))
        }
        VarietyDescriptor::Quadric(q) => {
            let n = q.dim() as u64;
            let c = q.shadow.clifford_class();
            let mut s = MotiveSum::empty(c.model());
            s.push(&c.model().identity(), n - 2)?;
            s.push(c, if n % 2 == 0 { 2 } else { 1 })?;
            Ok((s, n - 2))
        }
        VarietyDescriptor::Involution(iv) => {
            let half = (iv.deg - 2) / 2;
            let mut s = MotiveSum::empty(iv.alg_class.model());
            s.push(&iv.alg_class.model().identity(), half)?;
            s.push(&iv.alg_class, half)?;
            s.push(&iv.cplus, 1)?;
            s.push(&iv.cminus, 1)?;
            Ok((s, iv.deg))
        }
        VarietyDescriptor::Product(xs) => {
            let mut iter = xs.iter();
            let first = iter.next().ok_or_else(|| Error::Descriptor("empty product".into()))?;
            let (mut acc, mut dim) = measure_leaf(first)?;
            for x in iter {
                let (s, d) = measure_leaf(x)?;
                acc = acc.tensor(&s)?;
                dim += d;
            }
            Ok((acc, dim))
        }
    }
}

/// `μ_JT` together with `μ_ρ` and the dimension bookkeeping.
pub fn tits_measure(v: &VarietyDescriptor) -> Result<MeasureReport> {
    v.validate()?;
    let (jt_effective, dim) = measure_leaf(v)?;
    Ok(MeasureReport {
        jt: RBElement::from_motive_sum(&jt_effective),
        rho: jt_effective.cardinality(),
        jt_effective,
        dim,
    })
}

/// `μ_ρ`, computed from the family data without building the multiset.
pub fn rank_measure(v: &VarietyDescriptor) -> Result<u64> {
    v.validate()?;
    Ok(match v {
        VarietyDescriptor::SeveriBrauer(a) => a.degree(),
        VarietyDescriptor::Grassmannian(g) => {
            let n = g.alg.degree();
            (0..g.d).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
        }
        VarietyDescriptor::Quadric(q) => {
            let n = q.dim() as u64;
            if n % 2 == 0 {
                n
            } else {
                n - 1
            }
        }
        VarietyDescriptor::Involution(iv) => iv.deg,
        VarietyDescriptor::Product(xs) => {
            let mut acc = 1u64;
            for x in xs {
                acc = acc
                    .checked_mul(rank_measure(x)?)
                    .ok_or_else(|| Error::Resource("rank overflow".into()))?;
            }
            acc
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub measures_equal: bool,
    pub rho_equal: bool,
    pub dims_equal: bool,
    pub subgroups_equal: bool,
}

fn check_pair(x: &VarietyDescriptor, y: &VarietyDescriptor) -> Result<()> {
    x.validate()?;
    y.validate()?;
    match (x.model(), y.model()) {
        (Some(a), Some(b)) if same_model(a, b) => Ok(()),
        _ => Err(Error::Argument("descriptors use different group models".into())),
    }
}

fn tits_subgroup(s: &MotiveSum) -> Result<BTreeSet<BrauerClass>> {
    generated_subgroup(s.model(), &s.support())
}

pub fn compare(x: &VarietyDescriptor, y: &VarietyDescriptor) -> Result<ComparisonVerdict> {
    check_pair(x, y)?;
    let (mx, my) = (tits_measure(x)?, tits_measure(y)?);
    Ok(ComparisonVerdict {
        measures_equal: mx.jt_effective.is_isomorphic(&my.jt_effective),
        rho_equal: mx.rho == my.rho,
        dims_equal: mx.dim == my.dim,
        subgroups_equal: tits_subgroup(&mx.jt_effective)? == tits_subgroup(&my.jt_effective)?,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeduceOptions {
    /// The caller asserts `[X] = [Y]` in `K₀Var(k)`.
    pub assume_equal_k0: bool,
    /// The two conic factors of the left product are unlinked (`ind(Q ⊗ Q') = 4`).
    pub unlinked: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deduction {
    pub conclusion: String,
    pub rule: String,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeductionReport {
    pub basis: String,
    pub measures_equal: bool,
    pub deductions: Vec<Deduction>,
}

impl DeductionReport {
    pub fn has_rule(&self, rule: &str) -> bool {
        self.deductions.iter().any(|d| d.rule == rule)
    }
}

struct Out(Vec<Deduction>);

impl Out {
    fn push(&mut self, conclusion: impl Into<String>, rule: &str, citation: &str) {
        self.0.push(Deduction {
            conclusion: conclusion.into(),
            rule: rule.into(),
            citation: citation.into(),
        });
    }
}

const SB_CITE: &str = "Severi-Brauer application";
const GR_CITE: &str = "twisted Grassmannian application";
const CONIC_CITE: &str = "products-of-conics application";
const QUADRIC_CITE: &str = "quadric application";
const QPROD_CITE: &str = "products-of-quadrics application";
const IV_CITE: &str = "involution-variety application";

fn cite(base: &str, item: &str) -> String {
    format!("{base}, item ({item})")
}

/// Applies the deduction rules for the shape of `(x, y)`.
///
/// Every rule starts from equality of the Tits measures, which follows from
/// `[X] = [Y]` in `K₀Var(k)`. When the measures differ the only conclusion is that
/// the Grothendieck classes differ; if the caller asserted equal classes, that
/// premise is reported as contradicted.
pub fn deduce(x: &VarietyDescriptor, y: &VarietyDescriptor, opts: &DeduceOptions) -> Result<DeductionReport> {
    check_pair(x, y)?;
    let verdict = compare(x, y)?;
    let basis = if opts.assume_equal_k0 {
        "assumed equal Grothendieck classes"
    } else {
        "computed Tits measures"
    };
    let mut out = Out(Vec::new());
    let shape = Shape::of(x, y)?;
    if !verdict.measures_equal {
        if opts.assume_equal_k0 {
            out.push(
                "premise contradicted: the Tits measures differ, so the Grothendieck classes cannot be equal",
                "measure-invariance",
                "motivic measure property of the Tits-algebra assignment",
            );
        } else {
            out.push(
                "the Grothendieck classes differ",
                "measure-invariance",
                "motivic measure property of the Tits-algebra assignment",
            );
        }
        return Ok(DeductionReport {
            basis: basis.into(),
            measures_equal: false,
            deductions: out.0,
        });
    }
    match shape {
        Shape::Linear(a, b) => deduce_linear(a, b, &mut out),
        Shape::Quadrics(a, b) => deduce_quadrics(a, b, &mut out),
        Shape::Involutions(a, b) => deduce_involutions(a, b, &mut out),
        Shape::Conics(a, b) => deduce_conics(a, b, opts, &mut out)?,
        Shape::QuadricProducts(a, b) => deduce_quadric_products(&a, &b, &mut out)?,
    }
    Ok(DeductionReport {
        basis: basis.into(),
        measures_equal: true,
        deductions: out.0,
    })
}

enum Shape<'a> {
    /// `SB` or `Gr`, with `d = 1` for `SB`.
    Linear((u64, &'a CSAlgebra), (u64, &'a CSAlgebra)),
    Quadrics(&'a Quadric, &'a Quadric),
    Involutions(&'a Involution, &'a Involution),
    Conics([&'a CSAlgebra; 2], [&'a CSAlgebra; 2]),
    QuadricProducts(Vec<&'a Quadric>, Vec<&'a Quadric>),
}

impl<'a> Shape<'a> {
    fn of(x: &'a VarietyDescriptor, y: &'a VarietyDescriptor) -> Result<Self> {
        use VarietyDescriptor as V;
        let linear = |v: &'a V| match v {
            V::SeveriBrauer(a) => Some((1, a)),
            V::Grassmannian(g) => Some((g.d, &g.alg)),
            _ => None,
        };
        if let (Some(a), Some(b)) = (linear(x), linear(y)) {
            return Ok(Self::Linear(a, b));
        }
        match (x, y) {
            (V::Quadric(a), V::Quadric(b)) => return Ok(Self::Quadrics(a, b)),
            (V::Involution(a), V::Involution(b)) => return Ok(Self::Involutions(a, b)),
            (V::Product(_), V::Product(_)) => {}
            _ => {
                return Err(Error::Domain(format!(
                    "no deduction rule compares a {} with a {}",
                    x.family(),
                    y.family()
                )))
            }
        }
        let (fx, fy) = (x.factors(), y.factors());
        let conics = |fs: &[&'a V]| -> Option<[&'a CSAlgebra; 2]> {
            match fs {
                [V::SeveriBrauer(a), V::SeveriBrauer(b)] if a.degree() == 2 && b.degree() == 2 => Some([a, b]),
                _ => None,
            }
        };
        if let (Some(a), Some(b)) = (conics(&fx), conics(&fy)) {
            return Ok(Self::Conics(a, b));
        }
        let quadrics = |fs: &[&'a V]| -> Option<Vec<&'a Quadric>> {
            fs.iter()
                .map(|f| match f {
                    V::Quadric(q) => Some(q),
                    _ => None,
                })
                .collect()
        };
        if let (Some(a), Some(b)) = (quadrics(&fx), quadrics(&fy)) {
            let dims: BTreeSet<usize> = a.iter().chain(b.iter()).map(|q| q.dim()).collect();
            if dims.len() != 1 {
                return Err(Error::Domain("quadric products must use a single form dimension".into()));
            }
            return Ok(Self::QuadricProducts(a, b));
        }
        Err(Error::Domain(
            "products are only deduced for two conics or for quadrics of one dimension".into(),
        ))
    }
}

fn deduce_linear((d, a): (u64, &CSAlgebra), (d2, b): (u64, &CSAlgebra), out: &mut Out) {
    let sb = d == 1 && d2 == 1 && a.degree() == b.degree();
    let (base, pre) = if sb { (SB_CITE, "sb") } else { (GR_CITE, "gr") };
    out.push(
        format!("deg(A) = deg(A') = {}; equal dimensions", a.degree()),
        &format!("{pre}-degree"),
        &cite(base, "i"),
    );
    out.push(
        format!("<[A]> = <[A']>; per(A) = per(A') = {}", a.period()),
        &format!("{pre}-subgroup"),
        &cite(base, "ii"),
    );
    if a.class().is_two_torsion() {
        let what = if sb {
            "SB(A) ≅ SB(A')".to_string()
        } else {
            format!("Gr({d}; A) ≅ Gr({d2}; A')")
        };
        out.push(what, &format!("{pre}-two-torsion-isomorphism"), &cite(base, "iii"));
    }
    if sb && (3..=6).contains(&a.period()) {
        out.push(
            format!(
                "informational: SB(A) and SB(A') are birational (period {}; external result, not computed)",
                a.period()
            ),
            "sb-birational-note",
            &cite(SB_CITE, "iv"),
        );
    }
}

fn deduce_quadrics(a: &Quadric, b: &Quadric, out: &mut Out) {
    let n = a.dim();
    out.push(format!("n = n' = {n}; equal dimensions"), "quadric-dimension", &cite(QUADRIC_CITE, "i"));
    let which = if n % 2 == 0 { "C₀⁺(q) ≅ C₀⁺(q')" } else { "C₀(q) ≅ C₀(q')" };
    out.push(which, "quadric-clifford", &cite(QUADRIC_CITE, "ii"));
    if n == 6 {
        out.push("Q_q ≅ Q_q'", "quadric-dim6-isomorphism", &cite(QUADRIC_CITE, "iii"));
    }
    if a.shadow().i3_zero() && b.shadow().i3_zero() {
        out.push("Q_q ≅ Q_q' (I³(k) = 0)", "quadric-i3-isomorphism", &cite(QUADRIC_CITE, "iv"));
    }
}

fn deduce_involutions(a: &Involution, b: &Involution, out: &mut Out) {
    out.push(
        format!("deg(A) = deg(A') = {}; equal dimensions", a.deg),
        "involution-degree",
        &cite(IV_CITE, "i"),
    );
    let straight = a.cplus == b.cplus && a.cminus == b.cminus;
    let text = if straight {
        "C₀⁺(A,*) ≅ C₀⁺(A',*') and C₀⁻(A,*) ≅ C₀⁻(A',*')"
    } else {
        "C₀⁺(A,*) ≅ C₀⁻(A',*') and C₀⁻(A,*) ≅ C₀⁺(A',*')"
    };
    out.push(text, "involution-clifford", &cite(IV_CITE, "ii"));
    if a.deg == 6 {
        out.push("Iv(A,*) ≅ Iv(A',*')", "involution-deg6-isomorphism", &cite(IV_CITE, "iii"));
    }
    if a.i3_zero && b.i3_zero {
        out.push("Iv(A,*) ≅ Iv(A',*') (I³(k) = 0)", "involution-i3-isomorphism", &cite(IV_CITE, "iv"));
    }
}

fn deduce_conics(a: [&CSAlgebra; 2], b: [&CSAlgebra; 2], opts: &DeduceOptions, out: &mut Out) -> Result<()> {
    let shared: Vec<String> = a
        .iter()
        .enumerate()
        .flat_map(|(i, x)| {
            b.iter().enumerate().filter_map(move |(j, y)| {
                (x.class() == y.class()).then(|| format!("C{} ≅ C'{}", i + 1, j + 1))
            })
        })
        .collect();
    out.push(
        format!("the products share a conic: {}", shared.join(", ")),
        "conic-product-common-factor",
        &cite(CONIC_CITE, "i"),
    );
    let model = a[0].class().model();
    let pair = a[0].class().add(a[1].class())?;
    let oracle_unlinked = pair.index() == 4;
    let rational = *model.kind() == GroupKind::RationalField;
    if rational && opts.unlinked == Some(true) {
        out.push(
            "unlinked flag ignored: over Q every biquaternion class has index at most 2, so no two quaternion algebras are unlinked",
            "conic-product-unlinked-impossible",
            &cite(CONIC_CITE, "ii"),
        );
    } else if opts.unlinked == Some(true) || oracle_unlinked {
        out.push(
            "C(a,b) × C(a',b') ≅ C(a'',b'') × C(a''',b''')",
            "conic-product-unlinked-isomorphism",
            &cite(CONIC_CITE, "ii"),
        );
    }
    Ok(())
}

fn deduce_quadric_products(a: &[&Quadric], b: &[&Quadric], out: &mut Out) -> Result<()> {
    let n = a[0].dim() as i64;
    let m = a.len();
    if n < 5 {
        out.push(
            format!("no product rule applies: form dimension {n} < 5"),
            "quadric-product-dimension-too-small",
            &format!("{QPROD_CITE}, hypothesis n >= 5"),
        );
        return Ok(());
    }
    out.push(format!("m = m' = {m}; equal dimensions"), "quadric-product-count", &cite(QPROD_CITE, "i"));
    out.push(
        "the Clifford classes of both families generate the same subgroup",
        "quadric-product-subgroup",
        &cite(QPROD_CITE, "ii"),
    );
    let i3 = a.iter().chain(b.iter()).all(|q| q.shadow().i3_zero());
    if n == 6 && m <= 5 {
        out.push("∏ Q_{q_j} ≅ ∏ Q_{q'_j}", "quadric-product-dim6", &cite(QPROD_CITE, "iii"));
    }
    if i3 && m <= 5 {
        out.push("∏ Q_{q_j} ≅ ∏ Q_{q'_j} (I³(k) = 0)", "quadric-product-i3-small", &cite(QPROD_CITE, "iv"));
    }
    if i3 && m >= 6 {
        let cond = sigma::extra_condition(m as i64, n)?;
        match cond.first_failure() {
            None => out.push(
                "∏ Q_{q_j} ≅ ∏ Q_{q'_j} (I³(k) = 0, power-sum condition holds)",
                "quadric-product-i3-sigma",
                &cite(QPROD_CITE, "iv'"),
            ),
            Some(row) => out.push(
                format!(
                    "no conclusion; the power-sum condition fails at l = {} ({} <= {})",
                    row.l, row.sigma1, row.sigma2
                ),
                "quadric-product-sigma-unsatisfied",
                &cite(QPROD_CITE, "iv'"),
            ),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::Coords;
    use crate::rational;
    use crate::sigma::SigmaKind;

    fn sb(c: &BrauerClass, deg: u64) -> VarietyDescriptor {
        VarietyDescriptor::SeveriBrauer(CSAlgebra::new(c.clone(), deg).unwrap())
    }

    fn quadric(c: &BrauerClass, n: usize, i3: bool) -> VarietyDescriptor {
        VarietyDescriptor::Quadric(Quadric::from_shadow(FormShadow::new(n, c.clone(), i3).unwrap()))
    }

    #[test]
    fn box_partitions_are_gaussian_binomials() {
        assert_eq!(box_partition_counts(2, 2), vec![1, 1, 2, 1, 1]);
        assert_eq!(box_partition_counts(1, 4), vec![1, 1, 1, 1, 1]);
        assert_eq!(box_partition_counts(3, 0), vec![1]);
        for r in 0..6u64 {
            for c in 0..6u64 {
                let total: u64 = box_partition_counts(r, c).iter().sum();
                assert_eq!(total, crate::scalar::binomial::<i128>((r + c) as i64, r as i64) as u64);
            }
        }
    }

    #[test]
    fn severi_brauer_quaternion() {
        let q = BrauerGroupModel::rational();
        let a = BrauerClass::from_rational(&q, rational::quaternion_class_squarefree(-1, 3)).unwrap();
        let m = tits_measure(&sb(&a, 2)).unwrap();
        assert_eq!(m.rho, 2);
        assert_eq!(m.dim, 1);
        assert_eq!(m.jt_effective, MotiveSum::from_classes(&q, [&q.identity(), &a]).unwrap());
        assert_eq!(m.jt.augmentation(), 2);
    }

    #[test]
    fn grassmannian_example() {
        let z4 = BrauerGroupModel::abstract_group(&[4]).unwrap();
        let a = z4.residues(&[1]).unwrap();
        let g = VarietyDescriptor::Grassmannian(Grassmannian::new(2, CSAlgebra::new(a, 4).unwrap()).unwrap());
        let m = tits_measure(&g).unwrap();
        assert_eq!(m.rho, 6);
        assert_eq!(m.dim, 4);
        let want = MotiveSum::from_residues(&z4, &[&[0], &[1], &[2], &[2], &[3], &[0]]).unwrap();
        assert_eq!(m.jt_effective, want);
        assert!(Grassmannian::new(4, CSAlgebra::new(z4.residues(&[1]).unwrap(), 4).unwrap()).is_err());
    }

    #[test]
    fn quadric_examples() {
        let v = BrauerGroupModel::elementary_two(1);
        let c = v.residues(&[1]).unwrap();
        let m = tits_measure(&quadric(&c, 6, false)).unwrap();
        assert_eq!(m.rho, 6);
        assert_eq!(m.jt_effective.multiplicity(&Coords::Residues(vec![0])), 4);
        assert_eq!(m.jt_effective.multiplicity(&Coords::Residues(vec![1])), 2);
        assert_eq!(rank_measure(&quadric(&c, 7, false)).unwrap(), 6);
        let p = VarietyDescriptor::Product(vec![quadric(&c, 6, false), quadric(&c, 6, false)]);
        assert_eq!(rank_measure(&p).unwrap(), 36);
        assert_eq!(tits_measure(&p).unwrap().rho, 36);
        assert_eq!(tits_measure(&p).unwrap().dim, 8);
    }

    #[test]
    fn concrete_quadric() {
        let q = BrauerGroupModel::rational();
        let form = QuadraticForm::from_integers(&[1, 1, -1, 1, -3, -3]).unwrap();
        let quad = Quadric::from_form(form, &q, false).unwrap();
        assert_eq!(quad.dim(), 6);
        let bad = QuadraticForm::from_integers(&[1, 1, 1, 1, 1, 2]).unwrap();
        assert!(matches!(Quadric::from_form(bad, &q, false), Err(Error::Descriptor(_))));
        let z2 = BrauerGroupModel::elementary_two(1);
        let f = QuadraticForm::from_integers(&[1, -1, 1]).unwrap();
        assert!(Quadric::from_form(f, &z2, false).is_err());
    }

    #[test]
    fn involution_relations() {
        let z4 = BrauerGroupModel::abstract_group(&[4]).unwrap();
        let c = |r| z4.residues(&[r]).unwrap();
        assert!(Involution::new(6, c(2), c(1), c(3), false).is_ok());
        assert!(Involution::new(6, c(2), c(1), c(1), false).is_err());
        assert!(Involution::new(8, c(0), c(2), c(2), false).is_ok());
        assert!(Involution::new(8, c(2), c(1), c(1), false).is_err());
        assert!(Involution::new(5, c(0), c(0), c(0), false).is_err());
        let iv = VarietyDescriptor::Involution(Involution::new(6, c(2), c(1), c(3), false).unwrap());
        let m = tits_measure(&iv).unwrap();
        assert_eq!((m.rho, m.dim), (6, 6));
        assert_eq!(m.jt_effective, MotiveSum::from_residues(&z4, &[&[0], &[0], &[2], &[2], &[1], &[3]]).unwrap());
    }

    #[test]
    fn compare_examples() {
        let z6 = BrauerGroupModel::abstract_group(&[6]).unwrap();
        let a = z6.residues(&[1]).unwrap();
        let x = sb(&a, 6);
        let v = compare(&x, &x).unwrap();
        assert!(v.measures_equal && v.rho_equal && v.dims_equal && v.subgroups_equal);
        let z = z6.residues(&[0]).unwrap();
        let v = compare(&sb(&z, 2), &sb(&z, 3)).unwrap();
        assert!(!v.rho_equal && !v.measures_equal);
    }

    #[test]
    fn deduce_severi_brauer() {
        let v = BrauerGroupModel::elementary_two(2);
        let a = v.residues(&[1, 0]).unwrap();
        let opts = DeduceOptions {
            assume_equal_k0: true,
            unlinked: None,
        };
        let r = deduce(&sb(&a, 4), &sb(&a, 4), &opts).unwrap();
        assert!(r.has_rule("sb-two-torsion-isomorphism"));
        assert!(r.has_rule("sb-degree"));
        let z5 = BrauerGroupModel::abstract_group(&[5]).unwrap();
        let r = deduce(&sb(&z5.residues(&[1]).unwrap(), 5), &sb(&z5.residues(&[1]).unwrap(), 5), &opts).unwrap();
        assert!(r.has_rule("sb-birational-note"));
        assert!(!r.has_rule("sb-two-torsion-isomorphism"));
        let b = v.residues(&[0, 1]).unwrap();
        let r = deduce(&sb(&a, 2), &sb(&b, 2), &opts).unwrap();
        assert!(!r.measures_equal);
        assert!(r.has_rule("measure-invariance"));
    }

    #[test]
    fn deduce_conic_products() {
        let v = BrauerGroupModel::elementary_two(2);
        let (a, b) = (v.residues(&[1, 0]).unwrap(), v.residues(&[0, 1]).unwrap());
        let left = VarietyDescriptor::Product(vec![sb(&a, 2), sb(&b, 2)]);
        let right = VarietyDescriptor::Product(vec![sb(&b, 2), sb(&a, 2)]);
        let mut opts = DeduceOptions::default();
        let r = deduce(&left, &right, &opts).unwrap();
        assert!(r.has_rule("conic-product-common-factor"));
        assert!(!r.has_rule("conic-product-unlinked-isomorphism"));
        opts.unlinked = Some(true);
        let r = deduce(&left, &right, &opts).unwrap();
        assert!(r.has_rule("conic-product-unlinked-isomorphism"));

        let q = BrauerGroupModel::rational();
        let fam = rational::distinct_conic_family(&[3, 7]).unwrap();
        let c: Vec<BrauerClass> = fam.into_iter().map(|x| BrauerClass::from_rational(&q, x).unwrap()).collect();
        let left = VarietyDescriptor::Product(vec![sb(&c[0], 2), sb(&c[1], 2)]);
        let r = deduce(&left, &left, &opts).unwrap();
        assert!(r.has_rule("conic-product-unlinked-impossible"));
        assert!(!r.has_rule("conic-product-unlinked-isomorphism"));
    }

    #[test]
    fn deduce_quadric_products() {
        let v = BrauerGroupModel::elementary_two(2);
        let c = v.residues(&[1, 0]).unwrap();
        let prod = |n, m, i3| VarietyDescriptor::Product((0..m).map(|_| quadric(&c, n, i3)).collect());
        let opts = DeduceOptions::default();
        assert!(deduce(&prod(6, 5, false), &prod(6, 5, false), &opts).unwrap().has_rule("quadric-product-dim6"));
        let r = deduce(&prod(6, 6, true), &prod(6, 6, true), &opts).unwrap();
        assert!(r.has_rule("quadric-product-i3-sigma"));
        let r = deduce(&prod(5, 6, true), &prod(5, 6, true), &opts).unwrap();
        assert!(r.has_rule("quadric-product-sigma-unsatisfied"));
        assert!(!sigma::extra_condition(6, 5).unwrap().holds);
        assert_eq!(sigma::sigma_int(SigmaKind::OneOdd, 6, 5, 3).unwrap(), 352.into());
        let r = deduce(&prod(4, 2, true), &prod(4, 2, true), &opts).unwrap();
        assert!(r.has_rule("quadric-product-dimension-too-small"));
        assert!(deduce(&prod(6, 2, false), &sb(&c, 2), &opts).is_err());
    }

    #[test]
    fn deduce_quadrics_and_involutions() {
        let v = BrauerGroupModel::elementary_two(1);
        let c = v.residues(&[1]).unwrap();
        let r = deduce(&quadric(&c, 6, false), &quadric(&c, 6, false), &DeduceOptions::default()).unwrap();
        assert!(r.has_rule("quadric-dim6-isomorphism"));
        let r = deduce(&quadric(&c, 8, false), &quadric(&c, 8, false), &DeduceOptions::default()).unwrap();
        assert!(!r.has_rule("quadric-dim6-isomorphism") && !r.has_rule("quadric-i3-isomorphism"));
        let z4 = BrauerGroupModel::abstract_group(&[4]).unwrap();
        let k = |r| z4.residues(&[r]).unwrap();
        let x = VarietyDescriptor::Involution(Involution::new(6, k(2), k(1), k(3), false).unwrap());
        let y = VarietyDescriptor::Involution(Involution::new(6, k(2), k(3), k(1), false).unwrap());
        let r = deduce(&x, &y, &DeduceOptions::default()).unwrap();
        assert!(r.has_rule("involution-deg6-isomorphism"));
        assert!(r.deductions.iter().any(|d| d.conclusion.contains("C₀⁺(A,*) ≅ C₀⁻(A',*')")));
    }
}
