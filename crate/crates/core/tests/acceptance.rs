//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! A criterion that fails in a documented, analysed way is still printed as FAIL
//! but only aborts the process when `ACCEPTANCE_STRICT=1` is set; any other
//! failure, or a known failure whose shape changes, exits nonzero.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tits_core::brauer::{BrauerClass, BrauerGroupModel, CSAlgebra};
use tits_core::forms::clifford::even_clifford_class_oracle;
use tits_core::forms::{FormShadow, QuadraticForm};
use tits_core::rational::{
    distinct_conic_family, hilbert_symbol, primes_3_mod_4, quaternion_class, relevant_places, Place,
};
use tits_core::sigma::{
    check_recurrences, lemma_recurrences, sigma_int, SigmaKind, CORRECTED_RELATIONS,
};
use tits_core::varieties::{compare, rank_measure, tits_measure, Grassmannian, Involution, Quadric, VarietyDescriptor};
use tits_core::verifier::{
    verify_normal_form_confluence, verify_quadric_product_matching, verify_relation_equivalence,
    verify_sum_cancellation, verify_tensor_cancellation, Mode, VerifierConfig,
};

enum Verdict {
    Pass(String),
    Fail(String),
    /// Fails as analysed; the string explains the analysis.
    KnownFail(String),
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn q(n: i64) -> Ratio<i64> {
    Ratio::from_integer(n)
}

// 1 -------------------------------------------------------------------------

fn sigma_anchor() -> Verdict {
    let t = Instant::now();
    let one = sigma_int(SigmaKind::OneEven, 5, 6, 2).unwrap();
    let two = sigma_int(SigmaKind::TwoEven, 5, 6, 2).unwrap();
    let elapsed = t.elapsed();
    let detail = format!("sigma1_even(5,6,2) = {one}, sigma2_even(5,6,2) = {two}, {}", ms(elapsed));
    if one == BigInt::from(768) && two == BigInt::from(576) && elapsed < Duration::from_millis(1) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// 2 -------------------------------------------------------------------------

fn closed_forms() -> Verdict {
    type Display = (SigmaKind, fn(i64) -> i64);
    let displays: [Display; 4] = [
        (SigmaKind::OneEven, |n| 2 * (n - 2).pow(4) + 32 * (n - 2) + 8 * (n - 2).pow(2)),
        (SigmaKind::OneOdd, |n| (n - 2).pow(4) + 2 * (n - 2) + (n - 2).pow(2)),
        (SigmaKind::TwoEven, |n| 4 * (n - 2).pow(3) + 4 * (n - 2).pow(3) + 16 * (n - 2)),
        (SigmaKind::TwoOdd, |n| (n - 2).pow(3) + 2 * (n - 2).pow(3) + (n - 2)),
    ];
    for (kind, f) in displays {
        for n in 3..23 {
            let got = sigma_int(kind, 5, n, 2).unwrap();
            if got != BigInt::from(f(n)) {
                return Verdict::Fail(format!("{kind}(5,{n},2) = {got}, display gives {}", f(n)));
            }
        }
    }
    Verdict::Pass("4 displays x 20 points (n = 3..22) agree".into())
}

// 3 -------------------------------------------------------------------------

fn recurrences() -> Verdict {
    let t = Instant::now();
    let mut points = 0;
    let mut failing_points = 0;
    let mut failing_relations = BTreeSet::new();
    let mut first = None;
    let mut corrected_ok = true;
    for n in 5..=20 {
        for m in 2..=12 {
            for l in 0..m {
                points += 1;
                let report = lemma_recurrences(m, n, l).unwrap();
                if !report.all_hold() {
                    failing_points += 1;
                    for r in report.failing() {
                        failing_relations.insert(r.relation.clone());
                        first.get_or_insert_with(|| format!("(m={m}, n={n}, l={l}) {}: {} vs {}", r.relation, r.lhs, r.rhs));
                    }
                }
                corrected_ok &= check_recurrences(&CORRECTED_RELATIONS, m, n, l).unwrap().all_hold();
            }
        }
    }
    let elapsed = t.elapsed();
    if failing_points == 0 && elapsed < Duration::from_secs(10) {
        return Verdict::Pass(format!("{points} grid points, {}", ms(elapsed)));
    }
    let only_known = failing_relations.len() == 1
        && failing_relations.contains("sigma12_even(m-1) = S(m)/(n-2)");
    let detail = format!(
        "{failing_points}/{points} grid points violate {failing_relations:?}; first: {}. \
         sigma12_even depends on m only through 2^(m-l+2r+1), so it halves when m drops by one \
         and the stated division by (n-2) holds only for n = 4 or l = 0. \
         Corrected set (halving) holds on the full grid: {corrected_ok}. {}",
        first.unwrap_or_default(),
        ms(elapsed)
    );
    if only_known && corrected_ok {
        Verdict::KnownFail(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// 4 -------------------------------------------------------------------------

fn class_of_order_dividing(model: &Arc<BrauerGroupModel>, deg: u64, rng: &mut ChaCha8Rng) -> BrauerClass {
    let elems = model.all_classes().unwrap();
    let ok: Vec<_> = elems.into_iter().filter(|c| deg % c.order() == 0).collect();
    ok[rng.gen_range(0..ok.len())].clone()
}

fn two_torsion(model: &Arc<BrauerGroupModel>, rng: &mut ChaCha8Rng) -> BrauerClass {
    class_of_order_dividing(model, 2, rng)
}

fn involution(model: &Arc<BrauerGroupModel>, deg: u64) -> VarietyDescriptor {
    // model Z/4 x Z/2
    let c = |r: &[u64]| model.residues(r).unwrap();
    let iv = if deg % 4 == 2 {
        Involution::new(deg, c(&[2, 0]), c(&[1, 0]), c(&[3, 0]), false)
    } else {
        Involution::new(deg, c(&[2, 1]), c(&[2, 0]), c(&[0, 1]), false)
    };
    VarietyDescriptor::Involution(iv.unwrap())
}

fn random_leaf(model: &Arc<BrauerGroupModel>, rng: &mut ChaCha8Rng) -> VarietyDescriptor {
    match rng.gen_range(0..4) {
        0 => {
            let deg = rng.gen_range(1..=8);
            VarietyDescriptor::SeveriBrauer(CSAlgebra::new(class_of_order_dividing(model, deg, rng), deg).unwrap())
        }
        1 => {
            let deg = rng.gen_range(2..=8);
            let d = rng.gen_range(1..deg);
            let alg = CSAlgebra::new(class_of_order_dividing(model, deg, rng), deg).unwrap();
            VarietyDescriptor::Grassmannian(Grassmannian::new(d, alg).unwrap())
        }
        2 => {
            let dim = rng.gen_range(3..=9);
            let shadow = FormShadow::new(dim, two_torsion(model, rng), rng.gen_bool(0.5)).unwrap();
            VarietyDescriptor::Quadric(Quadric::from_shadow(shadow))
        }
        _ => involution(model, 2 * rng.gen_range(3..=5)),
    }
}

fn measure_tables() -> Verdict {
    let model = BrauerGroupModel::abstract_group(&[4, 2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let check = |v: &VarietyDescriptor, want: u64| -> Result<(), String> {
        let report = tits_measure(v).map_err(|e| e.to_string())?;
        let rho = rank_measure(v).map_err(|e| e.to_string())?;
        if rho != want || report.jt_effective.cardinality() != want || report.rho != want {
            return Err(format!("{} expected {want}, rank {rho}, multiset {}", v.family(), report.jt_effective.cardinality()));
        }
        Ok(())
    };
    let mut tabled = 0;
    for deg in 1..=12u64 {
        let alg = CSAlgebra::new(class_of_order_dividing(&model, deg, &mut rng), deg).unwrap();
        if let Err(e) = check(&VarietyDescriptor::SeveriBrauer(alg.clone()), deg) {
            return Verdict::Fail(e);
        }
        let mut binom = 1u64;
        for d in 1..deg {
            binom = binom * (deg - d + 1) / d;
            let gr = VarietyDescriptor::Grassmannian(Grassmannian::new(d, alg.clone()).unwrap());
            if let Err(e) = check(&gr, binom) {
                return Verdict::Fail(e);
            }
            tabled += 1;
        }
        if deg >= 3 {
            let shadow = FormShadow::new(deg as usize, two_torsion(&model, &mut rng), false).unwrap();
            let want = if deg % 2 == 0 { deg } else { deg - 1 };
            if let Err(e) = check(&VarietyDescriptor::Quadric(Quadric::from_shadow(shadow)), want) {
                return Verdict::Fail(e);
            }
        }
        if deg >= 6 && deg % 2 == 0 {
            if let Err(e) = check(&involution(&model, deg), deg) {
                return Verdict::Fail(e);
            }
        }
        tabled += 1;
    }
    for i in 0..1000 {
        let leaves = rng.gen_range(1..=3);
        let v = if leaves == 1 {
            random_leaf(&model, &mut rng)
        } else {
            VarietyDescriptor::Product((0..leaves).map(|_| random_leaf(&model, &mut rng)).collect())
        };
        let report = tits_measure(&v).unwrap();
        let rho = rank_measure(&v).unwrap();
        if report.jt.augmentation() != rho as i64 || report.rho != rho {
            return Verdict::Fail(format!("random descriptor {i}: augmentation {} vs rank {rho}", report.jt.augmentation()));
        }
    }
    Verdict::Pass(format!("{tabled} tabled descriptors (deg <= 12), 1000 random descriptors"))
}

// 5 -------------------------------------------------------------------------

fn square_free(n: i64) -> bool {
    n != 0 && (2..=5).all(|d: i64| n % (d * d) != 0)
}

/// Roots of `z^2 = r` modulo `modulus`, indexed by `r`.
fn square_roots(modulus: i64) -> Vec<Vec<i64>> {
    let mut roots = vec![Vec::new(); modulus as usize];
    for z in 0..modulus {
        roots[(z * z % modulus) as usize].push(z);
    }
    roots
}

fn valuation_mod(x: i64, p: i64, modulus: i64) -> u32 {
    let mut x = x.rem_euclid(modulus);
    if x == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Whether `a x^2 + b y^2 = z^2` has a nonzero solution over `Q_p`, by searching for a
/// primitive solution modulo `p^N` that Hensel-lifts. With `a`, `b` square-free some
/// partial derivative of a primitive solution has valuation at most `v_p(2) + 1`, so
/// `N = 3` (odd `p`) and `N = 5` (`p = 2`) make the search exact.
fn locally_solvable(a: i64, b: i64, p: i64, roots: &[Vec<i64>]) -> bool {
    let modulus = roots.len() as i64;
    let n_exp = if p == 2 { 5 } else { 3 };
    for x in 0..modulus {
        for y in 0..modulus {
            let r = (a * x * x + b * y * y).rem_euclid(modulus);
            for &z in &roots[r as usize] {
                if x % p == 0 && y % p == 0 && z % p == 0 {
                    continue;
                }
                let derivs = [2 * a * x, 2 * b * y, 2 * z];
                if derivs.iter().any(|&d| {
                    let k = valuation_mod(d, p, modulus);
                    k != u32::MAX && 2 * k < n_exp
                }) {
                    return true;
                }
            }
        }
    }
    false
}

fn conics() -> Verdict {
    let primes = primes_3_mod_4(10);
    let classes = distinct_conic_family(&primes).unwrap();
    for (p, c) in primes.iter().zip(&classes) {
        let ram: Vec<Place> = c.ramification();
        if ram != vec![Place::Finite(2), Place::Finite(*p)] && ram != vec![Place::Finite(*p), Place::Finite(2)] {
            return Verdict::Fail(format!("(-1,{p}) ramifies at {ram:?}"));
        }
    }
    let model = BrauerGroupModel::rational();
    let sb: Vec<VarietyDescriptor> = classes
        .iter()
        .map(|c| {
            let class = BrauerClass::from_rational(&model, c.clone()).unwrap();
            VarietyDescriptor::SeveriBrauer(CSAlgebra::new(class, 2).unwrap())
        })
        .collect();
    for i in 0..sb.len() {
        for j in 0..sb.len() {
            if compare(&sb[i], &sb[j]).unwrap().measures_equal != (i == j) {
                return Verdict::Fail(format!("conics {} and {} compare wrongly", primes[i], primes[j]));
            }
        }
    }

    let values: Vec<i64> = (-30..=30).filter(|&n| square_free(n)).collect();
    let places = [2i64, 3, 5, 7];
    let roots: Vec<Vec<Vec<i64>>> = places.iter().map(|&p| square_roots(p.pow(if p == 2 { 5 } else { 3 }))).collect();
    let mut symbols = 0;
    for &a in &values {
        for &b in &values {
            let real = hilbert_symbol(&q(a), &q(b), Place::Real).unwrap();
            let isotropic = [a, b, -1].iter().any(|&e| e > 0) && [a, b, -1].iter().any(|&e| e < 0);
            if (real == 1) != isotropic {
                return Verdict::Fail(format!("real symbol ({a},{b}) = {real}"));
            }
            for (k, &p) in places.iter().enumerate() {
                let s = hilbert_symbol(&q(a), &q(b), Place::Finite(p as u64)).unwrap();
                if (s == 1) != locally_solvable(a, b, p, &roots[k]) {
                    return Verdict::Fail(format!("({a},{b})_{p} = {s} disagrees with the solvability search"));
                }
            }
            let product: i64 = relevant_places(a, b)
                .into_iter()
                .map(|v| hilbert_symbol(&q(a), &q(b), v).unwrap() as i64)
                .product();
            if product != 1 {
                return Verdict::Fail(format!("product formula fails for ({a},{b})"));
            }
            symbols += 5;
        }
    }
    Verdict::Pass(format!(
        "10 conics (-1,p), p in {primes:?}, pairwise distinct; {symbols} symbols match the oracle; product formula on {} pairs",
        values.len() * values.len()
    ))
}

// 6 -------------------------------------------------------------------------

fn clifford() -> Verdict {
    let vals = [-5i64, -3, -2, -1, 1, 2, 3, 5];
    for &a in &vals {
        for &b in &vals {
            let form = QuadraticForm::from_integers(&[a, b, -1]).unwrap();
            let want = quaternion_class(&q(a), &q(b)).unwrap();
            let oracle = even_clifford_class_oracle::<BigRational>(&form).unwrap();
            let closed = form.even_clifford_class().unwrap();
            if oracle != want || closed != want {
                return Verdict::Fail(format!("<{a},{b},-1>: oracle {oracle}, closed form {closed}, (a,b) = {want}"));
            }
        }
    }
    let pool = [-7i64, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 11, 13];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let n = 3 + i % 4;
        let mut e: Vec<i64> = (0..n).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
        if n % 2 == 0 {
            let head = QuadraticForm::from_integers(&e[..n - 1]).unwrap();
            let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
            e[n - 1] = sign * head.determinant_class();
        }
        let form = QuadraticForm::from_integers(&e).unwrap();
        let oracle = even_clifford_class_oracle::<Ratio<i128>>(&form).unwrap();
        let closed = form.even_clifford_class().unwrap();
        if oracle != closed {
            return Verdict::Fail(format!("{e:?}: oracle {oracle}, closed form {closed}"));
        }
    }
    Verdict::Pass("64 ternary forms <a,b,-1> and 100 random forms of dims 3-6 agree".into())
}

// 7 -------------------------------------------------------------------------

fn relation_equivalence() -> Verdict {
    let t = Instant::now();
    let cfg = VerifierConfig::default();
    for orders in [&[6u64][..], &[12], &[30], &[2, 2, 2]] {
        let model = BrauerGroupModel::abstract_group(orders).unwrap();
        let run = verify_relation_equivalence(&model, 3, &cfg).unwrap();
        if !run.passed() {
            return Verdict::Fail(format!("{orders:?}: {:?}", run.outcome));
        }
    }
    let elapsed = t.elapsed();
    let detail = format!("Z/6, Z/12, Z/30, (Z/2)^3 up to cardinality 3, {}", ms(elapsed));
    if elapsed < Duration::from_secs(60) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// 8 -------------------------------------------------------------------------

fn cancellation() -> Verdict {
    let t = Instant::now();
    let cfg = VerifierConfig::default();
    let group = |o: &[u64]| BrauerGroupModel::abstract_group(o).unwrap();
    for orders in [&[2u64, 2, 2][..], &[12]] {
        let run = verify_sum_cancellation(&group(orders), 3, &cfg).unwrap();
        if !run.passed() || run.mode != Mode::Exhaustive {
            return Verdict::Fail(format!("sum cancellation on {orders:?}: {:?}", run.outcome));
        }
    }
    for n in [5, 6] {
        for orders in [&[2u64, 2][..], &[2, 2, 2]] {
            let run = verify_tensor_cancellation(&group(orders), n, 3, true, &cfg).unwrap();
            if !run.passed() || run.mode != Mode::Exhaustive {
                return Verdict::Fail(format!("tensor cancellation n={n} on {orders:?}: {:?}", run.outcome));
            }
        }
    }
    let elapsed = t.elapsed();
    let detail = format!("sum: (Z/2)^3, Z/12; tensor: n in {{5,6}} on (Z/2)^2, (Z/2)^3; {}", ms(elapsed));
    if elapsed < Duration::from_secs(300) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// 9 -------------------------------------------------------------------------

fn quadric_matching() -> Verdict {
    let t = Instant::now();
    let cfg = VerifierConfig::default();
    let mut cases: Vec<(u32, usize)> = (1..=4).flat_map(|d| (1..=4).map(move |m| (d, m))).collect();
    cases.push((5, 5));
    for (d, m) in cases {
        let run = verify_quadric_product_matching(d, m, 6, false, &cfg).unwrap();
        if !run.passed() {
            return Verdict::Fail(format!("d={d}, m={m}: {:?}", run.outcome));
        }
    }
    Verdict::Pass(format!(
        "n = 6, all m, d <= 4 and (m, d) = (5, 5), full enumeration without symmetry reduction, {}",
        ms(t.elapsed())
    ))
}

// 10 ------------------------------------------------------------------------

fn confluence() -> Verdict {
    let cfg = VerifierConfig::default();
    for order in [6u64, 210] {
        let model = BrauerGroupModel::abstract_group(&[order]).unwrap();
        let run = verify_normal_form_confluence(&model, 1000, &cfg).unwrap();
        if !run.passed() {
            return Verdict::Fail(format!("Z/{order}: {:?}", run.outcome));
        }
    }
    Verdict::Pass("1000 trials each on Z/6 and Z/210".into())
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("sigma anchor 768 / 576", sigma_anchor),
        ("closed-form sigma displays", closed_forms),
        ("step-down recurrences on the full grid", recurrences),
        ("measure tables and augmentation", measure_tables),
        ("conics over Q and Hilbert symbols", conics),
        ("even Clifford class consistency", clifford),
        ("relation-set equivalence", relation_equivalence),
        ("cancellation suites", cancellation),
        ("product-of-quadrics matching", quadric_matching),
        ("normal-form confluence", confluence),
    ];
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut unexpected = 0;
    let mut known = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Verdict::Pass(d) => println!("criterion {:>2}: PASS  {name}: {d}", i + 1),
            Verdict::Fail(d) => {
                unexpected += 1;
                println!("criterion {:>2}: FAIL  {name}: {d}", i + 1);
            }
            Verdict::KnownFail(d) => {
                known += 1;
                println!("criterion {:>2}: FAIL  {name} (known defect in the stated relation): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {known} known failure(s), {unexpected} unexpected failure(s)", 10 - known - unexpected);
    if unexpected > 0 || (strict && known > 0) {
        std::process::exit(1);
    }
}
