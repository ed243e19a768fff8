//! Acceptance suite: ten criteria, one pass/fail line each.
//!
//! Run with `cargo test -p weilspace-core --test acceptance`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weilspace::checks::{field_level, tower_over_q, Corpus, CorpusElement};
use weilspace::exact_algebra::quadratic::fundamental_unit;
use weilspace::exact_algebra::{format_rational, rat, rat_int, Rational, Real};
use weilspace::galois_action::{orbit, permutation, PlacePermutation};
use weilspace::height_space::{
    approximate, embed_fa, integral, linear_combine, lp_norm, rational_s, sunit_matrix, LpExponent, StepFunction,
};
use weilspace::number_fields::{FieldElement, NumberField};
use weilspace::place_tower::{partition, refinement_map, Tower};
use weilspace::places::{arch_places, height, height_mahler, log_abs, places_above, PlaceKind, RationalPlace};

const PREC: u32 = 128;
const TOL: f64 = 1e-25;
const SEED: u64 = 0x5eed_2024;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn corpus() -> Corpus {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/default.json");
    Corpus::load(&path).expect("default corpus")
}

fn tol() -> Real {
    Real::from_f64(TOL, 256)
}

fn fa(corpus: &Corpus, e: &CorpusElement) -> StepFunction {
    let t = corpus.field_tower(&e.field_file, PREC).expect("tower over Q");
    embed_fa(&t, field_level(e.element.field()), &e.element).expect("f_a")
}

fn sci(x: &Real) -> String {
    format!("{:.3e}", x.to_f64())
}

fn max_real(xs: impl IntoIterator<Item = Real>) -> Real {
    xs.into_iter().fold(Real::zero(256), |m, x| m.max(&x))
}

fn field_by_label<'a>(corpus: &'a Corpus, label: &str) -> &'a NumberField {
    corpus.fields.values().find(|k| k.label() == label).unwrap_or_else(|| panic!("{label} missing from corpus"))
}

fn isometry(c: &Corpus) -> Verdict {
    let labels: std::collections::BTreeSet<&str> = c.elements.iter().map(|e| e.element.field().label()).collect();
    let mut worst = Real::zero(256);
    let mut bad = vec![];
    for e in &c.elements {
        let norm = lp_norm(&fa(c, e), LpExponent::Finite(1.0)).unwrap();
        let h = height_mahler(&e.element, PREC).unwrap().value;
        let d = (&norm - &(&h * &Real::from_i64(2, h.bits()))).abs();
        if d >= tol() {
            bad.push(e.name());
        }
        worst = worst.max(&d);
    }
    let ok = bad.is_empty() && c.elements.len() >= 50 && labels.len() >= 5;
    verdict(ok, format!("{} elements over {} fields, max |‖f‖₁ - 2h| = {}, failures {:?}", c.elements.len(), labels.len(), sci(&worst), bad))
}

fn product_formula(c: &Corpus) -> Verdict {
    let vals: Vec<(String, Real)> = c.elements.iter().map(|e| (e.name(), integral(&fa(c, e)).abs())).collect();
    let bad: Vec<&String> = vals.iter().filter(|(_, x)| x >= &tol()).map(|(n, _)| n).collect();
    let worst = max_real(vals.iter().map(|(_, x)| x.clone()));
    verdict(bad.is_empty(), format!("{} elements, max |∫f| = {}, failures {:?}", vals.len(), sci(&worst), bad))
}

/// Polynomials over F_p, low degree first, trailing zeros trimmed.
mod fp {
    pub type P = Vec<u64>;

    pub fn trim(mut a: P) -> P {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv(a: u64, p: u64) -> u64 {
        let (mut r, mut b, mut e) = (1u64, a % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn divmod(a: &P, b: &P, p: u64) -> (P, P) {
        let mut r = a.clone();
        let db = b.len() - 1;
        let lc = inv(*b.last().unwrap(), p);
        let mut q = vec![0; a.len().saturating_sub(db).max(1)];
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let c = r.last().unwrap() * lc % p;
            q[k] = c;
            for (i, bi) in b.iter().enumerate() {
                r[k + i] = (r[k + i] + p - c * bi % p) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Every monic polynomial of degree `d`.
    pub fn monic(d: usize, p: u64) -> impl Iterator<Item = P> {
        let count = p.pow(d as u32);
        (0..count).map(move |mut n| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push(n % p);
                n /= p;
            }
            c.push(1);
            c
        })
    }

    /// Factorization by trial division over all monic polynomials of
    /// increasing degree: (factor, multiplicity).
    pub fn factor(f: &P, p: u64) -> Vec<(P, usize)> {
        let mut f = trim(f.clone());
        let mut out = vec![];
        let mut d = 1;
        while f.len() > 1 {
            if 2 * d > f.len() - 1 {
                out.push((f.clone(), 1));
                break;
            }
            let mut found = None;
            for g in monic(d, p) {
                if divmod(&f, &g, p).1.is_empty() {
                    found = Some(g);
                    break;
                }
            }
            match found {
                Some(g) => {
                    let mut m = 0;
                    while f.len() > 1 {
                        let (q, r) = divmod(&f, &g, p);
                        if !r.is_empty() {
                            break;
                        }
                        f = q;
                        m += 1;
                    }
                    out.push((g, m));
                }
                None => d += 1,
            }
        }
        out
    }
}

/// Weights `e f / n` from the factorization of the defining polynomial mod
/// p (valid when `Z[t]` is maximal at p, as it is for these fields).
fn dedekind_weights(k: &NumberField, p: u64) -> Vec<Rational> {
    let f: fp::P = k
        .min_poly()
        .coeffs()
        .iter()
        .map(|c| {
            let r = c % num_bigint::BigInt::from(p);
            let r: i64 = r.try_into().unwrap();
            (r + p as i64) as u64 % p
        })
        .collect();
    let n = k.degree() as i64;
    let mut w: Vec<Rational> =
        fp::factor(&f, p).into_iter().map(|(g, e)| rat((e * (g.len() - 1)) as i64, n)).collect();
    w.sort();
    w
}

fn measure_values(c: &Corpus) -> Verdict {
    let fixtures: [(&str, u64, &[&str]); 9] = [
        ("Q(i)", 2, &["1"]),
        ("Q(i)", 3, &["1"]),
        ("Q(i)", 5, &["1/2", "1/2"]),
        ("Q(i)", 13, &["1/2", "1/2"]),
        ("Q(zeta_5)", 2, &["1"]),
        ("Q(zeta_5)", 3, &["1"]),
        ("Q(zeta_5)", 5, &["1"]),
        ("Q(zeta_5)", 11, &["1/4", "1/4", "1/4", "1/4"]),
        ("Q(zeta_5)", 19, &["1/2", "1/2"]),
    ];
    let mut bad = vec![];
    for (label, p, want) in fixtures {
        let k = field_by_label(c, label);
        let want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        let oracle: Vec<String> = dedekind_weights(k, p).iter().map(format_rational).collect();
        let t = tower_over_q(k).unwrap().with_precision(PREC);
        let part = partition(&t, 1, RationalPlace::Prime(p)).unwrap();
        let mut got: Vec<Rational> = part.cells.iter().map(|c| c.weight.clone()).collect();
        got.sort();
        let got: Vec<String> = got.iter().map(format_rational).collect();
        if oracle != want || got != want {
            bad.push(format!("{label} at {p}: oracle {oracle:?}, computed {got:?}, fixture {want:?}"));
        }
    }
    verdict(bad.is_empty(), format!("9 fibers, mismatches {bad:?}"))
}

fn well_behaved(c: &Corpus) -> Verdict {
    let mut pairs = 0;
    let mut skipped = 0;
    let mut bad = vec![];
    for (k, vs) in &c.fibers {
        for v in vs {
            let RationalPlace::Prime(p) = v else { continue };
            let Ok(ws) = places_above(k, *v, PREC) else {
                skipped += 1;
                continue;
            };
            pairs += 1;
            let total: usize = ws
                .iter()
                .map(|w| match w.kind() {
                    PlaceKind::Finite { e, f, .. } => e * f,
                    _ => unreachable!(),
                })
                .sum();
            if total != k.degree() {
                bad.push(format!("{} at {p}: {total}", k.label()));
            }
        }
    }
    verdict(bad.is_empty() && pairs > 0, format!("{pairs} (field, p) pairs, {skipped} rejected by the enumerator, failures {bad:?}"))
}

fn tower_refinement(c: &Corpus) -> Verdict {
    let wanted = ["Q < Q(i) < Q(zeta_8)", "Q < Q(sqrt5)"];
    let places = [0u64, 2, 3, 5, 7, 13].map(|p| if p == 0 { RationalPlace::Infinity } else { RationalPlace::Prime(p) });
    let mut checked = 0;
    let mut skipped = vec![];
    let mut bad = vec![];
    let mut seen = vec![];
    for (_, t, _) in &c.towers {
        let label = t.levels().iter().map(|k| k.label()).collect::<Vec<_>>().join(" < ");
        if !wanted.contains(&label.as_str()) {
            continue;
        }
        seen.push(label.clone());
        let t: Tower = t.with_precision(PREC);
        for v in places {
            for j in 0..t.num_levels() - 1 {
                let (coarse, fine) = match (partition(&t, j, v), partition(&t, j + 1, v)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        skipped.push(format!("{label} at {v}"));
                        continue;
                    }
                };
                let map = refinement_map(&t, j, v).unwrap();
                for cell in &coarse.cells {
                    let sum: Rational = map
                        .preimage(cell.place.id())
                        .iter()
                        .map(|id| fine.cell(id).unwrap().weight.clone())
                        .fold(rat_int(0), |a, b| a + b);
                    checked += 1;
                    if sum != cell.weight {
                        bad.push(format!("{label} level {j} {}: {} vs {}", cell.place.id(), cell.weight, sum));
                    }
                }
            }
        }
    }
    let ok = bad.is_empty() && seen.len() == wanted.len();
    verdict(ok, format!("{checked} coarse cells over {seen:?}, unsupported {skipped:?}, failures {bad:?}"))
}

fn compose_perm(a: &PlacePermutation, b: &PlacePermutation) -> BTreeMap<String, String> {
    b.mapping.iter().map(|(y, by)| (y.clone(), a.apply(by).unwrap().to_string())).collect()
}

fn galois(c: &Corpus) -> Verdict {
    let mut fibers = 0;
    let mut bad = vec![];
    let mut worst = Real::zero(256);
    for (k, vs) in &c.fibers {
        if !["Q(i)", "Q(zeta_5)"].contains(&k.label()) {
            continue;
        }
        let elems: Vec<&FieldElement> = c.elements.iter().filter(|e| e.element.field() == k).map(|e| &e.element).collect();
        let sigmas = k.automorphisms();
        for &v in vs {
            fibers += 1;
            let fiber = places_above(k, v, PREC).unwrap();
            let perms: Vec<PlacePermutation> = sigmas.iter().map(|s| permutation(s, v, PREC).unwrap()).collect();
            if !perms.iter().all(|p| p.is_bijection()) || orbit(k, v, PREC).unwrap().len() != 1 {
                bad.push(format!("{} at {v}: not a transitive permutation", k.label()));
            }
            for (i, s) in sigmas.iter().enumerate() {
                for (j, t) in sigmas.iter().enumerate() {
                    let st = permutation(&s.compose(t).unwrap(), v, PREC).unwrap();
                    if st.mapping != compose_perm(&perms[i], &perms[j]) {
                        bad.push(format!("{} at {v}: composition of {s} and {t}", k.label()));
                    }
                }
            }
            let bits = working_bits();
            let mut tables: Vec<BTreeMap<String, Real>> = fiber
                .iter()
                .map(|w| fiber.iter().map(|u| (u.id().to_string(), Real::from_i64((u == w) as i64, bits))).collect())
                .collect();
            for a in &elems {
                tables.push(fiber.iter().map(|w| (w.id().to_string(), log_abs(w, a, PREC).unwrap().log_unnormalized)).collect());
            }
            for perm in &perms {
                for f in &tables {
                    let mut orig = Real::zero(bits);
                    let mut moved = Real::zero(bits);
                    for w in &fiber {
                        let wt = Real::from_rational(&w.weight(), bits);
                        orig = &orig + &(&wt * &f[w.id()]);
                        moved = &moved + &(&wt * &f[perm.apply(w.id()).unwrap()]);
                    }
                    let d = (&orig - &moved).abs();
                    if d >= tol() {
                        bad.push(format!("{} at {v}: weighted sum moved by {}", k.label(), sci(&d)));
                    }
                    worst = worst.max(&d);
                }
            }
        }
    }
    verdict(bad.is_empty() && fibers > 0, format!("{fibers} fibers, max invariance gap {}, failures {bad:?}", sci(&worst)))
}

fn working_bits() -> usize {
    weilspace::exact_algebra::real::working_bits(PREC)
}

fn sunit_nullspace() -> Verdict {
    let primes = [2u64, 3, 5, 7, 11, 13];
    let q = NumberField::rationals();
    let mut count = 0;
    let mut worst = 0.0f64;
    let mut bad = vec![];
    for mask in 1u32..(1 << primes.len()) {
        let t: Vec<u64> = primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| *p).collect();
        if t.len() > 5 {
            continue;
        }
        count += 1;
        let gens: Vec<FieldElement> = t.iter().map(|&p| FieldElement::from_int(&q, p as i64)).collect();
        let m = sunit_matrix(&q, &rational_s(&t, PREC).unwrap(), &gens, PREC).unwrap();
        let angle = m.max_nullspace_angle();
        worst = worst.max(angle);
        let sums_vanish = m.row_sums().iter().all(|s| s.abs() < tol());
        if m.rank != t.len() || m.nullspace_basis.is_empty() || angle >= 1e-10 || !sums_vanish {
            bad.push(format!("S = inf,{t:?}: rank {} angle {angle:e}", m.rank));
        }
    }
    let k = NumberField::quadratic(0, -2, "Q(sqrt2)").unwrap();
    let eps = fundamental_unit(&2.into()).unwrap();
    let xi = FieldElement::from_coords(&k, vec![eps.a, eps.b]).unwrap();
    let m = sunit_matrix(&k, &arch_places(&k, PREC).unwrap(), &[xi], PREC).unwrap();
    let angle = m.max_nullspace_angle();
    worst = worst.max(angle);
    if m.rank != 1 || m.nullspace_basis.is_empty() || angle >= 1e-10 {
        bad.push(format!("Q(sqrt2): rank {} angle {angle:e}", m.rank));
    }
    verdict(bad.is_empty() && count == 62, format!("{count} subsets of Q and Q(sqrt2), max angle {worst:e}, failures {bad:?}"))
}

fn scalar_and_homomorphism(c: &Corpus) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let exps = [LpExponent::Finite(1.0), LpExponent::Finite(1.5), LpExponent::Finite(2.0), LpExponent::Finite(3.0), LpExponent::Infinity];
    let mut bad = vec![];
    let mut worst_scalar = Real::zero(256);
    for _ in 0..20 {
        let e = &c.elements[rng.random_range(0..c.elements.len())];
        let f = fa(c, e);
        let r: i64 = loop {
            let r = rng.random_range(-40..=40);
            if r != 0 {
                break r;
            }
        };
        let s: i64 = rng.random_range(1..=40);
        let p = exps[rng.random_range(0..exps.len())];
        let q = rat(r, s);
        let lhs = lp_norm(&linear_combine(&[(q.clone(), f.clone())]).unwrap(), p).unwrap();
        let base = lp_norm(&f, p).unwrap();
        let rhs = &Real::from_rational(&q, base.bits()).abs() * &base;
        let d = (&lhs - &rhs).abs();
        if d >= tol() {
            bad.push(format!("{} by {} at p = {p}", e.name(), format_rational(&q)));
        }
        worst_scalar = worst_scalar.max(&d);
    }
    let mut by_field: BTreeMap<&str, Vec<&CorpusElement>> = BTreeMap::new();
    for e in &c.elements {
        by_field.entry(e.field_file.as_str()).or_default().push(e);
    }
    let groups: Vec<&Vec<&CorpusElement>> = by_field.values().filter(|g| g.len() >= 2).collect();
    let mut worst_hom = Real::zero(256);
    for _ in 0..50 {
        let g = groups[rng.random_range(0..groups.len())];
        let a = g[rng.random_range(0..g.len())];
        let b = g[rng.random_range(0..g.len())];
        let ab = a.element.mul(&b.element).unwrap();
        let t = c.field_tower(&a.field_file, PREC).unwrap();
        let j = field_level(a.element.field());
        let fab = embed_fa(&t, j, &ab).unwrap();
        let sum = linear_combine(&[(rat_int(1), fa(c, a)), (rat_int(1), fa(c, b))]).unwrap();
        let mut ids: Vec<(RationalPlace, String)> = fab.cells().map(|(v, c)| (v, c.place_id.clone())).collect();
        ids.extend(sum.cells().map(|(v, c)| (v, c.place_id.clone())));
        let d = max_real(ids.iter().map(|(v, id)| (&fab.value(*v, id) - &sum.value(*v, id)).abs()));
        if d >= tol() {
            bad.push(format!("f({} * {})", a.expr, b.expr));
        }
        worst_hom = worst_hom.max(&d);
    }
    verdict(
        bad.is_empty(),
        format!("20 scalar triples (max gap {}), 50 product pairs (max gap {}), failures {bad:?}", sci(&worst_scalar), sci(&worst_hom)),
    )
}

fn approximation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let q = NumberField::rationals();
    let t = tower_over_q(&q).unwrap().with_precision(PREC);
    let basis: Vec<FieldElement> = [2, 3, 5].iter().map(|&n| FieldElement::from_int(&q, n)).collect();
    let bits = working_bits();
    let mut worst_l2 = 0.0f64;
    let mut worst_l1 = Real::zero(256);
    let mut bad = vec![];
    for _ in 0..20 {
        let vals: Vec<i64> = loop {
            let mut v: Vec<i64> = (0..3).map(|_| rng.random_range(-9..=9)).collect();
            v.push(-v.iter().sum::<i64>());
            if v.iter().any(|x| *x != 0) {
                break v;
            }
        };
        let mut m: BTreeMap<RationalPlace, BTreeMap<String, Real>> = BTreeMap::new();
        let cells = [(RationalPlace::Infinity, "arch:r0"), (RationalPlace::Prime(2), "fin:2:0.1"), (RationalPlace::Prime(3), "fin:3:0.1"), (RationalPlace::Prime(5), "fin:5:0.1")];
        for ((v, id), x) in cells.iter().zip(&vals) {
            m.entry(*v).or_default().insert(id.to_string(), Real::from_i64(*x, bits));
        }
        let target = StepFunction::from_values(&t, 0, &m).unwrap();
        let sol = approximate(&target, &basis, 10_000, PREC).unwrap();
        worst_l2 = worst_l2.max(sol.residual_l2_unrounded);
        worst_l1 = worst_l1.max(&sol.residual_l1);
        if sol.residual_l2_unrounded >= 1e-6 || sol.residual_l1 >= Real::from_f64(1e-3, 64) {
            bad.push(format!("{vals:?}"));
        }
    }
    verdict(bad.is_empty(), format!("20 targets, max L2 before rounding {worst_l2:.3e}, max L1 after {}, failures {bad:?}", sci(&worst_l1)))
}

/// `a^n = 1` for some `n <= 60`, by repeated multiplication.
fn torsion_oracle(a: &FieldElement) -> bool {
    let mut x = a.clone();
    for _ in 0..60 {
        if x.is_one() {
            return true;
        }
        x = x.mul(a).unwrap();
    }
    false
}

fn kronecker(c: &Corpus) -> Verdict {
    let mut torsion = vec![];
    let mut min_other = f64::INFINITY;
    let mut bad = vec![];
    for e in &c.elements {
        let h = height(&e.element, PREC).unwrap().value;
        if torsion_oracle(&e.element) {
            torsion.push(e.name());
            if h >= tol() {
                bad.push(format!("{}: {}", e.name(), sci(&h)));
            }
        } else {
            min_other = min_other.min(h.to_f64());
            if h.to_f64() <= 0.2 {
                bad.push(format!("{}: {}", e.name(), sci(&h)));
            }
        }
    }
    let needed = ["1 in Q", "-1 in Q", "t in Q(i)", "-t in Q(i)", "t in Q(zeta_5)", "t^2 in Q(zeta_5)", "t^3 in Q(zeta_5)", "t^4 in Q(zeta_5)"];
    let has_all = needed.iter().all(|n| torsion.iter().any(|x| x == n));
    verdict(bad.is_empty() && has_all, format!("torsion {torsion:?}, smallest other height {min_other:.4}, failures {bad:?}"))
}

fn main() -> ExitCode {
    let c = corpus();
    type Criterion<'a> = (&'a str, Option<Duration>, Box<dyn Fn() -> Verdict + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("isometry ‖f‖₁ = 2h", Some(Duration::from_secs(30)), Box::new(|| isometry(&c))),
        ("product formula ∫f = 0", Some(Duration::from_secs(30)), Box::new(|| product_formula(&c))),
        ("measure values", None, Box::new(|| measure_values(&c))),
        ("well-behaved Σ e·f = d", None, Box::new(|| well_behaved(&c))),
        ("measure refinement", None, Box::new(|| tower_refinement(&c))),
        ("Galois action", None, Box::new(|| galois(&c))),
        ("S-unit nullspace", Some(Duration::from_secs(10)), Box::new(sunit_nullspace)),
        ("scalar and homomorphism laws", None, Box::new(|| scalar_and_homomorphism(&c))),
        ("approximation", Some(Duration::from_secs(5)), Box::new(approximation)),
        ("Kronecker gate", None, Box::new(|| kronecker(&c))),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let in_time = budget.is_none_or(|b| took < b);
        let ok = v.passed && in_time;
        if !ok {
            failed += 1;
        }
        let budget = budget.map(|b| format!(" / {} s", b.as_secs())).unwrap_or_default();
        println!(
            "[{}] {:>2} {name}: {} ({:.2} s{budget})",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
