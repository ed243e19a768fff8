//! Corpus files and the registry of invariant checks run over them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::quadratic::fundamental_unit;
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::{format_rational, Rational, Real};
use crate::galois_action::{check_equivariance, check_invariance, orbit, permutation};
use crate::height_space::{embed_fa, integral, lp_norm, rational_s, sunit_matrix, LpExponent};
use crate::number_fields::{field_from_json, FieldElement, NumberField};
use crate::place_tower::{check_measure_refinement, partition, tower_from_json, Tower};
use crate::places::{
    arch_places, height, height_mahler, log_abs, places_above, product_defect, support_primes, RationalPlace,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerEntry {
    pub file: String,
    pub places: Vec<RationalPlace>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberEntry {
    pub field: String,
    pub places: Vec<RationalPlace>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SUnitEntry {
    /// Finite primes of Q; every subset with `inf` of size 2..=max_size is tested.
    pub primes: Vec<u64>,
    pub max_size: usize,
    /// Real quadratic fields `(field file, radicand)` tested with their
    /// fundamental unit.
    #[serde(default)]
    pub quadratic: Vec<(String, i64)>,
}

/// Corpus file: element pairs, towers, fibers and the S-unit setup. Paths
/// are relative to the corpus file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusFile {
    pub elements: Vec<(String, String)>,
    #[serde(default)]
    pub towers: Vec<TowerEntry>,
    #[serde(default)]
    pub fibers: Vec<FiberEntry>,
    pub sunit: Option<SUnitEntry>,
}

#[derive(Clone, Debug)]
pub struct CorpusElement {
    pub field_file: String,
    pub expr: String,
    pub element: FieldElement,
}

impl CorpusElement {
    pub fn name(&self) -> String {
        format!("{} in {}", self.expr, self.element.field().label())
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub fields: BTreeMap<String, NumberField>,
    pub elements: Vec<CorpusElement>,
    pub towers: Vec<(String, Tower, Vec<RationalPlace>)>,
    pub fibers: Vec<(NumberField, Vec<RationalPlace>)>,
    pub sunit: Option<SUnitEntry>,
    /// One tower `[Q, K]` per field, used to embed elements of `K`.
    field_towers: BTreeMap<String, Tower>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

impl Corpus {
    pub fn load(path: &Path) -> Result<Corpus> {
        let text = read(path)?;
        let file: CorpusFile = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Corpus::from_file(&file, &base)
    }

    pub fn from_file(file: &CorpusFile, base: &Path) -> Result<Corpus> {
        let mut fields = BTreeMap::new();
        let field = |name: &str, fields: &mut BTreeMap<String, NumberField>| -> Result<NumberField> {
            if let Some(k) = fields.get(name) {
                return Ok(k.clone());
            }
            let k = field_from_json(&read(&base.join(name))?)?;
            fields.insert(name.to_string(), k.clone());
            Ok(k)
        };
        let mut elements = vec![];
        for (f, expr) in &file.elements {
            let k = field(f, &mut fields)?;
            elements.push(CorpusElement { field_file: f.clone(), expr: expr.clone(), element: k.element(expr)? });
        }
        let mut fibers = vec![];
        for e in &file.fibers {
            fibers.push((field(&e.field, &mut fields)?, e.places.clone()));
        }
        if let Some(s) = &file.sunit {
            for (f, _) in &s.quadratic {
                field(f, &mut fields)?;
            }
        }
        let mut towers = vec![];
        for t in &file.towers {
            towers.push((t.file.clone(), tower_from_json(&read(&base.join(&t.file))?)?, t.places.clone()));
        }
        let mut field_towers = BTreeMap::new();
        for (name, k) in &fields {
            if let Ok(t) = tower_over_q(k) {
                field_towers.insert(name.clone(), t);
            }
        }
        Ok(Corpus { fields, elements, towers, fibers, sunit: file.sunit.clone(), field_towers })
    }

    /// The tower `[Q, K]` for a corpus field, at the given precision.
    pub fn field_tower(&self, field_file: &str, precision_bits: u32) -> Result<Tower> {
        let t = self.field_towers.get(field_file).ok_or_else(|| match self.fields.get(field_file) {
            Some(_) => Error::NotGalois(1),
            None => Error::Io(format!("{field_file} is not part of the corpus")),
        })?;
        Ok(if t.precision_bits() == precision_bits { t.clone() } else { t.with_precision(precision_bits) })
    }
}

/// `[Q]` for the rationals, `[Q, K]` otherwise.
pub fn tower_over_q(k: &NumberField) -> Result<Tower> {
    if k.degree() == 1 {
        Tower::new(vec![k.clone()], vec![])
    } else {
        Tower::new(vec![NumberField::rationals(), k.clone()], vec![FieldElement::zero(k)])
    }
}

/// Level of `K` in `tower_over_q(K)`.
pub fn field_level(k: &NumberField) -> usize {
    usize::from(k.degree() > 1)
}

#[derive(Clone, Debug)]
pub struct CheckContext {
    pub precision_bits: u32,
    pub tolerance: Real,
}

impl CheckContext {
    /// Tolerance `2^(-precision_bits/4)`.
    pub fn new(precision_bits: u32) -> CheckContext {
        let bits = working_bits(precision_bits);
        CheckContext { precision_bits, tolerance: Real::pow2(-(precision_bits as i64) / 4, bits) }
    }

    pub fn with_tolerance(precision_bits: u32, tolerance: f64) -> CheckContext {
        CheckContext { precision_bits, tolerance: Real::from_f64(tolerance, working_bits(precision_bits)) }
    }

    fn bits(&self) -> usize {
        working_bits(self.precision_bits)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub check: String,
    pub subject: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckItem {
    fn new(check: &str, subject: impl Into<String>, passed: bool, measured: Option<String>, detail: impl Into<String>) -> CheckItem {
        CheckItem { check: check.into(), subject: subject.into(), passed, measured, detail: detail.into() }
    }

    fn error(check: &str, subject: impl Into<String>, e: &Error) -> CheckItem {
        CheckItem::new(check, subject, false, None, format!("{}: {e}", e.code()))
    }
}

pub trait InvariantCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem>;
}

fn dec(x: &Real) -> String {
    x.to_decimal(40)
}

fn per_element(
    check: &str,
    corpus: &Corpus,
    ctx: &CheckContext,
    f: impl Fn(&CorpusElement, &Tower) -> Result<(bool, Option<String>, String)>,
) -> Vec<CheckItem> {
    corpus
        .elements
        .iter()
        .map(|e| {
            let r = corpus.field_tower(&e.field_file, ctx.precision_bits).and_then(|t| f(e, &t));
            match r {
                Ok((ok, m, d)) => CheckItem::new(check, e.name(), ok, m, d),
                Err(err) => CheckItem::error(check, e.name(), &err),
            }
        })
        .collect()
}

/// `||f_a||_1 = 2 h(a)` with the height from the minimal polynomial.
pub struct Isometry;

impl InvariantCheck for Isometry {
    fn name(&self) -> &'static str {
        "isometry"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        per_element(self.name(), corpus, ctx, |e, t| {
            let f = embed_fa(t, field_level(e.element.field()), &e.element)?;
            let n1 = lp_norm(&f, LpExponent::Finite(1.0))?;
            let h = height_mahler(&e.element, ctx.precision_bits)?.value;
            let diff = (&n1 - &(&h * &Real::from_i64(2, ctx.bits()))).abs();
            Ok((diff < ctx.tolerance, Some(dec(&diff)), String::new()))
        })
    }
}

/// `integral f_a = 0` and the product formula.
pub struct ProductFormula;

impl InvariantCheck for ProductFormula {
    fn name(&self) -> &'static str {
        "product_formula"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        per_element(self.name(), corpus, ctx, |e, t| {
            let f = embed_fa(t, field_level(e.element.field()), &e.element)?;
            let i = integral(&f).abs();
            let d = product_defect(&e.element, ctx.precision_bits)?.abs();
            let m = i.max(&d);
            Ok((m < ctx.tolerance, Some(dec(&m)), String::new()))
        })
    }
}

/// Place-sum height against the minimal-polynomial height.
pub struct HeightAgreement;

impl InvariantCheck for HeightAgreement {
    fn name(&self) -> &'static str {
        "height_agreement"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        per_element(self.name(), corpus, ctx, |e, _| {
            let a = height(&e.element, ctx.precision_bits)?.value;
            let b = height_mahler(&e.element, ctx.precision_bits)?.value;
            let diff = (&a - &b).abs();
            Ok((diff < ctx.tolerance, Some(dec(&diff)), format!("h = {}", a.to_decimal(20))))
        })
    }
}

/// `h(a) < tol` exactly for torsion elements.
pub struct Kronecker;

impl InvariantCheck for Kronecker {
    fn name(&self) -> &'static str {
        "kronecker"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        per_element(self.name(), corpus, ctx, |e, _| {
            let h = height(&e.element, ctx.precision_bits)?.value;
            let torsion = e.element.is_torsion()?;
            let small = h < ctx.tolerance;
            Ok((small == torsion, Some(dec(&h)), format!("torsion = {torsion}")))
        })
    }
}

/// Every (field, rational place) pair met in the corpus.
fn fiber_pairs(corpus: &Corpus) -> Vec<(NumberField, RationalPlace)> {
    let mut seen: BTreeSet<(String, RationalPlace)> = BTreeSet::new();
    let mut out = vec![];
    let mut push = |k: &NumberField, v: RationalPlace, out: &mut Vec<(NumberField, RationalPlace)>| {
        if seen.insert((k.label().to_string(), v)) {
            out.push((k.clone(), v));
        }
    };
    for (k, vs) in &corpus.fibers {
        for v in vs {
            push(k, *v, &mut out);
        }
    }
    for e in &corpus.elements {
        push(e.element.field(), RationalPlace::Infinity, &mut out);
        if let Ok(ps) = support_primes(&e.element) {
            for p in ps {
                push(e.element.field(), RationalPlace::Prime(p), &mut out);
            }
        }
    }
    out
}

/// `sum_w e_w f_w = d` (and `sum d_v = d` at infinity).
pub struct WellBehaved;

impl InvariantCheck for WellBehaved {
    fn name(&self) -> &'static str {
        "well_behaved"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        fiber_pairs(corpus)
            .into_iter()
            .map(|(k, v)| {
                let subject = format!("{} over {v}", k.label());
                match places_above(&k, v, ctx.precision_bits) {
                    Ok(ps) => {
                        let s: usize = ps.iter().map(|w| w.local_degree()).sum();
                        CheckItem::new(self.name(), subject, s == k.degree(), Some(s.to_string()), format!("d = {}", k.degree()))
                    }
                    Err(e @ (Error::NonMaximalOrder { .. } | Error::UnsupportedPlace(_))) => {
                        CheckItem::new(self.name(), subject, true, None, format!("not enumerated: {}", e.code()))
                    }
                    Err(e) => CheckItem::error(self.name(), subject, &e),
                }
            })
            .collect()
    }
}

/// Cell weights equal `d_w / d`, sum to 1 and agree within a Galois fiber.
pub struct MeasureValues;

impl InvariantCheck for MeasureValues {
    fn name(&self) -> &'static str {
        "measure_values"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        let mut out = vec![];
        for (k, vs) in &corpus.fibers {
            let Ok(t) = tower_over_q(k).map(|t| t.with_precision(ctx.precision_bits)) else {
                out.push(CheckItem::error(self.name(), k.label(), &Error::NotGalois(1)));
                continue;
            };
            for v in vs {
                let subject = format!("{} over {v}", k.label());
                match partition(&t, field_level(k), *v) {
                    Ok(p) => {
                        let d = Rational::from_integer(k.degree().into());
                        let exact = p.cells.iter().all(|c| c.weight == Rational::from_integer(c.place.local_degree().into()) / &d);
                        let equal = p.cells.windows(2).all(|w| w[0].weight == w[1].weight);
                        let total = p.total_weight();
                        let ws: Vec<String> = p.cells.iter().map(|c| format_rational(&c.weight)).collect();
                        let ok = exact && equal && total == Rational::from_integer(1.into());
                        out.push(CheckItem::new(self.name(), subject, ok, Some(ws.join(",")), String::new()));
                    }
                    Err(e) => out.push(CheckItem::error(self.name(), subject, &e)),
                }
            }
        }
        out
    }
}

/// Coarse weight equals the sum of fine weights along every tower.
pub struct MeasureRefinement;

impl InvariantCheck for MeasureRefinement {
    fn name(&self) -> &'static str {
        "measure_refinement"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        let mut out = vec![];
        for (name, t, vs) in &corpus.towers {
            let t = t.with_precision(ctx.precision_bits);
            for v in vs {
                let subject = format!("{name} over {v}");
                match check_measure_refinement(&t, *v) {
                    Ok(r) => {
                        let ids: Vec<String> = r
                            .identities
                            .iter()
                            .map(|i| format!("{} = {}", i.coarse_weight, i.fine_weights.join(" + ")))
                            .collect();
                        out.push(CheckItem::new(self.name(), subject, r.passed, Some(r.identities.len().to_string()), ids.join("; ")));
                    }
                    Err(e) => out.push(CheckItem::error(self.name(), subject, &e)),
                }
            }
        }
        out
    }
}

/// Transitivity, the composition law and invariance of weighted sums.
pub struct GaloisInvariance;

fn galois_fiber(k: &NumberField, v: RationalPlace, corpus: &Corpus, ctx: &CheckContext) -> Result<(bool, String)> {
    let prec = ctx.precision_bits;
    let orbits = orbit(k, v, prec)?;
    let transitive = orbits.len() == 1;
    let auts = k.automorphisms();
    let perms = auts.iter().map(|s| permutation(s, v, prec)).collect::<Result<Vec<_>>>()?;
    let mut composition = true;
    for (s, ps) in auts.iter().zip(&perms) {
        for (t, pt) in auts.iter().zip(&perms) {
            let st = permutation(&s.compose(t)?, v, prec)?;
            for (w, img) in &st.mapping {
                if ps.mapping[&pt.mapping[w]] != *img {
                    composition = false;
                }
            }
        }
    }
    let fiber = places_above(k, v, prec)?;
    let bits = ctx.bits();
    let mut tables: Vec<BTreeMap<String, Real>> = fiber
        .iter()
        .map(|w| {
            fiber
                .iter()
                .map(|u| (u.id().to_string(), if u == w { Real::one(bits) } else { Real::zero(bits) }))
                .collect()
        })
        .collect();
    for e in corpus.elements.iter().filter(|e| e.element.field() == k && !e.element.is_zero()) {
        let mut t = BTreeMap::new();
        for w in &fiber {
            t.insert(w.id().to_string(), log_abs(w, &e.element, prec)?.log_unnormalized);
        }
        tables.push(t);
    }
    let report = check_invariance(k, v, &tables, prec)?;
    let worst = report
        .lines
        .iter()
        .map(|l| Real::parse(&l.difference, bits).expect("decimal"))
        .fold(Real::zero(bits), |m, x| m.max(&x));
    let invariant = worst < ctx.tolerance;
    Ok((
        transitive && composition && invariant,
        format!("orbits = {}, composition = {composition}, max difference = {}", orbits.len(), dec(&worst)),
    ))
}

impl InvariantCheck for GaloisInvariance {
    fn name(&self) -> &'static str {
        "galois_invariance"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        let mut out = vec![];
        for (k, vs) in corpus.fibers.iter().filter(|(k, _)| k.is_galois()) {
            for v in vs {
                let subject = format!("{} over {v}", k.label());
                match galois_fiber(k, *v, corpus, ctx) {
                    Ok((ok, d)) => out.push(CheckItem::new(self.name(), subject, ok, None, d)),
                    Err(e) => out.push(CheckItem::error(self.name(), subject, &e)),
                }
            }
        }
        out
    }
}

/// Connecting maps commute with the action and restriction.
pub struct GaloisEquivariance;

impl InvariantCheck for GaloisEquivariance {
    fn name(&self) -> &'static str {
        "galois_equivariance"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        let mut out = vec![];
        for (name, t, vs) in &corpus.towers {
            let t = t.with_precision(ctx.precision_bits);
            for j in 0..t.num_levels().saturating_sub(1) {
                for v in vs {
                    let subject = format!("{name} level {} to {j} over {v}", j + 1);
                    match check_equivariance(&t, j, *v) {
                        Ok(lines) => {
                            let bad = lines.iter().filter(|l| !l.passed).count();
                            out.push(CheckItem::new(self.name(), subject, bad == 0, Some(lines.len().to_string()), String::new()));
                        }
                        Err(e) => out.push(CheckItem::error(self.name(), subject, &e)),
                    }
                }
            }
        }
        out
    }
}

/// Rank `|S| - 1` and a nullspace along the all-ones line.
pub struct SUnitRank;

/// Largest angle from the all-ones line allowed for a numeric nullvector.
pub const NULLSPACE_ANGLE: f64 = 1e-10;

fn subsets(primes: &[u64], max_size: usize) -> Vec<Vec<u64>> {
    let mut out = vec![];
    for mask in 1u32..(1 << primes.len()) {
        let s: Vec<u64> = primes.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| *p).collect();
        if s.len() < max_size {
            out.push(s);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Every prime subset `T` with `|T| + 1 <= max_size`, so `S = {inf} ∪ T`
/// has between 2 and `max_size` places.
pub fn sunit_subsets(primes: &[u64], max_size: usize) -> Vec<Vec<u64>> {
    subsets(primes, max_size)
}

impl InvariantCheck for SUnitRank {
    fn name(&self) -> &'static str {
        "sunit_rank"
    }

    fn run(&self, corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckItem> {
        let Some(spec) = &corpus.sunit else { return vec![] };
        let q = NumberField::rationals();
        let mut out = vec![];
        for t in subsets(&spec.primes, spec.max_size) {
            let subject = format!("Q, S = inf,{}", t.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","));
            let gens: Vec<FieldElement> = t.iter().map(|&p| FieldElement::from_int(&q, p as i64)).collect();
            let r = rational_s(&t, ctx.precision_bits).and_then(|s| sunit_matrix(&q, &s, &gens, ctx.precision_bits));
            out.push(match r {
                Ok(m) => {
                    let angle = m.max_nullspace_angle();
                    let ok = m.rank == t.len() && m.nullspace_basis.len() == 1 && angle < NULLSPACE_ANGLE;
                    CheckItem::new(self.name(), subject, ok, Some(format!("{angle:e}")), format!("rank {}", m.rank))
                }
                Err(e) => CheckItem::error(self.name(), subject, &e),
            });
        }
        for (file, d) in &spec.quadratic {
            let subject = format!("{file} with its fundamental unit");
            let r = (|| {
                let k = corpus.fields.get(file).ok_or_else(|| Error::Io(format!("{file} not loaded")))?;
                if k.min_poly() != &crate::number_fields::poly(&[-d, 0, 1]) {
                    return Err(Error::BadShape(format!("{} is not x^2 - {d}", k.label())));
                }
                let eps = fundamental_unit(&(*d).into())?;
                let xi = FieldElement::from_coords(k, vec![eps.a, eps.b])?;
                sunit_matrix(k, &arch_places(k, ctx.precision_bits)?, &[xi], ctx.precision_bits)
            })();
            out.push(match r {
                Ok(m) => {
                    let angle = m.max_nullspace_angle();
                    let ok = m.rank == 1 && m.nullspace_basis.len() == 1 && angle < NULLSPACE_ANGLE;
                    CheckItem::new(self.name(), subject, ok, Some(format!("{angle:e}")), format!("rank {}", m.rank))
                }
                Err(e) => CheckItem::error(self.name(), subject, &e),
            });
        }
        out
    }
}

/// All registered checks in run order.
pub fn invariant_checks() -> Vec<Box<dyn InvariantCheck>> {
    vec![
        Box::new(Isometry),
        Box::new(ProductFormula),
        Box::new(HeightAgreement),
        Box::new(WellBehaved),
        Box::new(MeasureValues),
        Box::new(MeasureRefinement),
        Box::new(GaloisInvariance),
        Box::new(GaloisEquivariance),
        Box::new(SUnitRank),
        Box::new(Kronecker),
    ]
}

pub fn invariant_check(name: &str) -> Option<Box<dyn InvariantCheck>> {
    invariant_checks().into_iter().find(|c| c.name() == name)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub precision_bits: u32,
    pub tolerance: String,
    pub items: Vec<CheckItem>,
    pub passed: usize,
    pub failed: usize,
}

/// Runs the named checks, or all of them, over a corpus.
pub fn run_checks(corpus: &Corpus, ctx: &CheckContext, only: &[String]) -> Result<CheckSummary> {
    let mut checks = vec![];
    if only.is_empty() {
        checks = invariant_checks();
    } else {
        for n in only {
            checks.push(invariant_check(n).ok_or_else(|| Error::Parse(format!("unknown check {n:?}")))?);
        }
    }
    let items: Vec<CheckItem> = checks.iter().flat_map(|c| c.run(corpus, ctx)).collect();
    let passed = items.iter().filter(|i| i.passed).count();
    Ok(CheckSummary {
        precision_bits: ctx.precision_bits,
        tolerance: format!("{:e}", ctx.tolerance.to_f64()),
        failed: items.len() - passed,
        passed,
        items,
    })
}
