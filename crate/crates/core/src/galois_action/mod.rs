//! Automorphisms acting on the places of one level.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::{solve_rational, Real};
use crate::number_fields::{Automorphism, FieldElement, NumberField};
use crate::place_tower::{partition, refinement_map, Tower};
use crate::places::{
    embed_at_root, log_abs, place_root, places_above, Place, PlaceKind, RationalPlace,
};

/// Probe elements separating the places of a finite fiber.
fn probes(field: &NumberField, fiber: &[Place]) -> Vec<FieldElement> {
    let theta = FieldElement::generator(field);
    let mut out: Vec<FieldElement> =
        (0..4).map(|c| theta.add(&FieldElement::from_int(field, c)).expect("same field")).collect();
    for w in fiber {
        if let PlaceKind::Finite { residue_factor, .. } = w.kind() {
            out.push(theta.eval_poly(&residue_factor.to_rat()));
        }
    }
    out.retain(|a| !a.is_zero());
    out
}

fn act_finite(sigma: &Automorphism, place: &Place, fiber: &[Place], precision_bits: u32) -> Result<Place> {
    let inv = sigma.inverse();
    let ps = probes(place.field(), fiber);
    let mut want = vec![];
    for a in &ps {
        want.push(log_abs(place, &inv.apply(a)?, precision_bits)?.exponent.expect("finite"));
    }
    let mut hits = vec![];
    for w in fiber {
        let mut same = true;
        for (a, e) in ps.iter().zip(&want) {
            if log_abs(w, a, precision_bits)?.exponent.as_ref() != Some(e) {
                same = false;
                break;
            }
        }
        if same {
            hits.push(w.clone());
        }
    }
    if hits.len() != 1 {
        return Err(Error::AmbiguousAction(format!("{} matches {} places", place.id(), hits.len())));
    }
    Ok(hits.pop().expect("one hit"))
}

fn act_arch(sigma: &Automorphism, place: &Place, precision_bits: u32) -> Result<Place> {
    // ||a||_{sigma y} = ||sigma^-1 a||_y, and sigma^-1 a = a(s) with s = sigma^-1(t)
    let s = sigma.inverse().generator_image().clone();
    let field = place.field();
    let mut prec = precision_bits;
    let mut last = String::new();
    for _ in 0..3 {
        let bits = working_bits(prec);
        let roots = field.roots(prec)?;
        let (z, err) = embed_at_root(&s, &roots[place_root(place).expect("archimedean")], bits);
        let hits: Vec<usize> = roots
            .iter()
            .enumerate()
            .filter(|(_, r)| z.sub(&r.center().with_bits(bits)).abs() <= &(&err + &r.radius) + &Real::pow2(-(bits as i64) + 16, bits))
            .map(|(i, _)| i)
            .collect();
        if hits.len() == 1 {
            let fiber = places_above(field, RationalPlace::Infinity, precision_bits)?;
            return Ok(fiber
                .into_iter()
                .find(|w| match w.kind() {
                    PlaceKind::Real { root } => *root == hits[0],
                    PlaceKind::ComplexPair { roots } => roots.0 == hits[0] || roots.1 == hits[0],
                    PlaceKind::Finite { .. } => false,
                })
                .expect("every root belongs to a place"));
        }
        last = format!("{} lands near {} roots", place.id(), hits.len());
        prec *= 2;
    }
    Err(Error::AmbiguousAction(last))
}

/// The place `sigma y`, characterized by `||a||_{sigma y} = ||sigma^-1 a||_y`.
pub fn act_on_place(sigma: &Automorphism, place: &Place, precision_bits: u32) -> Result<Place> {
    if sigma.field() != place.field() {
        return Err(Error::FieldMismatch);
    }
    if sigma.is_identity() {
        return Ok(place.clone());
    }
    let fiber = places_above(place.field(), place.rational_place(), precision_bits)?;
    if fiber.len() == 1 {
        return Ok(fiber[0].clone());
    }
    match place.rational_place() {
        RationalPlace::Infinity => act_arch(sigma, place, precision_bits),
        RationalPlace::Prime(_) => act_finite(sigma, place, &fiber, precision_bits),
    }
}

/// The permutation of one fiber induced by an automorphism.
#[derive(Clone, Debug)]
pub struct PlacePermutation {
    pub field: NumberField,
    pub rational_place: RationalPlace,
    pub automorphism: Automorphism,
    pub mapping: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationRecord {
    pub automorphism: String,
    pub mapping: Vec<(String, String)>,
}

impl PlacePermutation {
    pub fn apply(&self, place_id: &str) -> Option<&str> {
        self.mapping.get(place_id).map(|s| s.as_str())
    }

    pub fn is_bijection(&self) -> bool {
        let targets: BTreeSet<&String> = self.mapping.values().collect();
        targets.len() == self.mapping.len() && targets.iter().all(|t| self.mapping.contains_key(*t))
    }

    pub fn record(&self) -> PermutationRecord {
        PermutationRecord {
            automorphism: self.automorphism.to_string(),
            mapping: self.mapping.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
        }
    }
}

pub fn permutation(sigma: &Automorphism, v: RationalPlace, precision_bits: u32) -> Result<PlacePermutation> {
    let field = sigma.field().clone();
    let fiber = places_above(&field, v, precision_bits)?;
    let mut mapping = BTreeMap::new();
    for w in &fiber {
        mapping.insert(w.id().to_string(), act_on_place(sigma, w, precision_bits)?.id().to_string());
    }
    let perm = PlacePermutation { field, rational_place: v, automorphism: sigma.clone(), mapping };
    if !perm.is_bijection() {
        return Err(Error::AmbiguousAction(format!("{sigma} does not permute the fiber over {v}")));
    }
    Ok(perm)
}

/// Orbits of the automorphism group on the fiber over `v`, each sorted
/// by place id.
pub fn orbit(field: &NumberField, v: RationalPlace, precision_bits: u32) -> Result<Vec<Vec<String>>> {
    if !field.is_galois() {
        return Err(Error::NotGalois(0));
    }
    let perms = field
        .automorphisms()
        .iter()
        .map(|s| permutation(s, v, precision_bits))
        .collect::<Result<Vec<_>>>()?;
    let fiber = places_above(field, v, precision_bits)?;
    let mut seen = BTreeSet::new();
    let mut orbits = vec![];
    for w in &fiber {
        if seen.contains(w.id()) {
            continue;
        }
        let o: BTreeSet<String> = perms.iter().map(|p| p.mapping[w.id()].clone()).collect();
        seen.extend(o.iter().cloned());
        orbits.push(o.into_iter().collect());
    }
    Ok(orbits)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceLine {
    pub automorphism: String,
    pub function: usize,
    pub original: String,
    pub translated: String,
    pub difference: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub rational_place: RationalPlace,
    pub tolerance: String,
    pub lines: Vec<InvarianceLine>,
    pub passed: bool,
}

/// Checks `sum_w lambda_w F(sigma w) = sum_w lambda_w F(w)` for every
/// automorphism and every table of per-place values.
pub fn check_invariance(
    field: &NumberField,
    v: RationalPlace,
    tables: &[BTreeMap<String, Real>],
    precision_bits: u32,
) -> Result<InvarianceReport> {
    if !field.is_galois() {
        return Err(Error::NotGalois(0));
    }
    let bits = working_bits(precision_bits);
    let tol = Real::pow2(-(precision_bits as i64) / 4, bits);
    let fiber = places_above(field, v, precision_bits)?;
    let weights: Vec<Real> = fiber.iter().map(|w| Real::from_rational(&w.weight(), bits)).collect();
    let value = |t: &BTreeMap<String, Real>, id: &str| {
        t.get(id).cloned().ok_or_else(|| Error::BadShape(format!("no value for place {id}")))
    };
    let mut lines = vec![];
    for sigma in field.automorphisms() {
        let perm = permutation(&sigma, v, precision_bits)?;
        for (k, t) in tables.iter().enumerate() {
            let mut lhs = Real::zero(bits);
            let mut rhs = Real::zero(bits);
            for (w, lam) in fiber.iter().zip(&weights) {
                lhs = &lhs + &(lam * &value(t, perm.mapping[w.id()].as_str())?);
                rhs = &rhs + &(lam * &value(t, w.id())?);
            }
            let diff = (&lhs - &rhs).abs();
            lines.push(InvarianceLine {
                automorphism: sigma.to_string(),
                function: k,
                original: rhs.to_decimal(30),
                translated: lhs.to_decimal(30),
                difference: diff.to_decimal(30),
                passed: diff < tol,
            });
        }
    }
    let passed = lines.iter().all(|l| l.passed);
    Ok(InvarianceReport { rational_place: v, tolerance: tol.to_decimal(30), lines, passed })
}

/// Restriction of an automorphism of level `i` to the lower level `j`.
pub fn restrict_automorphism(tower: &Tower, sigma: &Automorphism, j: usize) -> Result<Automorphism> {
    let i = tower.level_of(sigma.field()).ok_or(Error::FieldMismatch)?;
    if j > i {
        return Err(Error::LevelMismatch);
    }
    let mut cur = sigma.clone();
    for k in (j..i).rev() {
        cur = restrict_one(tower, &cur, k)?;
    }
    Ok(cur)
}

fn restrict_one(tower: &Tower, sigma: &Automorphism, j: usize) -> Result<Automorphism> {
    let lower = tower.level(j)?;
    let beta = tower.embedding(j + 1)?;
    let target = sigma.apply(beta)?;
    // solve target = sum_k c_k beta^k for rational c
    let d = lower.degree();
    let top = tower.level(j + 1)?.degree();
    let mut powers = vec![FieldElement::one(beta.field())];
    for _ in 1..d {
        let next = powers.last().expect("nonempty").mul(beta)?;
        powers.push(next);
    }
    let rows: Vec<Vec<_>> = (0..top).map(|r| powers.iter().map(|p| p.coords()[r].clone()).collect()).collect();
    let c = solve_rational(&rows, target.coords()).ok_or(Error::NotStabilized(j))?;
    let image = FieldElement::from_coords(lower, c)?;
    lower
        .automorphisms()
        .into_iter()
        .find(|a| a.generator_image() == &image)
        .ok_or(Error::NotStabilized(j))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceLine {
    pub automorphism: String,
    pub place: String,
    pub down_then_act: String,
    pub act_then_down: String,
    pub passed: bool,
}

/// Checks `psi(sigma w) = restrict(sigma) psi(w)` for every automorphism
/// of level `j + 1` and every place of the fiber over `v`.
pub fn check_equivariance(tower: &Tower, j: usize, v: RationalPlace) -> Result<Vec<EquivarianceLine>> {
    let prec = tower.precision_bits();
    let map = refinement_map(tower, j, v)?;
    let fine = partition(tower, j + 1, v)?;
    let coarse = partition(tower, j, v)?;
    let mut out = vec![];
    for sigma in tower.level(j + 1)?.automorphisms() {
        let down = restrict_automorphism(tower, &sigma, j)?;
        for c in &fine.cells {
            let moved = act_on_place(&sigma, &c.place, prec)?;
            let a = map.image(moved.id()).expect("total map").to_string();
            let base = coarse.cell(map.image(c.place.id()).expect("total map")).expect("coarse cell");
            let b = act_on_place(&down, &base.place, prec)?.id().to_string();
            out.push(EquivarianceLine {
                automorphism: sigma.to_string(),
                place: c.place.id().to_string(),
                passed: a == b,
                down_then_act: b,
                act_then_down: a,
            });
        }
    }
    Ok(out)
}
