use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::{Rational, Real};
use crate::number_fields::FieldElement;
use crate::place_tower::{partition, refinement_map, Tower};
use crate::places::{log_abs, support_primes, RationalPlace};

#[derive(Clone, Debug)]
pub struct StepCell {
    pub place_id: String,
    pub weight: Rational,
    pub value: Real,
}

/// A locally constant function on the places of one tower level. Fibers
/// absent from `fibers` carry the value 0. The zero function built from an
/// empty combination has no tower.
#[derive(Clone, Debug)]
pub struct StepFunction {
    tower: Option<Tower>,
    level: usize,
    precision_bits: u32,
    fibers: BTreeMap<RationalPlace, Vec<StepCell>>,
}

impl StepFunction {
    pub fn zero(tower: &Tower, level: usize) -> StepFunction {
        StepFunction { tower: Some(tower.clone()), level, precision_bits: tower.precision_bits(), fibers: BTreeMap::new() }
    }

    /// The zero function with no tower attached; it combines with any
    /// other function.
    pub fn empty(precision_bits: u32) -> StepFunction {
        StepFunction { tower: None, level: 0, precision_bits, fibers: BTreeMap::new() }
    }

    /// Builds a function from values on whole fibers; every place of each
    /// listed fiber must be present.
    pub fn from_values(
        tower: &Tower,
        level: usize,
        values: &BTreeMap<RationalPlace, BTreeMap<String, Real>>,
    ) -> Result<StepFunction> {
        let mut fibers = BTreeMap::new();
        for (v, table) in values {
            let part = partition(tower, level, *v)?;
            if table.len() != part.cells.len() {
                return Err(Error::BadShape(format!(
                    "fiber over {v} at level {level} has {} places, got {} values",
                    part.cells.len(),
                    table.len()
                )));
            }
            let mut cells = vec![];
            for c in &part.cells {
                let value = table
                    .get(c.place.id())
                    .ok_or_else(|| Error::BadShape(format!("no value for {} over {v}", c.place.id())))?;
                cells.push(StepCell { place_id: c.place.id().to_string(), weight: c.weight.clone(), value: value.clone() });
            }
            fibers.insert(*v, cells);
        }
        Ok(StepFunction { tower: Some(tower.clone()), level, precision_bits: tower.precision_bits(), fibers })
    }

    pub fn tower(&self) -> Option<&Tower> {
        self.tower.as_ref()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn bits(&self) -> usize {
        working_bits(self.precision_bits)
    }

    pub fn support(&self) -> Vec<RationalPlace> {
        self.fibers.keys().copied().collect()
    }

    pub fn fibers(&self) -> &BTreeMap<RationalPlace, Vec<StepCell>> {
        &self.fibers
    }

    pub fn cells(&self) -> impl Iterator<Item = (RationalPlace, &StepCell)> {
        self.fibers.iter().flat_map(|(v, cs)| cs.iter().map(move |c| (*v, c)))
    }

    /// Value at a place, zero off the support.
    pub fn value(&self, v: RationalPlace, place_id: &str) -> Real {
        self.fibers
            .get(&v)
            .and_then(|cs| cs.iter().find(|c| c.place_id == place_id))
            .map(|c| c.value.clone())
            .unwrap_or_else(|| Real::zero(self.bits()))
    }

    pub fn is_zero(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn scale(&self, q: &Rational) -> StepFunction {
        let k = Real::from_rational(q, self.bits());
        let mut out = self.clone();
        for c in out.fibers.values_mut().flatten() {
            c.value = &c.value * &k;
        }
        out.drop_zero_fibers();
        out
    }

    fn drop_zero_fibers(&mut self) {
        self.fibers.retain(|_, cs| cs.iter().any(|c| !c.value.is_zero()));
    }

    pub fn to_table(&self, tower_label: &str) -> FunctionTable {
        FunctionTable {
            tower: tower_label.to_string(),
            level: self.level,
            support: self.support(),
            values: self.cells().map(|(v, c)| TableEntry(v, c.place_id.clone(), c.value.to_decimal(40))).collect(),
            precision_bits: self.precision_bits,
        }
    }
}

/// `f_a(w) = log ||a||_w` on every fiber where it is not identically zero.
pub fn embed_fa(tower: &Tower, level: usize, a: &FieldElement) -> Result<StepFunction> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    if a.field() != tower.level(level)? {
        return Err(Error::FieldMismatch);
    }
    let prec = tower.precision_bits();
    let mut fibers = BTreeMap::new();
    let mut rational_places = vec![RationalPlace::Infinity];
    rational_places.extend(support_primes(a)?.into_iter().map(RationalPlace::Prime));
    for v in rational_places {
        let part = partition(tower, level, v)?;
        let mut cells = vec![];
        for c in &part.cells {
            let lv = log_abs(&c.place, a, prec)?;
            cells.push(StepCell { place_id: c.place.id().to_string(), weight: c.weight.clone(), value: lv.log_unnormalized });
        }
        if cells.iter().any(|c| !c.value.is_zero()) {
            fibers.insert(v, cells);
        }
    }
    Ok(StepFunction { tower: Some(tower.clone()), level, precision_bits: prec, fibers })
}

/// `sum_w lambda_w F(w)`.
pub fn integral(f: &StepFunction) -> Real {
    let bits = f.bits();
    f.cells().fold(Real::zero(bits), |s, (_, c)| &s + &(&Real::from_rational(&c.weight, bits) * &c.value))
}

/// Exponent of an L^p norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub fn new(p: f64) -> Result<LpExponent> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::BadExponent(p.to_string()));
        }
        Ok(if p.is_infinite() { LpExponent::Infinity } else { LpExponent::Finite(p) })
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<LpExponent> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "sup" => Ok(LpExponent::Infinity),
            t => LpExponent::new(t.parse().map_err(|_| Error::BadExponent(s.to_string()))?),
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => write!(f, "{p}"),
            LpExponent::Infinity => write!(f, "inf"),
        }
    }
}

/// `(sum_w lambda_w |F(w)|^p)^(1/p)`, or `max |F|` for the sup norm.
pub fn lp_norm(f: &StepFunction, p: LpExponent) -> Result<Real> {
    let bits = f.bits();
    match p {
        LpExponent::Infinity => Ok(f.cells().fold(Real::zero(bits), |m, (_, c)| m.max(&c.value.abs()))),
        LpExponent::Finite(p) => {
            if p.is_nan() || p < 1.0 {
                return Err(Error::BadExponent(p.to_string()));
            }
            let integer = p.fract() == 0.0 && p <= 64.0;
            let pr = Real::from_f64(p, bits);
            let mut s = Real::zero(bits);
            for (_, c) in f.cells() {
                let a = c.value.abs();
                let term = if integer { a.powi(p as usize) } else { a.powf(&pr) };
                s = &s + &(&Real::from_rational(&c.weight, bits) * &term);
            }
            Ok(if p == 1.0 {
                s
            } else if p == 2.0 {
                s.sqrt()
            } else {
                s.powf(&(&Real::one(bits) / &pr))
            })
        }
    }
}

/// `sum_i c_i F_i` over functions on one tower level.
pub fn linear_combine(terms: &[(Rational, StepFunction)]) -> Result<StepFunction> {
    let prec = terms.iter().map(|(_, f)| f.precision_bits).max().unwrap_or(128);
    let mut out = StepFunction::empty(prec);
    for (q, f) in terms {
        let g = f.scale(q);
        let Some(t) = &g.tower else { continue };
        match &out.tower {
            None => {
                out.tower = Some(t.clone());
                out.level = g.level;
            }
            Some(u) => {
                if u != t || out.level != g.level {
                    return Err(Error::LevelMismatch);
                }
            }
        }
        for (v, cells) in g.fibers {
            match out.fibers.get_mut(&v) {
                None => {
                    out.fibers.insert(v, cells);
                }
                Some(acc) => {
                    for (a, b) in acc.iter_mut().zip(cells) {
                        debug_assert_eq!(a.place_id, b.place_id);
                        a.value = &a.value + &b.value;
                    }
                }
            }
        }
    }
    out.drop_zero_fibers();
    Ok(out)
}

/// The same function viewed one level up: constant on fibers of the
/// connecting map.
pub fn refine(f: &StepFunction, to_level: usize) -> Result<StepFunction> {
    let Some(tower) = &f.tower else {
        return Ok(f.clone());
    };
    if to_level < f.level {
        return Err(Error::LevelMismatch);
    }
    if to_level >= tower.num_levels() {
        return Err(Error::BadShape(format!("tower has no level {to_level}")));
    }
    let mut cur = f.clone();
    for j in f.level..to_level {
        let mut fibers = BTreeMap::new();
        for (v, cells) in &cur.fibers {
            let map = refinement_map(tower, j, *v)?;
            let fine = partition(tower, j + 1, *v)?;
            let mut out = vec![];
            for c in &fine.cells {
                let target = map.image(c.place.id()).expect("total map");
                let value = cells.iter().find(|x| x.place_id == target).expect("coarse cell").value.clone();
                out.push(StepCell { place_id: c.place.id().to_string(), weight: c.weight.clone(), value });
            }
            fibers.insert(*v, out);
        }
        cur = StepFunction { tower: cur.tower.clone(), level: j + 1, precision_bits: cur.precision_bits, fibers };
    }
    Ok(cur)
}

/// One entry `[rational place, place id, value]` of a function table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry(pub RationalPlace, pub String, pub String);

/// Function table file: `{ tower, level, support, values, precision_bits }`.
/// Each value entry may also be written as `[place_id, value]`; the fiber
/// is then read off the place id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionTable {
    pub tower: String,
    pub level: usize,
    pub support: Vec<RationalPlace>,
    #[serde(deserialize_with = "de_entries")]
    pub values: Vec<TableEntry>,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
}

fn default_precision() -> u32 {
    crate::place_tower::DEFAULT_PRECISION
}

fn de_entries<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<TableEntry>, D::Error> {
    use serde::de::Error as _;
    let raw: Vec<Vec<serde_json::Value>> = Deserialize::deserialize(d)?;
    let text = |x: &serde_json::Value| match x {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(D::Error::custom(format!("bad table entry {other}"))),
    };
    raw.iter()
        .map(|e| match e.len() {
            2 => {
                let id = text(&e[0])?;
                let v = place_of_id(&id).map_err(D::Error::custom)?;
                Ok(TableEntry(v, id, text(&e[1])?))
            }
            3 => {
                let v: RationalPlace = text(&e[0])?.parse().map_err(D::Error::custom)?;
                Ok(TableEntry(v, text(&e[1])?, text(&e[2])?))
            }
            n => Err(D::Error::custom(format!("table entry has {n} items"))),
        })
        .collect()
}

/// Rational place below a place id such as `arch:c0` or `fin:5:2.1`.
pub fn place_of_id(id: &str) -> Result<RationalPlace> {
    if id.starts_with("arch:") {
        return Ok(RationalPlace::Infinity);
    }
    let mut parts = id.split(':');
    match (parts.next(), parts.next()) {
        (Some("fin"), Some(p)) => p.parse(),
        _ => Err(Error::Parse(format!("bad place id {id:?}"))),
    }
}

impl FunctionTable {
    pub fn build(&self, tower: &Tower) -> Result<StepFunction> {
        let tower = if tower.precision_bits() == self.precision_bits { tower.clone() } else { tower.with_precision(self.precision_bits) };
        let bits = working_bits(self.precision_bits);
        let mut values: BTreeMap<RationalPlace, BTreeMap<String, Real>> =
            self.support.iter().map(|v| (*v, BTreeMap::new())).collect();
        for TableEntry(v, id, x) in &self.values {
            let fiber = values.get_mut(v).ok_or_else(|| Error::BadShape(format!("{id} lies over {v}, outside the support")))?;
            fiber.insert(id.clone(), Real::parse(x, bits)?);
        }
        StepFunction::from_values(&tower, self.level, &values)
    }
}

pub fn function_from_json(text: &str, tower: &Tower) -> Result<StepFunction> {
    let t: FunctionTable = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    t.build(tower)
}
