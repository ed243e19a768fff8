//! Finite stages of the space of places: a chain of Galois fields, the
//! measured partition of each fiber and the maps between levels.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::{format_rational, parse_rational, rat_int, Rational, Real};
use crate::number_fields::{FieldDescription, FieldElement, NumberField};
use crate::places::{
    embed_at_root, log_abs, place_root, places_above, Place, PlaceKind, RationalPlace,
};

/// Default working precision of a tower in bits.
pub const DEFAULT_PRECISION: u32 = 128;

struct TowerData {
    levels: Vec<NumberField>,
    /// `embeddings[j - 1]` is the image of level `j - 1`'s generator in level `j`.
    embeddings: Vec<FieldElement>,
    precision_bits: u32,
    partitions: Mutex<HashMap<(usize, RationalPlace), Arc<MeasuredPartition>>>,
    refinements: Mutex<HashMap<(usize, RationalPlace), Arc<RefinementMap>>>,
}

/// A chain `Q = L_0 ⊂ L_1 ⊂ ... ⊂ L_n` of Galois fields. Cheap to clone.
#[derive(Clone)]
pub struct Tower(Arc<TowerData>);

impl PartialEq for Tower {
    fn eq(&self, other: &Tower) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.levels == other.0.levels && self.0.embeddings == other.0.embeddings)
    }
}

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<&str> = self.0.levels.iter().map(|k| k.label()).collect();
        write!(f, "Tower({})", labels.join(" < "))
    }
}

impl Tower {
    /// Validates the levels and embeddings exactly.
    pub fn new(levels: Vec<NumberField>, embeddings: Vec<FieldElement>) -> Result<Tower> {
        if levels.is_empty() {
            return Err(Error::BadShape("a tower needs at least one level".into()));
        }
        if levels[0].degree() != 1 {
            return Err(Error::BadShape("level 0 must be the rational field".into()));
        }
        if embeddings.len() + 1 != levels.len() {
            return Err(Error::BadShape(format!("{} levels need {} embeddings", levels.len(), levels.len() - 1)));
        }
        for (j, k) in levels.iter().enumerate() {
            if !k.is_galois() {
                return Err(Error::NotGalois(j));
            }
        }
        for (i, image) in embeddings.iter().enumerate() {
            let j = i + 1;
            if image.field() != &levels[j] {
                return Err(Error::FieldMismatch);
            }
            if levels[j].degree() % levels[i].degree() != 0 {
                return Err(Error::BadShape(format!("degree of level {i} does not divide that of level {j}")));
            }
            let residual = image.eval_poly(levels[i].min_rat());
            if !residual.is_zero() {
                return Err(Error::BadEmbedding {
                    level: j,
                    residual: residual.coords().iter().map(format_rational).collect(),
                });
            }
        }
        Ok(Tower(Arc::new(TowerData {
            levels,
            embeddings,
            precision_bits: DEFAULT_PRECISION,
            partitions: Mutex::new(HashMap::new()),
            refinements: Mutex::new(HashMap::new()),
        })))
    }

    /// Same tower with another working precision and fresh caches.
    pub fn with_precision(&self, precision_bits: u32) -> Tower {
        Tower(Arc::new(TowerData {
            levels: self.0.levels.clone(),
            embeddings: self.0.embeddings.clone(),
            precision_bits,
            partitions: Mutex::new(HashMap::new()),
            refinements: Mutex::new(HashMap::new()),
        }))
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.precision_bits
    }

    pub fn levels(&self) -> &[NumberField] {
        &self.0.levels
    }

    pub fn num_levels(&self) -> usize {
        self.0.levels.len()
    }

    pub fn level(&self, j: usize) -> Result<&NumberField> {
        self.0.levels.get(j).ok_or_else(|| Error::BadShape(format!("tower has no level {j}")))
    }

    pub fn top(&self) -> &NumberField {
        self.0.levels.last().expect("nonempty")
    }

    /// Image of level `j - 1`'s generator in level `j`.
    pub fn embedding(&self, j: usize) -> Result<&FieldElement> {
        if j == 0 {
            return Err(Error::BadShape("level 0 has no embedding".into()));
        }
        self.0.embeddings.get(j - 1).ok_or_else(|| Error::BadShape(format!("tower has no level {j}")))
    }

    /// Maps an element of level `from` into level `to >= from`.
    pub fn embed(&self, a: &FieldElement, from: usize, to: usize) -> Result<FieldElement> {
        if a.field() != self.level(from)? || to < from {
            return Err(Error::FieldMismatch);
        }
        let mut x = a.clone();
        for j in from + 1..=to {
            x = self.embedding(j)?.eval_poly(&x.to_poly());
        }
        Ok(x)
    }

    /// Index of the level whose field is `field`, if any.
    pub fn level_of(&self, field: &NumberField) -> Option<usize> {
        self.0.levels.iter().position(|k| k == field)
    }

    pub fn to_description(&self) -> TowerDescription {
        TowerDescription {
            levels: self.0.levels.iter().map(|k| k.to_description()).collect(),
            embeddings: self.0.embeddings.iter().map(|e| e.coords().iter().map(format_rational).collect()).collect(),
        }
    }
}

/// Tower file: `{ levels: [field descriptions], embeddings: [[coords]] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerDescription {
    pub levels: Vec<FieldDescription>,
    pub embeddings: Vec<Vec<String>>,
}

impl TowerDescription {
    /// Builds the tower. Short coordinate lists are padded with zeros.
    pub fn build(&self) -> Result<Tower> {
        let levels = self.levels.iter().map(|d| d.build()).collect::<Result<Vec<_>>>()?;
        if self.embeddings.len() + 1 != levels.len() {
            return Err(Error::BadShape(format!("{} levels need {} embeddings", levels.len(), levels.len().saturating_sub(1))));
        }
        let mut embeddings = vec![];
        for (i, cs) in self.embeddings.iter().enumerate() {
            let k = &levels[i + 1];
            if cs.len() > k.degree() {
                return Err(Error::BadShape(format!("embedding {} has {} coordinates", i + 1, cs.len())));
            }
            let mut coords = cs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
            coords.resize(k.degree(), rat_int(0));
            embeddings.push(FieldElement::from_coords(k, coords)?);
        }
        Tower::new(levels, embeddings)
    }
}

pub fn tower_from_json(text: &str) -> Result<Tower> {
    let d: TowerDescription = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    d.build()
}

pub fn tower_new(levels: Vec<NumberField>, embeddings: Vec<FieldElement>) -> Result<Tower> {
    Tower::new(levels, embeddings)
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub place: Place,
    pub weight: Rational,
}

/// The fiber of one rational place at one level, each place weighted by
/// `d_w / [L_j : Q]`.
#[derive(Clone, Debug)]
pub struct MeasuredPartition {
    pub level: usize,
    pub rational_place: RationalPlace,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub place_id: String,
    pub d_v: usize,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub level: usize,
    pub field: String,
    pub rational_place: RationalPlace,
    pub cells: Vec<CellRecord>,
    pub total_weight: String,
}

impl MeasuredPartition {
    pub fn total_weight(&self) -> Rational {
        self.cells.iter().fold(Rational::zero(), |s, c| s + &c.weight)
    }

    pub fn place_ids(&self) -> Vec<String> {
        self.cells.iter().map(|c| c.place.id().to_string()).collect()
    }

    pub fn cell(&self, place_id: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.place.id() == place_id)
    }

    pub fn places(&self) -> Vec<Place> {
        self.cells.iter().map(|c| c.place.clone()).collect()
    }

    pub fn record(&self) -> PartitionRecord {
        PartitionRecord {
            level: self.level,
            field: self.cells.first().map(|c| c.place.field().label().to_string()).unwrap_or_default(),
            rational_place: self.rational_place,
            cells: self
                .cells
                .iter()
                .map(|c| CellRecord {
                    place_id: c.place.id().to_string(),
                    d_v: c.place.local_degree(),
                    weight: format_rational(&c.weight),
                })
                .collect(),
            total_weight: format_rational(&self.total_weight()),
        }
    }
}

/// Measured partition of the fiber over `v` at level `j`.
pub fn partition(tower: &Tower, j: usize, v: RationalPlace) -> Result<Arc<MeasuredPartition>> {
    let field = tower.level(j)?.clone();
    if let Some(hit) = tower.0.partitions.lock().expect("partition cache").get(&(j, v)) {
        return Ok(hit.clone());
    }
    let places = places_above(&field, v, tower.precision_bits())?;
    let cells = places.into_iter().map(|p| Cell { weight: p.weight(), place: p }).collect();
    let part = Arc::new(MeasuredPartition { level: j, rational_place: v, cells });
    tower.0.partitions.lock().expect("partition cache").insert((j, v), part.clone());
    Ok(part)
}

/// The connecting map from level `j + 1` to level `j` over one rational
/// place, keyed by place id.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementMap {
    pub fine_level: usize,
    pub coarse_level: usize,
    pub rational_place: RationalPlace,
    pub assignment: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementRecord {
    pub fine_level: usize,
    pub coarse_level: usize,
    pub rational_place: RationalPlace,
    pub assignment: Vec<(String, String)>,
}

impl RefinementMap {
    pub fn image(&self, fine_id: &str) -> Option<&str> {
        self.assignment.get(fine_id).map(|s| s.as_str())
    }

    pub fn preimage(&self, coarse_id: &str) -> Vec<String> {
        self.assignment.iter().filter(|(_, c)| c.as_str() == coarse_id).map(|(f, _)| f.clone()).collect()
    }

    pub fn record(&self) -> RefinementRecord {
        RefinementRecord {
            fine_level: self.fine_level,
            coarse_level: self.coarse_level,
            rational_place: self.rational_place,
            assignment: self.assignment.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
        }
    }
}

/// Elements of level `j` whose absolute values tell the places over `p`
/// apart: the generator, its shifts by 1, 2, 3 and the residue factors.
pub fn probe_elements(coarse: &MeasuredPartition, field: &NumberField) -> Vec<FieldElement> {
    let theta = FieldElement::generator(field);
    let mut out: Vec<FieldElement> =
        (0..4).map(|c| theta.add(&FieldElement::from_int(field, c)).expect("same field")).collect();
    if coarse.cells.len() > 1 {
        for cell in &coarse.cells {
            if let PlaceKind::Finite { residue_factor, .. } = cell.place.kind() {
                out.push(theta.eval_poly(&residue_factor.to_rat()));
            }
        }
    }
    out.retain(|a| !a.is_zero());
    out
}

/// Exact valuation fingerprint of a finite place on a list of probes.
pub fn fingerprint(place: &Place, probes: &[FieldElement], precision_bits: u32) -> Result<Vec<Rational>> {
    probes
        .iter()
        .map(|a| Ok(log_abs(place, a, precision_bits)?.exponent.expect("finite place")))
        .collect()
}

fn finite_assignment(tower: &Tower, j: usize, fine: &MeasuredPartition, coarse: &MeasuredPartition) -> Result<BTreeMap<String, String>> {
    let prec = tower.precision_bits();
    let mut out = BTreeMap::new();
    if coarse.cells.len() == 1 {
        let target = coarse.cells[0].place.id().to_string();
        for c in &fine.cells {
            out.insert(c.place.id().to_string(), target.clone());
        }
        return Ok(out);
    }
    let probes = probe_elements(coarse, tower.level(j)?);
    let lifted = probes.iter().map(|a| tower.embed(a, j, j + 1)).collect::<Result<Vec<_>>>()?;
    let mut coarse_fp = vec![];
    for c in &coarse.cells {
        coarse_fp.push((c.place.id().to_string(), fingerprint(&c.place, &probes, prec)?));
    }
    for c in &fine.cells {
        let fp = fingerprint(&c.place, &lifted, prec)?;
        let hits: Vec<&String> = coarse_fp.iter().filter(|(_, g)| *g == fp).map(|(id, _)| id).collect();
        if hits.len() != 1 {
            return Err(Error::AmbiguousRestriction(format!(
                "{} matches {} places of level {j}",
                c.place.id(),
                hits.len()
            )));
        }
        out.insert(c.place.id().to_string(), hits[0].clone());
    }
    Ok(out)
}

fn arch_assignment(tower: &Tower, j: usize, fine: &MeasuredPartition, coarse: &MeasuredPartition) -> Result<BTreeMap<String, String>> {
    let beta = tower.embedding(j + 1)?;
    let mut prec = tower.precision_bits();
    let mut last = String::new();
    for _ in 0..3 {
        let bits = working_bits(prec);
        let fine_roots = tower.level(j + 1)?.roots(prec)?;
        let coarse_roots = tower.level(j)?.roots(prec)?;
        let mut out = BTreeMap::new();
        let mut ok = true;
        for c in &fine.cells {
            let r = &fine_roots[place_root(&c.place).expect("archimedean")];
            let (z, err) = embed_at_root(beta, r, bits);
            let hits: Vec<usize> = coarse_roots
                .iter()
                .enumerate()
                .filter(|(_, s)| {
                    let d = z.sub(&s.center().with_bits(bits)).abs();
                    d <= &(&err + &s.radius) + &Real::pow2(-(bits as i64) + 16, bits)
                })
                .map(|(i, _)| i)
                .collect();
            if hits.len() != 1 {
                ok = false;
                last = format!("{} is near {} roots of level {j}", c.place.id(), hits.len());
                break;
            }
            let target = coarse
                .cells
                .iter()
                .find(|cc| match cc.place.kind() {
                    PlaceKind::Real { root } => *root == hits[0],
                    PlaceKind::ComplexPair { roots } => roots.0 == hits[0] || roots.1 == hits[0],
                    PlaceKind::Finite { .. } => false,
                })
                .expect("every root belongs to a place");
            out.insert(c.place.id().to_string(), target.place.id().to_string());
        }
        if ok {
            return Ok(out);
        }
        prec *= 2;
    }
    Err(Error::AmbiguousRestriction(last))
}

/// Connecting map from level `j + 1` down to level `j` over `v`.
pub fn refinement_map(tower: &Tower, j: usize, v: RationalPlace) -> Result<Arc<RefinementMap>> {
    if j + 1 >= tower.num_levels() {
        return Err(Error::BadShape(format!("tower has no level {}", j + 1)));
    }
    if let Some(hit) = tower.0.refinements.lock().expect("refinement cache").get(&(j, v)) {
        return Ok(hit.clone());
    }
    let fine = partition(tower, j + 1, v)?;
    let coarse = partition(tower, j, v)?;
    let assignment = match v {
        RationalPlace::Infinity => arch_assignment(tower, j, &fine, &coarse)?,
        RationalPlace::Prime(_) => finite_assignment(tower, j, &fine, &coarse)?,
    };
    for c in &coarse.cells {
        if !assignment.values().any(|t| t == c.place.id()) {
            return Err(Error::RefinementMismatch(format!("{} at level {j} has no preimage", c.place.id())));
        }
    }
    let map = Arc::new(RefinementMap { fine_level: j + 1, coarse_level: j, rational_place: v, assignment });
    tower.0.refinements.lock().expect("refinement cache").insert((j, v), map.clone());
    Ok(map)
}

/// Image of a place id of level `from` at the lower level `to`.
pub fn project_place(tower: &Tower, from: usize, to: usize, v: RationalPlace, place_id: &str) -> Result<String> {
    let mut id = place_id.to_string();
    for j in (to..from).rev() {
        let m = refinement_map(tower, j, v)?;
        id = m.image(&id).ok_or_else(|| Error::BadShape(format!("{id} is not a place of level {}", j + 1)))?.to_string();
    }
    Ok(id)
}

/// One checked identity `weight(coarse) = sum of fine weights`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementIdentity {
    pub coarse_level: usize,
    pub coarse_place: String,
    pub coarse_weight: String,
    pub fine_places: Vec<String>,
    pub fine_weights: Vec<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub rational_place: RationalPlace,
    pub identities: Vec<RefinementIdentity>,
    pub passed: bool,
}

/// Checks exact additivity of the measure along every level pair.
pub fn check_measure_refinement(tower: &Tower, v: RationalPlace) -> Result<MeasureReport> {
    let mut identities = vec![];
    for j in 0..tower.num_levels().saturating_sub(1) {
        let coarse = partition(tower, j, v)?;
        let fine = partition(tower, j + 1, v)?;
        let map = refinement_map(tower, j, v)?;
        for c in &coarse.cells {
            let pre = map.preimage(c.place.id());
            let ws: Vec<Rational> = pre.iter().map(|id| fine.cell(id).expect("fine cell").weight.clone()).collect();
            let sum = ws.iter().fold(Rational::zero(), |s, w| s + w);
            let holds = sum == c.weight;
            if !holds {
                return Err(Error::RefinementMismatch(format!(
                    "{} at level {j}: weight {} but preimage sums to {}",
                    c.place.id(),
                    format_rational(&c.weight),
                    format_rational(&sum)
                )));
            }
            identities.push(RefinementIdentity {
                coarse_level: j,
                coarse_place: c.place.id().to_string(),
                coarse_weight: format_rational(&c.weight),
                fine_places: pre,
                fine_weights: ws.iter().map(format_rational).collect(),
                holds,
            });
        }
    }
    for j in 0..tower.num_levels() {
        let total = partition(tower, j, v)?.total_weight();
        if !total.is_one() {
            return Err(Error::RefinementMismatch(format!("fiber at level {j} has mass {}", format_rational(&total))));
        }
    }
    Ok(MeasureReport { rational_place: v, identities, passed: true })
}
