//! Places of a number field, the absolute values attached to them, and the
//! Weil height.

mod height;
mod hensel;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use height::{
    height, height_mahler, height_method, height_methods, product_defect, HeightMethod, HeightResult, MahlerHeight,
    PlaceSumHeight,
};
pub use hensel::{hensel_lift, valuation_at_root};

use crate::error::{Error, Result};
use crate::exact_algebra::modp::factor_mod_p;
use crate::exact_algebra::primes::{factor_integer, is_prime};
use crate::exact_algebra::rational::rat_valuation;
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::{dedekind_maximal_at_p, Complex, ComplexApprox, IntPolynomial, Rational, Real};
use crate::number_fields::{FieldElement, NumberField};

/// A place of Q: the archimedean place or a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RationalPlace {
    Infinity,
    Prime(u64),
}

impl fmt::Display for RationalPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalPlace::Infinity => write!(f, "inf"),
            RationalPlace::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for RationalPlace {
    type Err = Error;

    fn from_str(s: &str) -> Result<RationalPlace> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(RationalPlace::Infinity),
            t => {
                let p: u64 = t.parse().map_err(|_| Error::Parse(format!("bad rational place {s:?}")))?;
                if !is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                Ok(RationalPlace::Prime(p))
            }
        }
    }
}

impl Serialize for RationalPlace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalPlace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<RationalPlace, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let s = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("bad rational place {other}"))),
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlaceKind {
    Real { root: usize },
    ComplexPair { roots: (usize, usize) },
    Finite {
        p: u64,
        /// Monic irreducible factor of the defining polynomial mod p, with
        /// coefficients in `[0, p)`.
        residue_factor: IntPolynomial,
        e: usize,
        f: usize,
        /// Whether `Z[t]` is maximal at p. When it is not (only possible
        /// for a single place above p) the local degree is still exact but
        /// the split into `e` and `f` is read off the factorization.
        maximal_order: bool,
    },
}

struct PlaceData {
    field: NumberField,
    kind: PlaceKind,
    id: String,
    places_above: usize,
    lifts: Mutex<HashMap<u32, IntPolynomial>>,
}

#[derive(Clone)]
pub struct Place(Arc<PlaceData>);

impl PartialEq for Place {
    fn eq(&self, other: &Place) -> bool {
        self.0.id == other.0.id && self.0.field == other.0.field
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Place({} of {})", self.0.id, self.0.field.label())
    }
}

/// JSON form of a place listing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceRecord {
    pub place_id: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<usize>,
    pub d_v: usize,
}

impl Place {
    fn new(field: &NumberField, kind: PlaceKind, places_above: usize) -> Place {
        let id = match &kind {
            PlaceKind::Real { root } => format!("arch:r{root}"),
            PlaceKind::ComplexPair { roots } => format!("arch:c{}", roots.0),
            PlaceKind::Finite { p, residue_factor, .. } => {
                let cs: Vec<String> = residue_factor.coeffs().iter().map(|c| c.to_string()).collect();
                format!("fin:{p}:{}", cs.join("."))
            }
        };
        Place(Arc::new(PlaceData { field: field.clone(), kind, id, places_above, lifts: Mutex::new(HashMap::new()) }))
    }

    pub fn id(&self) -> &str {
        &self.0.id
    }

    pub fn field(&self) -> &NumberField {
        &self.0.field
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.0.kind
    }

    /// Number of places of the field over the same rational place.
    pub fn places_above(&self) -> usize {
        self.0.places_above
    }

    pub fn local_degree(&self) -> usize {
        match &self.0.kind {
            PlaceKind::Real { .. } => 1,
            PlaceKind::ComplexPair { .. } => 2,
            PlaceKind::Finite { e, f, .. } => e * f,
        }
    }

    pub fn rational_place(&self) -> RationalPlace {
        match &self.0.kind {
            PlaceKind::Finite { p, .. } => RationalPlace::Prime(*p),
            _ => RationalPlace::Infinity,
        }
    }

    pub fn is_archimedean(&self) -> bool {
        !matches!(self.0.kind, PlaceKind::Finite { .. })
    }

    /// Exact measure weight `d_v / [k : Q]`.
    pub fn weight(&self) -> Rational {
        Rational::new(BigInt::from(self.local_degree()), BigInt::from(self.0.field.degree()))
    }

    pub fn record(&self) -> PlaceRecord {
        let (kind, p, e, f) = match &self.0.kind {
            PlaceKind::Real { .. } => ("real", None, None, None),
            PlaceKind::ComplexPair { .. } => ("complex", None, None, None),
            PlaceKind::Finite { p, e, f, .. } => ("finite", Some(*p), Some(*e), Some(*f)),
        };
        PlaceRecord { place_id: self.0.id.clone(), kind: kind.into(), p, e, f, d_v: self.local_degree() }
    }

    fn lift(&self, n: u32) -> IntPolynomial {
        let PlaceKind::Finite { p, residue_factor, .. } = &self.0.kind else {
            unreachable!("lift of an archimedean place")
        };
        let mut cache = self.0.lifts.lock().expect("lift cache");
        cache
            .entry(n)
            .or_insert_with(|| {
                let g = crate::exact_algebra::modp::FpPoly::from_int(residue_factor, *p);
                hensel_lift(self.0.field.min_poly(), &g, n)
            })
            .clone()
    }

    /// Lift of the residue factor to precision `p^n`.
    pub fn residue_lift(&self, n: u32) -> Option<IntPolynomial> {
        match self.0.kind {
            PlaceKind::Finite { .. } => Some(self.lift(n)),
            _ => None,
        }
    }
}

/// Archimedean places: one per real root, one per conjugate pair.
pub fn arch_places(field: &NumberField, precision_bits: u32) -> Result<Vec<Place>> {
    let roots = field.roots(precision_bits)?;
    let mut kinds = vec![];
    for (i, r) in roots.iter().enumerate() {
        match r.conjugate {
            None => kinds.push(PlaceKind::Real { root: i }),
            Some(j) if j > i => kinds.push(PlaceKind::ComplexPair { roots: (i, j) }),
            Some(_) => {}
        }
    }
    let n = kinds.len();
    Ok(kinds.into_iter().map(|k| Place::new(field, k, n)).collect())
}

/// Finite places above `p`, one per irreducible factor of the defining
/// polynomial mod p.
pub fn finite_places(field: &NumberField, p: u64) -> Result<Vec<Place>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let factors = factor_mod_p(field.min_poly(), p)?;
    let maximal = dedekind_maximal_at_p(field.min_poly(), p)?;
    if factors.len() > 1 && !maximal {
        return Err(Error::NonMaximalOrder { p });
    }
    let n = factors.len();
    Ok(factors
        .into_iter()
        .map(|(g, e)| {
            let f = g.degree();
            Place::new(field, PlaceKind::Finite { p, residue_factor: g.to_int(), e, f, maximal_order: maximal }, n)
        })
        .collect())
}

/// All places of `field` above one rational place.
pub fn places_above(field: &NumberField, v: RationalPlace, precision_bits: u32) -> Result<Vec<Place>> {
    match v {
        RationalPlace::Infinity => arch_places(field, precision_bits),
        RationalPlace::Prime(p) => finite_places(field, p),
    }
}

#[derive(Clone, Debug)]
pub struct LocalValue {
    pub place_id: String,
    /// `log ||a||_v`.
    pub log_unnormalized: Real,
    /// `log |a|_v = (d_v / d) log ||a||_v`.
    pub log_normalized: Real,
    /// `v_P(a)` when it is determined.
    pub valuation: Option<i64>,
    /// Finite places: the rational `c` with `log ||a||_v = -c log p`.
    pub exponent: Option<Rational>,
    /// Bound on the absolute error of `log_unnormalized`.
    pub error_bound: Real,
}

/// Starting p-adic precision for Hensel valuations.
pub const HENSEL_START: u32 = 20;

fn clear_denominators(a: &FieldElement) -> (IntPolynomial, BigInt) {
    let den = a.coords().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let dq = Rational::from_integer(den.clone());
    let num = IntPolynomial::new(a.coords().iter().map(|c| (c * &dq).to_integer()).collect());
    (num, den)
}

fn finite_exponent(place: &Place, a: &FieldElement) -> Result<(Rational, Option<i64>)> {
    let PlaceKind::Finite { p, e, f, maximal_order, .. } = place.kind().clone() else {
        unreachable!()
    };
    let d = place.field().degree() as i64;
    if place.places_above() == 1 {
        let vn = rat_valuation(&a.norm(), p);
        let exp = Rational::new(BigInt::from(vn), BigInt::from(d));
        let val = if maximal_order && vn % f as i64 == 0 { Some(vn / f as i64) } else { None };
        return Ok((exp, val));
    }
    if e > 1 {
        return Err(Error::UnsupportedPlace(format!("{} is ramified with several places above {p}", place.id())));
    }
    let (num, den) = clear_denominators(a);
    let vd = crate::exact_algebra::rational::int_valuation(&den, p) as i64;
    let mut n = HENSEL_START;
    loop {
        let lift = place.lift(n);
        if let Some(v) = valuation_at_root(&num, &lift, p, n) {
            if 2 * v < n {
                let val = v as i64 - vd;
                return Ok((Rational::from_integer(val.into()), Some(val)));
            }
        }
        n *= 2;
        if n > 4096 {
            return Err(Error::PrecisionExhausted { bits: n });
        }
    }
}

/// Value of `a` at the center of a certified root, with a bound on its
/// distance from the value at the exact root.
pub fn embed_at_root(a: &FieldElement, r: &ComplexApprox, bits: usize) -> (Complex, Real) {
    let z = r.center().with_bits(bits);
    let value = a.embed(&z);
    // |a(z) - a(root)| <= radius * sum |k c_k| (|z| + radius)^(k-1)
    let zr = &z.abs() + &r.radius;
    let mut deriv = Real::zero(bits);
    let mut pw = Real::one(bits);
    for (k, c) in a.coords().iter().enumerate().skip(1) {
        let ck = Real::from_rational(&(c * Rational::from_integer(BigInt::from(k))), bits).abs();
        deriv = &deriv + &(&ck * &pw);
        pw = &pw * &zr;
    }
    let slack = Real::pow2(-(bits as i64) + 8, bits) * (&value.abs() + &Real::one(bits));
    (value, &(&r.radius * &deriv) + &slack)
}

/// Index of the root used for an archimedean place.
pub fn place_root(place: &Place) -> Option<usize> {
    match place.kind() {
        PlaceKind::Real { root } => Some(*root),
        PlaceKind::ComplexPair { roots } => Some(roots.0),
        PlaceKind::Finite { .. } => None,
    }
}

fn arch_log(place: &Place, a: &FieldElement, precision_bits: u32) -> Result<(Real, Real)> {
    let root_index = place_root(place).expect("archimedean place");
    let mut prec = precision_bits;
    for _ in 0..4 {
        let roots = place.field().roots(prec)?;
        let bits = working_bits(prec);
        let (z, err) = embed_at_root(a, &roots[root_index], bits);
        let value = z.abs();
        if value > &err * &Real::from_i64(4, bits) {
            let log_err = &err / &(&value - &err);
            return Ok((value.ln(), log_err));
        }
        prec *= 2;
    }
    Err(Error::PrecisionExhausted { bits: prec })
}

/// `log ||a||_v` and `log |a|_v` at one place.
pub fn log_abs(place: &Place, a: &FieldElement, precision_bits: u32) -> Result<LocalValue> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    if a.field() != place.field() {
        return Err(Error::FieldMismatch);
    }
    let bits = working_bits(precision_bits);
    let (log_u, valuation, exponent, error_bound) = match place.kind() {
        PlaceKind::Finite { p, .. } => {
            let (exp, val) = finite_exponent(place, a)?;
            let lp = Real::from_i64(*p as i64, bits).ln();
            let l = -(&Real::from_rational(&exp, bits) * &lp);
            (l, val, Some(exp), Real::zero(bits))
        }
        _ => {
            let (l, err) = arch_log(place, a, precision_bits)?;
            (l, None, None, err)
        }
    };
    let w = Real::from_rational(&place.weight(), bits);
    Ok(LocalValue {
        place_id: place.id().to_string(),
        log_normalized: &w * &log_u,
        log_unnormalized: log_u,
        valuation,
        exponent,
        error_bound,
    })
}

/// Primes at which `a` can have nonzero valuation: divisors of the norm's
/// numerator and denominator and of the coordinate denominators.
pub fn support_primes(a: &FieldElement) -> Result<Vec<u64>> {
    let n = a.norm();
    let den = a.coords().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut ps = vec![];
    for m in [n.numer(), n.denom(), &den] {
        for (p, _) in factor_integer(&m.abs()) {
            let p = p.to_u64().ok_or_else(|| Error::PrimeTooLarge(p.to_string()))?;
            if !ps.contains(&p) {
                ps.push(p);
            }
        }
    }
    ps.sort();
    Ok(ps)
}

/// Every place where `a` may be nontrivial, archimedean first, with its
/// local value.
pub fn support_values(a: &FieldElement, precision_bits: u32) -> Result<Vec<(Place, LocalValue)>> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut out = vec![];
    for v in arch_places(a.field(), precision_bits)? {
        let lv = log_abs(&v, a, precision_bits)?;
        out.push((v, lv));
    }
    for p in support_primes(a)? {
        for v in finite_places(a.field(), p)? {
            let lv = log_abs(&v, a, precision_bits)?;
            out.push((v, lv));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat_int;

    fn qi() -> NumberField {
        NumberField::quadratic(0, 1, "Q(i)").unwrap()
    }

    fn close(a: &Real, b: f64) -> bool {
        (a.to_f64() - b).abs() < 1e-12
    }

    #[test]
    fn archimedean_enumeration() {
        let k = qi();
        let a = arch_places(&k, 128).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].local_degree(), 2);
        assert_eq!(a[0].id(), "arch:c0");
        let s2 = NumberField::quadratic(0, -2, "Q(sqrt2)").unwrap();
        let a = arch_places(&s2, 128).unwrap();
        assert_eq!(a.iter().map(|p| p.local_degree()).collect::<Vec<_>>(), vec![1, 1]);
        let q = arch_places(&NumberField::rationals(), 128).unwrap();
        assert_eq!((q.len(), q[0].id()), (1, "arch:r0"));
    }

    #[test]
    fn finite_enumeration() {
        let k = qi();
        let ef = |p| finite_places(&k, p).unwrap().iter().map(|v| v.record()).map(|r| (r.e.unwrap(), r.f.unwrap())).collect::<Vec<_>>();
        assert_eq!(ef(5), vec![(1, 1), (1, 1)]);
        assert_eq!(ef(2), vec![(2, 1)]);
        assert_eq!(ef(3), vec![(1, 2)]);
        let ids: Vec<String> = finite_places(&k, 5).unwrap().iter().map(|v| v.id().to_string()).collect();
        assert_eq!(ids, vec!["fin:5:2.1", "fin:5:3.1"]);
        assert_eq!(finite_places(&k, 4).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn non_maximal_fibers() {
        // x^2 - 5 at 2 has a single place and is accepted
        let s5 = NumberField::quadratic(0, -5, "Q(sqrt5)").unwrap();
        let v = finite_places(&s5, 2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].local_degree(), 2);
        // x^3 + x^2 + 8 = x^2 (x + 1) mod 2 with 2 dividing the index
        let k = NumberField::new(crate::number_fields::poly(&[8, 0, 1, 1]), None, "K").unwrap();
        assert_eq!(finite_places(&k, 2).unwrap_err(), Error::NonMaximalOrder { p: 2 });
    }

    #[test]
    fn documented_local_values() {
        let k = qi();
        let a = k.element("2+t").unwrap();
        let arch = &arch_places(&k, 128).unwrap()[0];
        assert!(close(&log_abs(arch, &a, 128).unwrap().log_unnormalized, 0.5 * 5f64.ln()));
        let v5 = finite_places(&k, 5).unwrap();
        // the place x + 2 is t = 3 mod 5, where 2 + t vanishes
        let lv: Vec<LocalValue> = v5.iter().map(|v| log_abs(v, &a, 128).unwrap()).collect();
        assert_eq!(lv[0].valuation, Some(1));
        assert_eq!(lv[1].valuation, Some(0));
        assert!(close(&lv[0].log_unnormalized, -5f64.ln()));
        let q = NumberField::rationals();
        let three = FieldElement::from_int(&q, 3);
        let v3 = &finite_places(&q, 3).unwrap()[0];
        let lv = log_abs(v3, &three, 128).unwrap();
        assert_eq!(lv.valuation, Some(1));
        assert_eq!(lv.exponent, Some(rat_int(1)));
        assert!(close(&lv.log_unnormalized, -3f64.ln()));
        assert_eq!(log_abs(v3, &FieldElement::zero(&q), 128).unwrap_err(), Error::ZeroElement);
    }

    #[test]
    fn rational_place_parsing() {
        assert_eq!("inf".parse::<RationalPlace>().unwrap(), RationalPlace::Infinity);
        assert_eq!("13".parse::<RationalPlace>().unwrap(), RationalPlace::Prime(13));
        assert_eq!("12".parse::<RationalPlace>().unwrap_err(), Error::NotPrime(12));
    }
}
