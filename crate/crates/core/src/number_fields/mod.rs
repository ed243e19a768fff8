//! Number fields `Q[x]/(f)` with exact element arithmetic and validated
//! automorphism groups.

mod automorphism;
mod element;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

pub use automorphism::{compose_automorphisms, Automorphism};
pub use element::FieldElement;
pub use parse::parse_element;

use crate::error::{Error, Result};
use crate::exact_algebra::{
    certify_irreducible, complex_roots, cyclotomic_polynomial, format_rational, parse_rational, ComplexApprox,
    IntPolynomial, IrreducibilityCertificate, RatPolynomial, Rational,
};

pub struct FieldData {
    label: String,
    min_poly: IntPolynomial,
    min_rat: RatPolynomial,
    certificate: IrreducibilityCertificate,
    /// Coordinates of each automorphism's image of the generator.
    automorphisms: Vec<Vec<Rational>>,
    galois: bool,
    roots: Mutex<HashMap<u32, Arc<Vec<ComplexApprox>>>>,
}

/// Cheap to clone; clones share data and the root cache.
#[derive(Clone)]
pub struct NumberField(Arc<FieldData>);

impl PartialEq for NumberField {
    fn eq(&self, other: &NumberField) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.min_poly == other.0.min_poly
                && self.0.label == other.0.label
                && self.0.automorphisms == other.0.automorphisms)
    }
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}, {})", self.0.label, self.0.min_poly)
    }
}

impl NumberField {
    /// Builds a field from a monic integer polynomial, certifying
    /// irreducibility and validating any automorphism images exactly.
    pub fn new(min_poly: IntPolynomial, images: Option<Vec<Vec<Rational>>>, label: &str) -> Result<NumberField> {
        if !min_poly.is_monic() {
            return Err(Error::NotMonic);
        }
        let certificate = certify_irreducible(&min_poly)?;
        let d = min_poly.degree();
        let min_rat = min_poly.to_rat();
        let bare = NumberField(Arc::new(FieldData {
            label: label.to_string(),
            min_poly: min_poly.clone(),
            min_rat: min_rat.clone(),
            certificate: certificate.clone(),
            automorphisms: vec![],
            galois: false,
            roots: Mutex::new(HashMap::new()),
        }));
        let identity = FieldElement::generator(&bare).coords().to_vec();
        let images = match images {
            None => vec![identity],
            Some(list) => {
                let mut out = Vec::with_capacity(list.len());
                for (index, mut coords) in list.into_iter().enumerate() {
                    if coords.len() > d {
                        return Err(Error::BadAutomorphism { index });
                    }
                    coords.resize(d, Rational::from_integer(0.into()));
                    let img = FieldElement::from_coords(&bare, coords.clone())?;
                    if !img.eval_poly(&min_rat).is_zero() {
                        return Err(Error::BadAutomorphism { index });
                    }
                    out.push(coords);
                }
                if out.is_empty() {
                    vec![identity]
                } else {
                    check_closed(&bare, &out)?;
                    out
                }
            }
        };
        let galois = images.len() == d;
        Ok(NumberField(Arc::new(FieldData {
            label: label.to_string(),
            min_poly,
            min_rat,
            certificate,
            automorphisms: images,
            galois,
            roots: Mutex::new(HashMap::new()),
        })))
    }

    /// Q presented as `Q[x]/(x)`.
    pub fn rationals() -> NumberField {
        NumberField::new(IntPolynomial::from_i64s(&[0, 1]), None, "Q").expect("x is irreducible")
    }

    /// `Q[x]/(x^2 + a1 x + a0)` with its conjugation `t -> -t - a1`.
    pub fn quadratic(a1: i64, a0: i64, label: &str) -> Result<NumberField> {
        let f = IntPolynomial::from_i64s(&[a0, a1, 1]);
        let id = vec![Rational::from_integer(0.into()), Rational::from_integer(1.into())];
        let conj = vec![Rational::from_integer((-a1).into()), Rational::from_integer((-1).into())];
        NumberField::new(f, Some(vec![id, conj]), label)
    }

    /// The n-th cyclotomic field with automorphisms `t -> t^a`, `gcd(a, n) = 1`,
    /// listed by increasing `a`.
    pub fn cyclotomic(n: u64) -> Result<NumberField> {
        let f = cyclotomic_polynomial(n);
        let label = format!("Q(zeta_{n})");
        let bare = NumberField::new(f.clone(), None, &label)?;
        let t = FieldElement::generator(&bare);
        let images: Vec<Vec<Rational>> =
            (1..=n.max(1)).filter(|a| a.gcd(&n) == 1).map(|a| t.pow(a as i64).expect("nonzero").coords().to_vec()).collect();
        NumberField::new(f, Some(images), &label)
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn min_poly(&self) -> &IntPolynomial {
        &self.0.min_poly
    }

    pub(crate) fn min_rat(&self) -> &RatPolynomial {
        &self.0.min_rat
    }

    pub fn degree(&self) -> usize {
        self.0.min_poly.degree()
    }

    pub fn is_galois(&self) -> bool {
        self.0.galois
    }

    pub fn certificate(&self) -> &IrreducibilityCertificate {
        &self.0.certificate
    }

    pub fn automorphisms(&self) -> Vec<Automorphism> {
        self.0
            .automorphisms
            .iter()
            .map(|c| Automorphism::new(FieldElement::from_coords(self, c.clone()).expect("validated image")))
            .collect()
    }

    /// Certified roots of the defining polynomial, cached per precision.
    pub fn roots(&self, precision_bits: u32) -> Result<Arc<Vec<ComplexApprox>>> {
        if let Some(r) = self.0.roots.lock().expect("root cache").get(&precision_bits) {
            return Ok(r.clone());
        }
        let r = Arc::new(complex_roots(&self.0.min_poly, precision_bits)?);
        self.0.roots.lock().expect("root cache").insert(precision_bits, r.clone());
        Ok(r)
    }

    pub fn same_as(&self, other: &NumberField) -> bool {
        self == other
    }

    pub fn element(&self, expr: &str) -> Result<FieldElement> {
        parse_element(self, expr)
    }

    pub fn to_description(&self) -> FieldDescription {
        FieldDescription {
            label: self.0.label.clone(),
            min_poly: self.0.min_poly.to_strings(),
            automorphisms: if self.0.automorphisms.len() > 1 {
                Some(self.0.automorphisms.iter().map(|c| c.iter().map(format_rational).collect()).collect())
            } else {
                None
            },
        }
    }
}

fn check_closed(field: &NumberField, images: &[Vec<Rational>]) -> Result<()> {
    for i in 0..images.len() {
        for j in 0..i {
            if images[i] == images[j] {
                return Err(Error::NotClosed);
            }
        }
    }
    for a in images {
        let sigma = Automorphism::new(FieldElement::from_coords(field, a.clone())?);
        for b in images {
            let tb = FieldElement::from_coords(field, b.clone())?;
            let composed = sigma.apply(&tb)?;
            if !images.iter().any(|c| c.as_slice() == composed.coords()) {
                return Err(Error::NotClosed);
            }
        }
    }
    Ok(())
}

/// On-disk field description: `{ label, min_poly, automorphisms? }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDescription {
    pub label: String,
    pub min_poly: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphisms: Option<Vec<Vec<String>>>,
}

impl FieldDescription {
    pub fn build(&self) -> Result<NumberField> {
        let f = IntPolynomial::parse_coeffs(&self.min_poly)?;
        let images = match &self.automorphisms {
            None => None,
            Some(list) => Some(
                list.iter()
                    .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        NumberField::new(f, images, &self.label)
    }
}

/// Parses a field from JSON text.
pub fn field_from_json(text: &str) -> Result<NumberField> {
    let d: FieldDescription = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    d.build()
}

pub fn field_to_json(field: &NumberField) -> String {
    serde_json::to_string_pretty(&field.to_description()).expect("serializable")
}

/// Integer polynomial from a slice of small coefficients (low degree first).
pub fn poly(coeffs: &[i64]) -> IntPolynomial {
    IntPolynomial::from_i64s(coeffs)
}

pub fn nf_new(min_poly: IntPolynomial, images: Option<Vec<Vec<Rational>>>, label: &str) -> Result<NumberField> {
    NumberField::new(min_poly, images, label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn elem_arith(op: ArithOp, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
    }
}

pub fn elem_min_poly(a: &FieldElement) -> IntPolynomial {
    a.min_poly()
}

pub fn field_norm(a: &FieldElement) -> Rational {
    a.norm()
}

pub fn is_torsion(a: &FieldElement) -> Result<bool> {
    a.is_torsion()
}
