use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::support_values;
use crate::error::{Error, Result};
use crate::exact_algebra::complex_roots;
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::Real;
use crate::number_fields::FieldElement;

#[derive(Clone, Debug)]
pub struct HeightResult {
    pub value: Real,
    pub method: String,
    pub precision_bits: u32,
    /// `sum_v log |a|_v`, only for the place sum.
    pub defect: Option<Real>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightRecord {
    pub value: String,
    pub method: String,
    pub precision_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<String>,
}

impl HeightResult {
    pub fn record(&self, digits: usize) -> HeightRecord {
        HeightRecord {
            value: self.value.to_decimal(digits),
            method: self.method.clone(),
            precision_bits: self.precision_bits,
            defect: self.defect.as_ref().map(|d| d.to_decimal(digits)),
        }
    }
}

pub trait HeightMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn compute(&self, a: &FieldElement, precision_bits: u32) -> Result<HeightResult>;
}

pub struct PlaceSumHeight;
pub struct MahlerHeight;

impl HeightMethod for PlaceSumHeight {
    fn name(&self) -> &'static str {
        "place_sum"
    }

    fn compute(&self, a: &FieldElement, precision_bits: u32) -> Result<HeightResult> {
        let bits = working_bits(precision_bits);
        let vals = support_values(a, precision_bits)?;
        let mut value = Real::zero(bits);
        let mut defect = Real::zero(bits);
        for (_, lv) in &vals {
            value = &value + &lv.log_normalized.positive_part();
            defect = &defect + &lv.log_normalized;
        }
        Ok(HeightResult { value, method: self.name().into(), precision_bits, defect: Some(defect) })
    }
}

impl HeightMethod for MahlerHeight {
    fn name(&self) -> &'static str {
        "mahler"
    }

    fn compute(&self, a: &FieldElement, precision_bits: u32) -> Result<HeightResult> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let bits = working_bits(precision_bits);
        let m = a.min_poly();
        let n = m.degree();
        let mut total = Real::from_int(&m.leading().abs(), bits).ln();
        if n > 1 || !m.coeff(0).is_zero() {
            for z in complex_roots(&m, precision_bits)? {
                total = &total + &z.center().abs().with_bits(bits).ln().positive_part();
            }
        }
        let value = &total / &Real::from_i64(n as i64, bits);
        Ok(HeightResult { value, method: self.name().into(), precision_bits, defect: None })
    }
}

/// Registered height methods.
pub fn height_methods() -> Vec<Box<dyn HeightMethod>> {
    vec![Box::new(PlaceSumHeight), Box::new(MahlerHeight)]
}

pub fn height_method(name: &str) -> Option<Box<dyn HeightMethod>> {
    height_methods().into_iter().find(|m| m.name() == name)
}

/// Weil height as a sum of local terms.
pub fn height(a: &FieldElement, precision_bits: u32) -> Result<HeightResult> {
    PlaceSumHeight.compute(a, precision_bits)
}

/// Weil height from the minimal polynomial.
pub fn height_mahler(a: &FieldElement, precision_bits: u32) -> Result<HeightResult> {
    MahlerHeight.compute(a, precision_bits)
}

/// `sum_v log |a|_v` over the support of `a`.
pub fn product_defect(a: &FieldElement, precision_bits: u32) -> Result<Real> {
    Ok(height(a, precision_bits)?.defect.expect("place sum reports a defect"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_fields::NumberField;

    fn tol(bits: u32) -> f64 {
        2f64.powi(-(bits as i32) / 4)
    }

    #[test]
    fn documented_heights() {
        let q = NumberField::rationals();
        let two = FieldElement::from_int(&q, 2);
        let h = height(&two, 128).unwrap();
        assert!((h.value.to_f64() - 2f64.ln()).abs() < 1e-15);
        assert!(h.defect.unwrap().to_f64().abs() < tol(128));
        let third = q.element("1/3").unwrap();
        assert!((height(&third, 128).unwrap().value.to_f64() - 3f64.ln()).abs() < 1e-15);
        let twothirds = q.element("2/3").unwrap();
        assert!((height_mahler(&twothirds, 128).unwrap().value.to_f64() - 3f64.ln()).abs() < 1e-15);

        let k = NumberField::quadratic(0, 1, "Q(i)").unwrap();
        let a = k.element("2+t").unwrap();
        assert!((height(&a, 128).unwrap().value.to_f64() - 0.5 * 5f64.ln()).abs() < 1e-15);
        assert!(product_defect(&a, 128).unwrap().to_f64().abs() < tol(128));

        let s5 = NumberField::quadratic(0, -5, "Q(sqrt5)").unwrap();
        let phi = s5.element("(1+t)/2").unwrap();
        let hm = height_mahler(&phi, 128).unwrap().value.to_f64();
        assert!((hm - 0.5 * 1.618033988749895f64.ln()).abs() < 1e-15);
        assert!((height(&phi, 128).unwrap().value.to_f64() - hm).abs() < 1e-15);
        assert!(product_defect(&phi, 128).unwrap().to_f64().abs() < tol(128));
    }

    #[test]
    fn registry() {
        let names: Vec<&str> = height_methods().iter().map(|m| m.name()).collect();
        assert_eq!(names, vec!["place_sum", "mahler"]);
        assert!(height_method("mahler").is_some());
        assert!(height_method("naive").is_none());
    }
}
