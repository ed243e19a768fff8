use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::Real;
use crate::number_fields::{FieldElement, NumberField};
use crate::places::{arch_places, finite_places, log_abs, support_primes, Place, RationalPlace};

/// The `(s-1) x s` matrix `d_v log ||xi_r||_v` of a system of S-units.
#[derive(Clone, Debug)]
pub struct SUnitMatrix {
    pub field: NumberField,
    pub places: Vec<String>,
    pub generators: Vec<FieldElement>,
    pub entries: Vec<Vec<Real>>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub nullspace_basis: Vec<Vec<f64>>,
    pub precision_bits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SUnitRecord {
    pub field: String,
    pub places: Vec<String>,
    pub generators: Vec<String>,
    pub entries: Vec<Vec<String>>,
    pub rank: usize,
    pub nullspace_basis: Vec<Vec<f64>>,
    pub max_nullspace_angle: f64,
}

impl SUnitMatrix {
    /// Row sums, which vanish by the product formula.
    pub fn row_sums(&self) -> Vec<Real> {
        let bits = working_bits(self.precision_bits);
        self.entries.iter().map(|r| r.iter().fold(Real::zero(bits), |s, x| &s + x)).collect()
    }

    /// Threshold below which a singular value counts as zero.
    pub fn tolerance(&self) -> f64 {
        rank_tolerance(self.precision_bits, self.singular_values.first().copied().unwrap_or(0.0))
    }

    /// Largest angle between a nullspace basis vector and the all-ones line.
    pub fn max_nullspace_angle(&self) -> f64 {
        self.nullspace_basis.iter().map(|t| angle_to_ones(t)).fold(0.0, f64::max)
    }

    pub fn record(&self) -> SUnitRecord {
        SUnitRecord {
            field: self.field.label().to_string(),
            places: self.places.clone(),
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            entries: self.entries.iter().map(|r| r.iter().map(|x| x.to_decimal(30)).collect()).collect(),
            rank: self.rank,
            nullspace_basis: self.nullspace_basis.clone(),
            max_nullspace_angle: self.max_nullspace_angle(),
        }
    }
}

fn rank_tolerance(precision_bits: u32, sigma_max: f64) -> f64 {
    // the SVD itself runs in double precision
    let analytic = 2f64.powi(-(precision_bits as i32) / 4).max(1e-12);
    analytic * sigma_max.max(1.0)
}

/// Angle in radians between `t` and the line spanned by `(1, ..., 1)`.
pub fn angle_to_ones(t: &[f64]) -> f64 {
    let n = t.len() as f64;
    let dot: f64 = t.iter().sum();
    let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let c = (dot.abs() / (norm * n.sqrt())).min(1.0);
    // acos loses accuracy near 1; measure the orthogonal part instead
    let mean = dot / n;
    let perp = t.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>().sqrt();
    perp.atan2(c * norm)
}

fn check_s_unit(xi: &FieldElement, s: &[Place], precision_bits: u32) -> Result<()> {
    for p in support_primes(xi)? {
        for w in finite_places(xi.field(), p)? {
            if s.iter().any(|v| v == &w) {
                continue;
            }
            let lv = log_abs(&w, xi, precision_bits)?;
            if !lv.exponent.expect("finite").is_zero() {
                return Err(Error::NotAnSUnit(format!("{} (generator {xi})", w.id())));
            }
        }
    }
    Ok(())
}

/// Builds the matrix for the place set `S` and `|S| - 1` generators and
/// computes its rank and numeric nullspace.
pub fn sunit_matrix(field: &NumberField, s: &[Place], generators: &[FieldElement], precision_bits: u32) -> Result<SUnitMatrix> {
    if s.len() < 2 {
        return Err(Error::BadShape(format!("S needs at least 2 places, got {}", s.len())));
    }
    if generators.len() + 1 != s.len() {
        return Err(Error::BadShape(format!("|S| = {} needs {} generators, got {}", s.len(), s.len() - 1, generators.len())));
    }
    for v in s {
        if v.field() != field {
            return Err(Error::FieldMismatch);
        }
    }
    for a in arch_places(field, precision_bits)? {
        if !s.iter().any(|v| v == &a) {
            return Err(Error::BadShape(format!("S is missing the archimedean place {}", a.id())));
        }
    }
    for (i, v) in s.iter().enumerate() {
        if s[..i].iter().any(|u| u == v) {
            return Err(Error::BadShape(format!("place {} repeated in S", v.id())));
        }
    }
    let bits = working_bits(precision_bits);
    let mut entries = vec![];
    for xi in generators {
        if xi.field() != field {
            return Err(Error::FieldMismatch);
        }
        if xi.is_zero() {
            return Err(Error::ZeroElement);
        }
        check_s_unit(xi, s, precision_bits)?;
        let mut row = vec![];
        for v in s {
            let lv = log_abs(v, xi, precision_bits)?;
            row.push(&Real::from_i64(v.local_degree() as i64, bits) * &lv.log_unnormalized);
        }
        entries.push(row);
    }
    let n = s.len();
    // pad to a square matrix so the SVD returns a full basis of R^n
    let m = DMatrix::from_fn(n, n, |i, j| if i < entries.len() { entries[i][j].to_f64() } else { 0.0 });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut sv: Vec<(f64, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
    sv.sort_by(|a, b| b.0.total_cmp(&a.0));
    let tol = rank_tolerance(precision_bits, sv[0].0);
    let rank = sv.iter().filter(|(x, _)| *x > tol).count();
    let nullspace_basis = sv
        .iter()
        .filter(|(x, _)| *x <= tol)
        .map(|(_, k)| {
            let mut t: Vec<f64> = v_t.row(*k).iter().copied().collect();
            if t.iter().sum::<f64>() < 0.0 {
                t.iter_mut().for_each(|x| *x = -*x);
            }
            t
        })
        .collect();
    Ok(SUnitMatrix {
        field: field.clone(),
        places: s.iter().map(|v| v.id().to_string()).collect(),
        generators: generators.to_vec(),
        entries,
        singular_values: sv.iter().map(|x| x.0).collect(),
        rank,
        nullspace_basis,
        precision_bits,
    })
}

/// The place set `{inf} ∪ {p : p in primes}` of Q.
pub fn rational_s(primes: &[u64], precision_bits: u32) -> Result<Vec<Place>> {
    let q = NumberField::rationals();
    let mut s = crate::places::places_above(&q, RationalPlace::Infinity, precision_bits)?;
    for &p in primes {
        s.extend(finite_places(&q, p)?);
    }
    Ok(s)
}
