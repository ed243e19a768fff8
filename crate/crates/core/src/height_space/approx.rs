use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::step::{embed_fa, integral, StepFunction};
use crate::error::{Error, Result};
use crate::exact_algebra::real::working_bits;
use crate::exact_algebra::rounding::nearest_rational;
use crate::exact_algebra::{format_rational, Rational, Real};
use crate::number_fields::FieldElement;
use crate::places::RationalPlace;

#[derive(Clone, Debug)]
pub struct ApproxSolution {
    /// Rounded coefficient of each basis element, in basis order.
    pub coefficients: Vec<Rational>,
    /// Least-squares coefficients before rounding.
    pub real_coefficients: Vec<f64>,
    pub residual_l1: Real,
    pub residual_l2: Real,
    /// L2 residual of the unrounded least-squares solution.
    pub residual_l2_unrounded: f64,
    pub denominator_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxRecord {
    pub coefficients: Vec<String>,
    pub real_coefficients: Vec<f64>,
    pub residual_l1: String,
    pub residual_l2: String,
    pub residual_l2_unrounded: f64,
    pub denominator_bound: u64,
}

impl ApproxSolution {
    pub fn record(&self) -> ApproxRecord {
        ApproxRecord {
            coefficients: self.coefficients.iter().map(format_rational).collect(),
            real_coefficients: self.real_coefficients.clone(),
            residual_l1: self.residual_l1.to_decimal(30),
            residual_l2: self.residual_l2.to_decimal(30),
            residual_l2_unrounded: self.residual_l2_unrounded,
            denominator_bound: self.denominator_bound,
        }
    }
}

/// Weighted L1 and L2 norms of `target - sum_i c_i f_i` over the given cells.
fn residuals(
    cells: &[(RationalPlace, String, Rational)],
    target: &StepFunction,
    fs: &[StepFunction],
    coeffs: &[Real],
    bits: usize,
) -> (Real, Real) {
    let mut l1 = Real::zero(bits);
    let mut l2 = Real::zero(bits);
    for (v, id, w) in cells {
        let mut r = target.value(*v, id);
        for (f, c) in fs.iter().zip(coeffs) {
            r = &r - &(c * &f.value(*v, id));
        }
        let w = Real::from_rational(w, bits);
        l1 = &l1 + &(&w * &r.abs());
        l2 = &l2 + &(&w * &(&r * &r));
    }
    (l1, l2.sqrt())
}

/// Weighted least squares for `target ~ sum_i c_i f_{b_i}`, with each
/// coefficient then rounded to the nearest rational of denominator at
/// most `denominator_bound`.
pub fn approximate(
    target: &StepFunction,
    basis: &[FieldElement],
    denominator_bound: u64,
    precision_bits: u32,
) -> Result<ApproxSolution> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if denominator_bound == 0 {
        return Err(Error::BadShape("denominator bound must be positive".into()));
    }
    let bits = working_bits(precision_bits);
    let tol = Real::pow2(-(precision_bits as i64) / 4, bits);
    let mass = integral(target);
    if mass.abs() >= tol {
        return Err(Error::NotInX(mass.to_decimal(30)));
    }
    let tower = target.tower().ok_or(Error::LevelMismatch)?;
    let tower = if tower.precision_bits() == precision_bits { tower.clone() } else { tower.with_precision(precision_bits) };
    let fs = basis.iter().map(|b| embed_fa(&tower, target.level(), b)).collect::<Result<Vec<_>>>()?;

    let mut cells: BTreeMap<(RationalPlace, String), Rational> = BTreeMap::new();
    for f in fs.iter().chain([target]) {
        for (v, c) in f.cells() {
            cells.insert((v, c.place_id.clone()), c.weight.clone());
        }
    }
    let cells: Vec<(RationalPlace, String, Rational)> = cells.into_iter().map(|((v, id), w)| (v, id, w)).collect();

    let rows = cells.len().max(1);
    let mut a = DMatrix::zeros(rows, fs.len());
    let mut b = DVector::zeros(rows);
    for (i, (v, id, w)) in cells.iter().enumerate() {
        let sw = Real::from_rational(w, bits).sqrt().to_f64();
        for (k, f) in fs.iter().enumerate() {
            a[(i, k)] = sw * f.value(*v, id).to_f64();
        }
        b[i] = sw * target.value(*v, id).to_f64();
    }
    let svd = a.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    let x = svd.solve(&b, eps).map_err(|e| Error::BadShape(e.to_string()))?;
    let real_coefficients: Vec<f64> = x.iter().copied().collect();

    let exact: Vec<Real> = real_coefficients.iter().map(|c| Real::from_f64(*c, bits)).collect();
    let (_, l2_unrounded) = residuals(&cells, target, &fs, &exact, bits);

    let coefficients: Vec<Rational> = real_coefficients
        .iter()
        .map(|c| nearest_rational(&Rational::from_float(*c).unwrap_or_default(), denominator_bound))
        .collect();
    let rounded: Vec<Real> = coefficients.iter().map(|c| Real::from_rational(c, bits)).collect();
    let (residual_l1, residual_l2) = residuals(&cells, target, &fs, &rounded, bits);
    Ok(ApproxSolution {
        coefficients,
        real_coefficients,
        residual_l1,
        residual_l2,
        residual_l2_unrounded: l2_unrounded.to_f64(),
        denominator_bound,
    })
}
