//! Fundamental units of real quadratic fields from the continued fraction of
//! `sqrt(D)` or `(1 + sqrt(D))/2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::primes::factor_integer;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticUnit {
    /// Squarefree radicand the unit is written over.
    pub d: BigInt,
    /// `eps = a + b*sqrt(d)`, with `eps > 1`.
    pub a: Rational,
    pub b: Rational,
    /// Norm of `eps`, either 1 or -1.
    pub norm: i32,
}

/// Squarefree part `d0` and cofactor `c` with `d = c^2 * d0`.
pub fn squarefree_decompose(d: &BigInt) -> (BigInt, BigInt) {
    let mut d0 = BigInt::one();
    let mut c = BigInt::one();
    for (p, e) in factor_integer(d) {
        let p = BigInt::from(p);
        if e % 2 == 1 {
            d0 *= &p;
        }
        c *= num_traits::pow(p, (e / 2) as usize);
    }
    if d.is_negative() {
        d0 = -d0;
    }
    (d0, c)
}

/// Continued-fraction digits of `(p + sqrt(d)) / q`, produced lazily.
struct SurdExpansion {
    d: BigInt,
    s: BigInt,
    p: BigInt,
    q: BigInt,
}

impl Iterator for SurdExpansion {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let a = (&self.p + &self.s).div_floor(&self.q);
        self.p = &a * &self.q - &self.p;
        self.q = (&self.d - &self.p * &self.p) / &self.q;
        Some(a)
    }
}

/// Fundamental unit of `Q(sqrt(d))` for an integer `d > 1` that is not a
/// perfect square.
pub fn fundamental_unit(d: &BigInt) -> Result<QuadraticUnit> {
    if d <= &BigInt::one() {
        return Err(Error::BadShape(format!("radicand {d} is not > 1")));
    }
    let (d0, _) = squarefree_decompose(d);
    if d0.is_one() {
        return Err(Error::BadShape(format!("{d} is a perfect square")));
    }
    let s = d0.sqrt();
    let one_mod_4 = d0.mod_floor(&BigInt::from(4)) == BigInt::one();
    let digits = if one_mod_4 {
        SurdExpansion { d: d0.clone(), s, p: BigInt::one(), q: BigInt::from(2) }
    } else {
        SurdExpansion { d: d0.clone(), s, p: BigInt::zero(), q: BigInt::one() }
    };
    let (mut p0, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
    let c = (&d0 - 1) / 4;
    for a in digits {
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        (p0, p1, q0, q1) = (p1, p2, q1, q2);
        let (p, q) = (&p1, &q1);
        let norm = if one_mod_4 { p * p - p * q - &c * q * q } else { p * p - &d0 * q * q };
        if norm.abs().is_one() {
            let n = if norm.is_positive() { 1 } else { -1 };
            let (a, b) = if one_mod_4 {
                (Rational::new(2 * p - q, BigInt::from(2)), Rational::new(q.clone(), BigInt::from(2)))
            } else {
                (Rational::from_integer(p.clone()), Rational::from_integer(q.clone()))
            };
            return Ok(QuadraticUnit { d: d0, a, b, norm: n });
        }
    }
    unreachable!("continued fraction of a quadratic surd is infinite")
}
