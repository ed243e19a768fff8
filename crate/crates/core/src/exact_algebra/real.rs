//! Multiprecision reals and complex numbers on top of `astro-float`.
//!
//! Every `Real` carries its own precision; binary operations round to the
//! larger of the two operand precisions. Transcendental functions share a
//! per-thread constants cache, so values are still pure functions of their
//! inputs.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::rational::{format_decimal, parse_rational, Rational};
use crate::error::Result;

const RM: RoundingMode = RoundingMode::ToEven;

/// Extra bits carried internally above a caller's requested precision.
pub const GUARD_BITS: u32 = 64;

pub fn working_bits(precision_bits: u32) -> usize {
    (precision_bits + GUARD_BITS) as usize
}

/// Number of decimal digits that `bits` binary digits can honestly support.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as usize
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    bits: usize,
}

impl Real {
    fn wrap(v: BigFloat, bits: usize) -> Real {
        debug_assert!(!v.is_nan(), "NaN produced: {:?}", v.err());
        Real { v, bits }
    }

    pub fn zero(bits: usize) -> Real {
        Real::wrap(BigFloat::from_u64(0, bits), bits)
    }

    pub fn one(bits: usize) -> Real {
        Real::wrap(BigFloat::from_u64(1, bits), bits)
    }

    pub fn from_i64(n: i64, bits: usize) -> Real {
        Real::wrap(BigFloat::from_i64(n, bits), bits)
    }

    pub fn from_f64(x: f64, bits: usize) -> Real {
        Real::wrap(BigFloat::from_f64(x, bits), bits)
    }

    pub fn from_int(n: &BigInt, bits: usize) -> Real {
        if n.is_zero() {
            return Real::zero(bits);
        }
        let (sign, words) = n.to_u64_digits();
        let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
        let words: Vec<Word> = words.into_iter().map(|w| w as Word).collect();
        let e = (words.len() * Word::BITS as usize) as i32;
        let mut v = BigFloat::from_words(&words, s, e);
        v.set_precision(bits, RM).expect("precision");
        Real::wrap(v, bits)
    }

    pub fn from_rational(q: &Rational, bits: usize) -> Real {
        let n = Real::from_int(q.numer(), bits + 64);
        let d = Real::from_int(q.denom(), bits + 64);
        Real::wrap(n.v.div(&d.v, bits, RM), bits)
    }

    /// 2^e exactly.
    pub fn pow2(e: i64, bits: usize) -> Real {
        let mut v = BigFloat::from_u64(1, bits);
        v.set_exponent((e + 1) as i32);
        Real::wrap(v, bits)
    }

    pub fn parse(s: &str, bits: usize) -> Result<Real> {
        Ok(Real::from_rational(&parse_rational(s)?, bits))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    fn p(&self, other: &Real) -> usize {
        self.bits().max(other.bits())
    }

    pub fn with_bits(&self, bits: usize) -> Real {
        let mut v = self.v.clone();
        v.set_precision(bits, RM).expect("precision");
        Real::wrap(v, bits)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn abs(&self) -> Real {
        Real::wrap(self.v.abs(), self.bits)
    }

    pub fn sqrt(&self) -> Real {
        Real::wrap(self.v.sqrt(self.bits, RM), self.bits)
    }

    /// Natural logarithm; the argument must be positive.
    pub fn ln(&self) -> Real {
        assert!(self.v.is_positive() && !self.v.is_zero(), "ln of non-positive value");
        let bits = self.bits();
        Real::wrap(with_consts(|cc| self.v.ln(bits, RM, cc)), bits)
    }

    pub fn exp(&self) -> Real {
        let bits = self.bits();
        Real::wrap(with_consts(|cc| self.v.exp(bits, RM, cc)), bits)
    }

    pub fn powi(&self, n: usize) -> Real {
        Real::wrap(self.v.powi(n, self.bits, RM), self.bits)
    }

    /// `self^y` for `self >= 0`.
    pub fn powf(&self, y: &Real) -> Real {
        if self.is_zero() {
            return Real::zero(self.bits());
        }
        let bits = self.p(y);
        Real::wrap(with_consts(|cc| self.v.pow(&y.v, bits, RM, cc)), bits)
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `max(0, self)`.
    pub fn positive_part(&self) -> Real {
        if self.v.is_negative() {
            Real::zero(self.bits())
        } else {
            self.clone()
        }
    }

    /// Exact binary value as a rational.
    pub fn to_rational(&self) -> Rational {
        let Some((words, _, sign, e, _)) = self.v.as_raw_parts() else {
            panic!("non-finite value");
        };
        if words.iter().all(|w| *w == 0) {
            return Rational::zero();
        }
        let mut m = BigUint::zero();
        for w in words.iter().rev() {
            m = (m << Word::BITS) + BigUint::from(*w as u64);
        }
        let shift = e as i64 - (words.len() as i64) * Word::BITS as i64;
        let mut q = Rational::from_integer(BigInt::from(m));
        if shift >= 0 {
            q *= Rational::from_integer(BigInt::from(1) << shift as usize);
        } else {
            q /= Rational::from_integer(BigInt::from(1) << (-shift) as usize);
        }
        if sign == Sign::Neg {
            q = -q;
        }
        q
    }

    pub fn to_f64(&self) -> f64 {
        let Some((words, _, sign, e, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        let n = words.len();
        if words.iter().all(|w| *w == 0) {
            return 0.0;
        }
        let hi = words[n - 1] as f64;
        let lo = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
        let m = hi * 2f64.powi(-64) + lo * 2f64.powi(-128);
        let x = m * 2f64.powi(e);
        if sign == Sign::Neg {
            -x
        } else {
            x
        }
    }

    /// Binary exponent `e` with `2^(e-1) <= |self| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            self.v.exponent().map(|e| e as i64)
        }
    }

    /// Fixed-point decimal string, rounded from the exact binary value.
    pub fn to_decimal(&self, frac_digits: usize) -> String {
        format_decimal(&self.to_rational(), frac_digits)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_decimal(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_decimal(digits))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.v == other.v
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let bits = self.p(rhs);
                Real::wrap(self.v.$method(&rhs.v, bits, RM), bits)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.v.clone().neg(), self.bits)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(mut iter: I) -> Real {
        let first = iter.next().unwrap_or_else(|| Real::zero(128));
        iter.fold(first, |acc, x| acc + x)
    }
}

/// Sum that starts from an explicit zero so empty sums keep a precision.
pub fn sum_reals<'a>(bits: usize, xs: impl IntoIterator<Item = &'a Real>) -> Real {
    xs.into_iter().fold(Real::zero(bits), |acc, x| &acc + x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Complex {
        let bits = re.bits();
        Complex { re, im: Real::zero(bits) }
    }

    pub fn zero(bits: usize) -> Complex {
        Complex::from_real(Real::zero(bits))
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Complex {
        Complex { re: Real::from_f64(re, bits), im: Real::from_f64(im, bits) }
    }

    pub fn bits(&self) -> usize {
        self.re.bits().max(self.im.bits())
    }

    pub fn with_bits(&self, bits: usize) -> Complex {
        Complex { re: self.re.with_bits(bits), im: self.im.with_bits(bits) }
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: &Real) -> Complex {
        Complex { re: &self.re * k, im: &self.im * k }
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let d = o.norm_sqr();
        Complex {
            re: &(&(&self.re * &o.re) + &(&self.im * &o.im)) / &d,
            im: &(&(&self.im * &o.re) - &(&self.re * &o.im)) / &d,
        }
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Evaluates a rational-coefficient polynomial (low degree first) at `z`.
pub fn eval_rational_poly(coeffs: &[Rational], z: &Complex) -> Complex {
    let bits = z.bits();
    let mut acc = Complex::zero(bits);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(&Complex::from_real(Real::from_rational(c, bits)));
    }
    acc
}
