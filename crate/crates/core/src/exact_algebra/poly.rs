//! Dense univariate polynomials over Z and Q, lowest degree first.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Integer polynomial; the coefficient vector never has trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPolynomial {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> IntPolynomial {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn parse_coeffs<S: AsRef<str>>(coeffs: &[S]) -> Result<IntPolynomial> {
        let cs = coeffs
            .iter()
            .map(|s| {
                s.as_ref()
                    .trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad integer coefficient {:?}", s.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPolynomial::new(cs))
    }

    pub fn zero() -> IntPolynomial {
        IntPolynomial { coeffs: vec![] }
    }

    pub fn one() -> IntPolynomial {
        IntPolynomial::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> IntPolynomial {
        IntPolynomial::new(vec![c])
    }

    /// `x - c`.
    pub fn linear_root(c: BigInt) -> IntPolynomial {
        IntPolynomial::new(vec![-c, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> IntPolynomial {
        IntPolynomial::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    pub fn add(&self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || o.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Content removed and leading coefficient made positive.
    pub fn primitive_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPolynomial::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact quotient by a monic divisor; `None` when the division leaves a remainder.
    pub fn div_exact_monic(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        let (q, r) = self.to_rat().divrem(&d.to_rat());
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    pub fn to_rat(&self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        if self.coeffs.is_empty() {
            return vec!["0".into()];
        }
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    /// Rendering in the variable `var`, highest degree first.
    pub fn display_in(&self, var: &str) -> String {
        let cs: Vec<Rational> = self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect();
        render(&cs, var)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

/// Rational polynomial; the coefficient vector never has trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPolynomial {
    coeffs: Vec<Rational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> RatPolynomial {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPolynomial { coeffs }
    }

    pub fn parse_coeffs<S: AsRef<str>>(coeffs: &[S]) -> Result<RatPolynomial> {
        Ok(RatPolynomial::new(
            coeffs.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>()?,
        ))
    }

    pub fn zero() -> RatPolynomial {
        RatPolynomial { coeffs: vec![] }
    }

    pub fn one() -> RatPolynomial {
        RatPolynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> RatPolynomial {
        RatPolynomial::new(vec![c])
    }

    pub fn x() -> RatPolynomial {
        RatPolynomial::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> RatPolynomial {
        RatPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, o: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &RatPolynomial) -> RatPolynomial {
        if self.is_zero() || o.is_zero() {
            return RatPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPolynomial::new(out)
    }

    pub fn scale(&self, k: &Rational) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: usize) -> RatPolynomial {
        (0..n).fold(RatPolynomial::one(), |acc, _| acc.mul(self))
    }

    /// Division with remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &RatPolynomial) -> (RatPolynomial, RatPolynomial) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dl = d.leading();
        let dd = d.degree();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (RatPolynomial::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (RatPolynomial::new(q), RatPolynomial::new(r))
    }

    pub fn rem(&self, d: &RatPolynomial) -> RatPolynomial {
        self.divrem(d).1
    }

    pub fn monic(&self) -> RatPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        RatPolynomial::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, o: &RatPolynomial) -> RatPolynomial {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &RatPolynomial) -> (RatPolynomial, RatPolynomial, RatPolynomial) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (RatPolynomial::one(), RatPolynomial::zero());
        let (mut t0, mut t1) = (RatPolynomial::zero(), RatPolynomial::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.leading().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    /// `self / gcd(self, self')`, monic.
    pub fn squarefree_part(&self) -> RatPolynomial {
        if self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }

    /// Integer polynomial when every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPolynomial> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(IntPolynomial::new(self.coeffs.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }

    /// Denominators cleared, content removed, leading coefficient positive.
    pub fn to_primitive_int(&self) -> IntPolynomial {
        let l = self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let l = Rational::from_integer(l);
        IntPolynomial::new(self.coeffs.iter().map(|c| (c * &l).to_integer()).collect()).primitive_part()
    }

    /// Composition `self(inner)`.
    pub fn compose(&self, inner: &RatPolynomial) -> RatPolynomial {
        self.coeffs
            .iter()
            .rev()
            .fold(RatPolynomial::zero(), |acc, c| acc.mul(inner).add(&RatPolynomial::constant(c.clone())))
    }

    pub fn display_in(&self, var: &str) -> String {
        render(&self.coeffs, var)
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

fn render(coeffs: &[Rational], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&format_rational(&a));
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{mono}", format_rational(&a)));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
